"""Arity of theories of finite structures."""

from .arity import (
    ArityReport,
    QEResult,
    ba_atoms,
    closure_oracle,
    constantizable_within,
    fingerprint,
    formula_arity,
    is_nary,
    n_transitive,
    nary_witness,
    qe_check,
    theory_arity,
    transitivity_profile,
)
from .combinators import (
    CoordinateMap,
    binarize,
    cartesian_product,
    cartesian_sum,
    compose,
    cylindrify,
    disjoint_union,
    e_definable_check,
    expand_with,
    mixed_product,
    mixed_sum,
    project,
    unarize,
)
from .errors import CapExceeded, FinarityError, InputError, ParseError
from .formula import evaluate, holds, parse, to_text
from .serialize import load_structure, read_structure, save_structure, write_structure
from .structure import FiniteStructure, Relation, Signature
from .symmetry import automorphisms, is_definable, orbit_partition

__version__ = "0.1.0"

__all__ = [
    "ArityReport", "CapExceeded", "CoordinateMap", "FinarityError", "FiniteStructure", "InputError",
    "ParseError", "QEResult", "Relation", "Signature", "automorphisms", "ba_atoms", "binarize",
    "cartesian_product", "cartesian_sum", "closure_oracle", "compose", "constantizable_within",
    "cylindrify", "disjoint_union", "e_definable_check", "evaluate", "expand_with", "fingerprint",
    "formula_arity", "holds", "is_definable", "is_nary", "load_structure", "mixed_product", "mixed_sum",
    "n_transitive", "nary_witness", "orbit_partition", "parse", "project", "qe_check", "read_structure",
    "save_structure", "theory_arity", "to_text", "transitivity_profile", "unarize", "write_structure",
    "__version__",
]
