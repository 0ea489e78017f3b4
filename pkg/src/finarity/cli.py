"""``finarity`` command-line front end.

Every subcommand prints a short human summary, or with ``--json`` a report
object: command echo, structure digest, results, timings and tool version.
Exit codes: 0 success, 1 verification failure, 2 input error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from . import arity as ar
from .combinators import binarize, compose, disjoint_union, e_definable_check, unarize
from .errors import CapExceeded, InputError, ParseError
from .formula import evaluate, free_vars, parse, var_context
from .generators import (
    alternating_orientation,
    cyclic_order,
    equivalence,
    linear_order,
    n_ball_order,
    paper_example_R,
    pointed_set,
    pure_set,
    successor_cycle,
)
from .serialize import dumps_json, read_structure, structure_to_dict, write_structure
from .structure import FiniteStructure, Relation
from .symmetry import automorphisms, orbit_partition

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


@dataclass
class Outcome:
    """What a subcommand hands back: results for the report, text for humans, an exit code."""

    results: dict
    text: list[str]
    structure: FiniteStructure | None = None
    code: int = EXIT_OK
    timings: dict[str, float] = field(default_factory=dict)


def digest(s: FiniteStructure) -> str:
    return "sha256:" + hashlib.sha256(dumps_json(s).encode()).hexdigest()


def structure_header(s: FiniteStructure) -> dict:
    return {"name": s.name, "m": s.m, "digest": digest(s), "elements": list(s.elements)}


def _names(s: FiniteStructure, t: Sequence[int]) -> str:
    return "(" + ", ".join(s.elements[i] for i in t) + ")"


def _load(path: str) -> FiniteStructure:
    return read_structure(path)


def _emit_structure(s: FiniteStructure, out: str | None, text: list[str]) -> None:
    if out:
        write_structure(s, out)
        text.append(f"wrote {s.name} (m={s.m}) to {out}")
    else:
        text.append(dumps_json(s).rstrip("\n"))


def _relation_of(s: FiniteStructure, args) -> tuple[Relation, str]:
    if args.relation:
        if args.relation not in s.relations:
            raise InputError(f"{s.name} has no relation named {args.relation}")
        return s.relations[args.relation], args.relation
    if not args.formula:
        raise InputError("give --relation NAME or --formula TEXT")
    f = parse(args.formula)
    ctx = var_context(args.vars) if args.vars else tuple(free_vars(f))
    return evaluate(f, s, ctx), args.formula


# ------------------------------------------------------------ subcommands


def cmd_arity(args) -> Outcome:
    s = _load(args.structure)
    rep = ar.theory_arity(s, args.max_k)
    text = [f"structure: {s.name} (m={s.m})", f"arity: {rep.arity}", "k  orbits  fingerprint classes by n"]
    for d in rep.per_k:
        cls = " ".join(f"n={n}:{c}" for n, c in sorted(d.fingerprint_classes.items()))
        text.append(f"{d.k:<2} {d.orbits:<7} {cls}".rstrip())
    for w in rep.witnesses:
        text.append(f"not {w.n}-ary: {_names(s, w.first)} and {_names(s, w.second)} agree on {w.n}-projections")
    return Outcome(rep.to_json(), text, s)


def cmd_eval(args) -> Outcome:
    s = _load(args.structure)
    f = parse(args.formula)
    ctx = var_context(args.vars) if args.vars is not None else tuple(free_vars(f))
    rel = evaluate(f, s, ctx)
    tuples = rel.tuples()
    text = [f"{len(tuples)} tuples over ({', '.join(ctx)})"] + [_names(s, t) for t in tuples]
    results = {"formula": args.formula, "vars": list(ctx), "count": len(tuples), "tuples": [list(t) for t in tuples]}
    return Outcome(results, text, s)


def cmd_orbits(args) -> Outcome:
    s = _load(args.structure)
    op = orbit_partition(s, args.k)
    sizes = op.sizes().tolist()
    reps = op.representatives
    text = [f"{op.count} orbits on M^{args.k}"] + [
        f"  #{i}: {_names(s, r)} size {sizes[i]}" for i, r in enumerate(reps)
    ]
    results = {"k": args.k, "count": op.count, "orbits": [
        {"id": i, "representative": list(r), "size": sizes[i]} for i, r in enumerate(reps)
    ]}
    return Outcome(results, text, s)


def cmd_aut(args) -> Outcome:
    s = _load(args.structure)
    g = automorphisms(s)
    results: dict[str, Any] = {"size": len(g), "generators": [list(p) for p in g.generators]}
    text = [f"|Aut({s.name})| = {len(g)}"] + [f"  generator {list(p)}" for p in g.generators]
    if args.all:
        results["elements"] = [list(p) for p in g.elements]
        text += [f"  {list(p)}" for p in g.elements]
    return Outcome(results, text, s)


def cmd_transitive(args) -> Outcome:
    s = _load(args.structure)
    prof = ar.transitivity_profile(s, args.max_n)
    text = [f"{n}-transitive: {'yes' if f else 'no'}" for n, f in sorted(prof.flags.items())]
    text.append(f"largest n: {prof.degree}")
    return Outcome(prof.to_json(), text, s)


def cmd_qe_check(args) -> Outcome:
    s = _load(args.structure)
    res = ar.qe_check(s)
    if res.holds:
        text = ["quantifier elimination: yes"]
    else:
        text = [
            "quantifier elimination: no",
            f"  {_names(s, res.first)} and {_names(s, res.second)} share a quantifier-free type but not a complete type",
        ]
    return Outcome(res.to_json(), text, s)


def cmd_ba(args) -> Outcome:
    s = _load(args.structure)
    atoms = ar.ba_atoms(s, args.k, args.n)
    results = {"k": args.k, "n": args.n, "atoms": atoms.count, "orbits": atoms.orbit_count, "full": atoms.is_full}
    text = [f"BA(k={args.k}, n={args.n}): {atoms.count} atoms, {atoms.orbit_count} orbits, full: {atoms.is_full}"]
    return Outcome(results, text, s)


def cmd_formula_arity(args) -> Outcome:
    s = _load(args.structure)
    rel, label = _relation_of(s, args)
    n = ar.formula_arity(s, rel)
    results: dict[str, Any] = {"relation": label, "k": rel.k, "arity": n}
    text = [f"arity of {label}: {n}"]
    if n > 1:
        w = ar.nary_witness(s, rel, n - 1)
        results["witness"] = {"n": w.n, "pair": w.to_json()}
        text.append(f"not {w.n}-ary: {_names(s, w.first)} vs {_names(s, w.second)}")
    return Outcome(results, text, s)


def _expansion(fn: Callable[[FiniteStructure], FiniteStructure]) -> Callable:
    def run(args) -> Outcome:
        s = _load(args.structure)
        out = fn(s)
        text: list[str] = []
        _emit_structure(out, args.output, text)
        return Outcome({"output": args.output, "result": structure_to_dict(out), "result_digest": digest(out)}, text, s)

    return run


def cmd_djunion(args) -> Outcome:
    parts = [_load(p) for p in args.structures]
    du = disjoint_union(parts)
    text: list[str] = []
    _emit_structure(du.structure, args.output, text)
    results = {"parts": [structure_header(p) for p in parts], **du.to_json(),
               "result": structure_to_dict(du.structure), "result_digest": digest(du.structure)}
    return Outcome(results, text, None)


def cmd_compose(args) -> Outcome:
    outer, inner = _load(args.outer), _load(args.inner)
    comp = compose(outer, inner)
    text: list[str] = []
    _emit_structure(comp.structure, args.output, text)
    results = {"outer": structure_header(outer), "inner": structure_header(inner), **comp.to_json(),
               "result": structure_to_dict(comp.structure), "result_digest": digest(comp.structure)}
    return Outcome(results, text, None)


def cmd_edef_check(args) -> Outcome:
    s = _load(args.structure)
    ok = e_definable_check(s, args.fiber_size)
    return Outcome({"fiber_size": args.fiber_size, "e_definable": ok}, [f"fiber equivalence definable: {ok}"], s)


GENERATORS: dict[str, tuple[int, Callable[..., FiniteStructure]]] = {
    "pure": (1, pure_set),
    "succ": (1, successor_cycle),
    "cyclic": (1, cyclic_order),
    "paper-R": (0, paper_example_R),
    "alt4": (0, alternating_orientation),
    "pointed": (1, pointed_set),
    "linear": (1, linear_order),
}


def cmd_gen(args) -> Outcome:
    family, params = args.family, args.params
    results: dict[str, Any] = {"family": family, "params": params}
    try:
        ints = [int(p) for p in params] if family != "equiv" else []
    except ValueError:
        raise InputError(f"generator parameters must be integers, got {params}") from None
    if family == "equiv":
        if len(params) != 1:
            raise InputError("gen equiv takes one parameter: class sizes, e.g. 2,2")
        try:
            s = equivalence([int(c) for c in params[0].split(",")])
        except ValueError:
            raise InputError(f"class sizes must be integers, got {params[0]!r}") from None
    elif family == "nball":
        if len(ints) != 2:
            raise InputError("gen nball takes two parameters: m n")
        s, rep = n_ball_order(*ints)
        results["axioms"] = rep.to_json()
    else:
        want, make = GENERATORS[family]
        if len(ints) != want:
            raise InputError(f"gen {family} takes {want} parameter(s), got {len(ints)}")
        s = make(*ints)
    text: list[str] = []
    _emit_structure(s, args.output, text)
    if "axioms" in results and args.output:
        text.append(f"axioms: {'all hold' if results['axioms']['passed'] else 'failing ' + str(rep.failures())}")
    results["result"] = structure_to_dict(s)
    return Outcome(results, text, s)


def cmd_verify_paper(args) -> Outcome:
    from .verify import CHECKS, run_check
    from .generators import load_corpus

    checks = [c for c in CHECKS if not args.only or c.id in args.only]
    if args.only and len(checks) != len(set(args.only)):
        known = ", ".join(c.id for c in CHECKS)
        raise InputError(f"unknown check id in {args.only}; known: {known}")
    if args.list:
        text = [f"{c.id:<5} {c.title}  [{c.anchor}]" for c in checks]
        return Outcome({"checks": [{"id": c.id, "title": c.title, "anchor": c.anchor} for c in checks]}, text)
    fixtures = args.fixtures
    if fixtures is not None and not Path(fixtures).is_dir():
        raise InputError(f"fixtures directory {fixtures} does not exist")
    corpus = load_corpus(fixtures)
    results = [run_check(c, corpus) for c in checks]
    text = []
    for r in results:
        text.append(f"[{'PASS' if r.passed else 'FAIL'}] {r.id} {r.title} ({r.seconds:.2f} s, budget {r.budget_s:g} s)")
        text.append(f"       anchor: {r.anchor}")
        text += [f"       {'ok ' if ok else 'BAD'} {line}" for ok, line in r.lines if args.verbose or not ok]
    passed = sum(r.passed for r in results)
    text.append(f"{passed}/{len(results)} checks passed")
    return Outcome(
        {"checks": [r.to_json() for r in results], "passed": passed, "total": len(results)},
        text,
        code=EXIT_OK if passed == len(results) else EXIT_VERIFY,
        timings={r.id: round(r.seconds, 3) for r in results},
    )


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="finarity", description="Arity of theories of finite relational structures.")
    p.add_argument("--version", action="version", version=f"finarity {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help, description=help)
        sp.add_argument("--json", action="store_true", help="print a JSON report")
        sp.set_defaults(run=fn)
        return sp

    sp = add("arity", cmd_arity, "arity of the theory of a structure")
    sp.add_argument("structure")
    sp.add_argument("--max-k", type=int, default=None, help="largest tuple length examined (default m)")

    sp = add("eval", cmd_eval, "solution set of a formula")
    sp.add_argument("-f", "--formula", required=True)
    sp.add_argument("-s", "--structure", required=True)
    sp.add_argument("--vars", default=None, help="comma-separated variable context (default: free variables)")

    sp = add("verify-paper", cmd_verify_paper, "replay the acceptance checks on the bundled corpus")
    sp.add_argument("--list", action="store_true", help="list checks with their anchors")
    sp.add_argument("--fixtures", default=None, help="directory of structure JSON files to use instead")
    sp.add_argument("--only", nargs="+", metavar="ID", help="run only these check ids")
    sp.add_argument("-v", "--verbose", action="store_true", help="show passing expectations too")

    sp = add("orbits", cmd_orbits, "Aut-orbits on M^k")
    sp.add_argument("structure")
    sp.add_argument("-k", type=int, required=True)

    sp = add("aut", cmd_aut, "automorphism group")
    sp.add_argument("structure")
    sp.add_argument("--all", action="store_true", help="list every automorphism")

    sp = add("transitive", cmd_transitive, "n-transitivity profile")
    sp.add_argument("structure")
    sp.add_argument("--max-n", type=int, default=None)

    sp = add("qe-check", cmd_qe_check, "quantifier elimination check")
    sp.add_argument("structure")

    sp = add("ba", cmd_ba, "atoms of the algebra of n-ary definable subsets of M^k")
    sp.add_argument("structure")
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("-n", type=int, required=True)

    sp = add("formula-arity", cmd_formula_arity, "least n such that a definable relation is n-ary")
    sp.add_argument("structure")
    sp.add_argument("-r", "--relation", default=None)
    sp.add_argument("-f", "--formula", default=None)
    sp.add_argument("--vars", default=None)

    for name, fn, help in (("binarize", binarize, "add all binary singletons"), ("unarize", unarize, "add all unary singletons")):
        sp = add(name, _expansion(fn), help)
        sp.add_argument("structure")
        sp.add_argument("-o", "--output", default=None)

    sp = add("djunion", cmd_djunion, "disjoint union with part predicates")
    sp.add_argument("structures", nargs="+")
    sp.add_argument("-o", "--output", default=None)

    sp = add("compose", cmd_compose, "composition OUTER[INNER]")
    sp.add_argument("outer")
    sp.add_argument("inner")
    sp.add_argument("-o", "--output", default=None)

    sp = add("edef-check", cmd_edef_check, "is the same-fiber equivalence definable")
    sp.add_argument("structure")
    sp.add_argument("--fiber-size", type=int, required=True)

    sp = add("gen", cmd_gen, "generate a structure")
    sp.add_argument("family", choices=sorted([*GENERATORS, "equiv", "nball"]))
    sp.add_argument("params", nargs="*")
    sp.add_argument("-o", "--output", default=None)
    return p


def _report(argv: Sequence[str], out: Outcome, seconds: float) -> dict:
    report: dict[str, Any] = {
        "tool": "finarity",
        "version": __version__,
        "command": list(argv),
        "structure": structure_header(out.structure) if out.structure is not None else None,
        "results": out.results,
        "exit_code": out.code,
        "timings": {"total_s": round(seconds, 3), **out.timings},
    }
    return report


def _error_report(argv: Sequence[str], kind: str, message: str, code: int, extra: dict | None = None) -> dict:
    return {
        "tool": "finarity",
        "version": __version__,
        "command": list(argv),
        "structure": None,
        "error": {"kind": kind, "message": message, **(extra or {})},
        "exit_code": code,
        "timings": {},
    }


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    as_json = getattr(args, "json", False)
    start = time.perf_counter()
    try:
        out = args.run(args)
    except (InputError, CapExceeded) as exc:
        code = EXIT_CAP if isinstance(exc, CapExceeded) else EXIT_INPUT
        extra = {"line": exc.line, "column": exc.column} if isinstance(exc, ParseError) else None
        if as_json:
            print(json.dumps(_error_report(argv, type(exc).__name__, str(exc), code, extra), indent=2, ensure_ascii=False))
        else:
            print(f"finarity: error: {exc}", file=sys.stderr)
        return code
    if as_json:
        print(json.dumps(_report(argv, out, time.perf_counter() - start), indent=2, ensure_ascii=False))
    else:
        print("\n".join(out.text))
    return out.code


if __name__ == "__main__":
    raise SystemExit(main())
