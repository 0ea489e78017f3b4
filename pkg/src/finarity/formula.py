"""First-order formulas over a relational signature.

Concrete syntax (ASCII)::

    formula := iff
    iff     := imp ("<->" imp)*
    imp     := or ("->" imp)?
    or      := and ("|" and)*
    and     := un ("&" un)*
    un      := "~" un | ("exists" | "forall") VAR "." un | atom | "(" formula ")"
    atom    := NAME "(" VAR ("," VAR)* ")" | VAR "=" VAR | "true" | "false"

``<->``, ``|`` and ``&`` associate to the left, ``->`` to the right. A
quantifier binds only the following unary formula, so ``exists z . A & B`` is
``(exists z . A) & B``.

:func:`evaluate` computes whole truth tables: every subformula becomes a
boolean array over ``M^v`` for its own free variables ``v``, connectives
broadcast those arrays against each other (cylindrification) and quantifiers
reduce along one axis (projection). :func:`holds` is the textbook
per-assignment recursion and is kept as an independent check.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ArityMismatch, InputError, ParseError, UnknownSymbol
from .structure import FiniteStructure, Relation, check_size

KEYWORDS = frozenset({"exists", "forall", "true", "false"})


class Formula:
    """Base class of AST nodes; ``str(f)`` gives text that parses back to ``f``."""

    def __str__(self) -> str:
        return to_text(self)

    def __and__(self, other: Formula) -> Formula:
        return And(self, other)

    def __or__(self, other: Formula) -> Formula:
        return Or(self, other)

    def __invert__(self) -> Formula:
        return Not(self)


@dataclass(frozen=True, eq=True)
class Atom(Formula):
    name: str
    args: tuple[str, ...]


@dataclass(frozen=True, eq=True)
class Eq(Formula):
    left: str
    right: str


@dataclass(frozen=True, eq=True)
class Top(Formula):
    pass


@dataclass(frozen=True, eq=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True, eq=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True, eq=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, eq=True)
class Forall(Formula):
    var: str
    body: Formula


# ---------------------------------------------------------------- printing

_IFF, _IMP, _OR, _AND, _UN, _ATOM = range(1, 7)
_BINARY = {And: (" & ", _AND), Or: (" | ", _OR), Implies: (" -> ", _IMP), Iff: (" <-> ", _IFF)}


def _prec(f: Formula) -> int:
    if isinstance(f, (Atom, Eq, Top, Bottom)):
        return _ATOM
    if isinstance(f, (Not, Exists, Forall)):
        return _UN
    return _BINARY[type(f)][1]


def _wrap(f: Formula, min_prec: int) -> str:
    s = to_text(f)
    return f"({s})" if _prec(f) < min_prec else s


def to_text(f: Formula) -> str:
    if isinstance(f, Atom):
        return f"{f.name}({','.join(f.args)})"
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Not):
        return "~" + _wrap(f.body, _UN)
    if isinstance(f, (Exists, Forall)):
        q = "exists" if isinstance(f, Exists) else "forall"
        return f"{q} {f.var} . {_wrap(f.body, _UN)}"
    op, p = _BINARY[type(f)]
    if isinstance(f, Implies):
        return _wrap(f.left, p + 1) + op + _wrap(f.right, p)
    return _wrap(f.left, p) + op + _wrap(f.right, p + 1)


# ----------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<iff><->)|(?P<imp>->)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[~&|().,=])"
)


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            mt = _TOKEN.match(text, pos)
            if mt is None:
                raise ParseError(f"unknown token {text[pos]!r}", *_position(text, pos))
            if mt.lastgroup != "ws":
                self.toks.append((mt.group(), pos))
            pos = mt.end()
        self.toks.append(("<end>", len(text)))
        self.i = 0

    def peek(self) -> str:
        return self.toks[self.i][0]

    def error(self, msg: str) -> ParseError:
        tok, off = self.toks[self.i]
        return ParseError(f"{msg}, found {tok!r}", *_position(self.text, off))

    def take(self, value: str) -> None:
        if self.peek() != value:
            raise self.error(f"expected {value!r}")
        self.i += 1

    def var(self) -> str:
        tok = self.peek()
        if not re.match(r"[A-Za-z_]", tok) or tok in KEYWORDS:
            raise self.error("expected a variable")
        self.i += 1
        return tok

    def formula(self) -> Formula:
        f = self.imp()
        while self.peek() == "<->":
            self.i += 1
            f = Iff(f, self.imp())
        return f

    def imp(self) -> Formula:
        f = self.disj()
        if self.peek() == "->":
            self.i += 1
            return Implies(f, self.imp())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek() == "|":
            self.i += 1
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.i += 1
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.i += 1
            return Not(self.unary())
        if tok in ("exists", "forall"):
            self.i += 1
            v = self.var()
            self.take(".")
            body = self.unary()
            return Exists(v, body) if tok == "exists" else Forall(v, body)
        if tok == "(":
            self.i += 1
            f = self.formula()
            self.take(")")
            return f
        if tok == "true":
            self.i += 1
            return Top()
        if tok == "false":
            self.i += 1
            return Bottom()
        if re.match(r"[A-Za-z_]", tok):
            self.i += 1
            if self.peek() == "(":
                self.i += 1
                args = [self.var()]
                while self.peek() == ",":
                    self.i += 1
                    args.append(self.var())
                self.take(")")
                return Atom(tok, tuple(args))
            if self.peek() == "=":
                self.i += 1
                return Eq(tok, self.var())
            raise self.error(f"expected '(' or '=' after {tok!r}")
        raise self.error("expected a formula")


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.peek() != "<end>":
        raise p.error("unexpected trailing input")
    return f


# ----------------------------------------------------------- free variables


def free_vars(f: Formula) -> list[str]:
    """Free variables in order of first free occurrence."""
    out: list[str] = []

    def walk(g: Formula, bound: frozenset[str]) -> None:
        if isinstance(g, Atom):
            names: Sequence[str] = g.args
        elif isinstance(g, Eq):
            names = (g.left, g.right)
        elif isinstance(g, (Top, Bottom)):
            names = ()
        elif isinstance(g, Not):
            walk(g.body, bound)
            return
        elif isinstance(g, (Exists, Forall)):
            walk(g.body, bound | {g.var})
            return
        else:
            walk(g.left, bound)  # type: ignore[attr-defined]
            walk(g.right, bound)  # type: ignore[attr-defined]
            return
        for v in names:
            if v not in bound and v not in out:
                out.append(v)

    walk(f, frozenset())
    return out


def var_context(names: Sequence[str] | str) -> tuple[str, ...]:
    """Validate a variable context; a string is split on commas."""
    if isinstance(names, str):
        names = [n.strip() for n in names.split(",") if n.strip()]
    ctx = tuple(names)
    if len(set(ctx)) != len(ctx):
        raise InputError(f"duplicate variables in context {list(ctx)}")
    for v in ctx:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v) or v in KEYWORDS:
            raise InputError(f"{v!r} is not a variable name")
    return ctx


# --------------------------------------------------------------- evaluation


@dataclass
class _Table:
    vars: tuple[str, ...]
    arr: np.ndarray


def _align(t: _Table, target: tuple[str, ...], m: int) -> np.ndarray:
    pos = [target.index(v) for v in t.vars]
    arr = np.transpose(t.arr, np.argsort(pos)) if t.vars else t.arr
    shape = [1] * len(target)
    for p in pos:
        shape[p] = m
    return arr.reshape(shape)


def _lookup(s: FiniteStructure, name: str, k: int) -> Relation:
    if name not in s.relations:
        raise UnknownSymbol(f"unknown relation symbol {name!r} in structure {s.name}")
    rel = s.relations[name]
    if rel.k != k:
        raise ArityMismatch(f"{name} has arity {rel.k} but is applied to {k} variables")
    return rel


def _table(f: Formula, s: FiniteStructure) -> _Table:
    m = s.m
    if isinstance(f, Top):
        return _Table((), np.array(True))
    if isinstance(f, Bottom):
        return _Table((), np.array(False))
    if isinstance(f, Eq):
        if f.left == f.right:
            return _Table((f.left,), np.ones(m, dtype=bool))
        return _Table((f.left, f.right), np.eye(m, dtype=bool))
    if isinstance(f, Atom):
        rel = _lookup(s, f.name, len(f.args))
        distinct = tuple(dict.fromkeys(f.args))
        check_size(m, len(distinct))
        base = rel.bits.reshape((m,) * rel.k)
        grids = [np.arange(m).reshape([m if j == d else 1 for j in range(len(distinct))]) for d in range(len(distinct))]
        arr = base[tuple(grids[distinct.index(v)] for v in f.args)]
        return _Table(distinct, np.broadcast_to(arr, (m,) * len(distinct)))
    if isinstance(f, Not):
        t = _table(f.body, s)
        return _Table(t.vars, ~t.arr)
    if isinstance(f, (Exists, Forall)):
        t = _table(f.body, s)
        if f.var not in t.vars:
            return t
        axis = t.vars.index(f.var)
        rest = t.vars[:axis] + t.vars[axis + 1:]
        arr = t.arr.any(axis=axis) if isinstance(f, Exists) else t.arr.all(axis=axis)
        return _Table(rest, arr)
    left = _table(f.left, s)  # type: ignore[attr-defined]
    right = _table(f.right, s)  # type: ignore[attr-defined]
    target = left.vars + tuple(v for v in right.vars if v not in left.vars)
    check_size(m, len(target))
    a, b = _align(left, target, m), _align(right, target, m)
    if isinstance(f, And):
        arr = a & b
    elif isinstance(f, Or):
        arr = a | b
    elif isinstance(f, Implies):
        arr = ~a | b
    else:
        arr = a == b
    return _Table(target, arr)


def evaluate(f: Formula | str, s: FiniteStructure, ctx: Sequence[str] | str = ()) -> Relation:
    """The set of assignments to ``ctx`` satisfying ``f`` in ``s``, as a Relation."""
    if isinstance(f, str):
        f = parse(f)
    ctx = var_context(ctx)
    missing = [v for v in free_vars(f) if v not in ctx]
    if missing:
        raise InputError(f"free variables {missing} are not in the context {list(ctx)}")
    check_size(s.m, len(ctx))
    t = _table(f, s)
    arr = np.broadcast_to(_align(t, ctx, s.m), (s.m,) * len(ctx))
    return Relation(s.m, len(ctx), arr.reshape(-1))


def check_sentence(f: Formula | str, s: FiniteStructure) -> bool:
    if isinstance(f, str):
        f = parse(f)
    fv = free_vars(f)
    if fv:
        raise InputError(f"not a sentence: free variables {fv}")
    return not evaluate(f, s, ()).is_empty()


def holds(f: Formula, s: FiniteStructure, env: Mapping[str, int]) -> bool:
    """Tarskian satisfaction of ``f`` under one assignment, by plain recursion."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Eq):
        return env[f.left] == env[f.right]
    if isinstance(f, Atom):
        rel = _lookup(s, f.name, len(f.args))
        return tuple(env[v] for v in f.args) in rel
    if isinstance(f, Not):
        return not holds(f.body, s, env)
    if isinstance(f, Exists):
        return any(holds(f.body, s, {**env, f.var: a}) for a in range(s.m))
    if isinstance(f, Forall):
        return all(holds(f.body, s, {**env, f.var: a}) for a in range(s.m))
    left = holds(f.left, s, env)  # type: ignore[attr-defined]
    if isinstance(f, And):
        return left and holds(f.right, s, env)
    if isinstance(f, Or):
        return left or holds(f.right, s, env)
    if isinstance(f, Implies):
        return (not left) or holds(f.right, s, env)
    return left == holds(f.right, s, env)  # type: ignore[attr-defined]


def universal_closure(f: Formula, order: Sequence[str] | None = None) -> Formula:
    for v in reversed(list(order if order is not None else free_vars(f))):
        f = Forall(v, f)
    return f


def random_formula(
    rng: random.Random,
    signature: Sequence[tuple[str, int]],
    depth: int,
    variables: Sequence[str] = ("x", "y", "z", "w"),
) -> Formula:
    """A random formula of nesting depth at most ``depth``; atoms may repeat variables."""
    if depth <= 0 or rng.random() < 0.2:
        r = rng.random()
        if signature and r < 0.6:
            name, k = rng.choice(list(signature))
            if k == 0:
                return Top()
            return Atom(name, tuple(rng.choice(variables) for _ in range(k)))
        if r < 0.9:
            return Eq(rng.choice(variables), rng.choice(variables))
        return Top() if rng.random() < 0.5 else Bottom()
    kind = rng.randrange(7)
    if kind == 0:
        return Not(random_formula(rng, signature, depth - 1, variables))
    if kind in (1, 2):
        q = Exists if kind == 1 else Forall
        return q(rng.choice(variables), random_formula(rng, signature, depth - 1, variables))
    op = (And, Or, Implies, Iff)[kind - 3]
    return op(
        random_formula(rng, signature, depth - 1, variables),
        random_formula(rng, signature, depth - 1, variables),
    )
