"""JSON and text-DSL readers/writers for :class:`FiniteStructure`.

DSL example::

    # the four-element example
    structure paper_R;
    universe a b c d;
    relation R/3 { (a,b,c) (b,a,d) (1,2,3) }

``universe`` takes either a size or the element names in index order; tuple
entries are element names or indices.
"""

from __future__ import annotations

import json
import re
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

import jsonschema

from .errors import ArityMismatch, ElementOutOfRange, InputError, ParseError
from .structure import FiniteStructure, Relation

WORD = re.compile(r"[A-Za-z0-9_.:\-]+\Z")


def _schema(name: str) -> dict:
    return json.loads(resources.files("finarity").joinpath("schemas").joinpath(name).read_text())


STRUCTURE_SCHEMA = _schema("structure.schema.json")


def _resolve(entry: Any, names: dict[str, int], m: int, where: str) -> int:
    if isinstance(entry, str):
        if entry in names:
            return names[entry]
        if entry.isdigit():
            entry = int(entry)
        else:
            raise ElementOutOfRange(f"{where}: unknown element {entry!r}")
    if isinstance(entry, bool) or not isinstance(entry, int) or not 0 <= entry < m:
        raise ElementOutOfRange(f"{where}: element {entry!r} is outside 0..{m - 1}")
    return entry


def _build(name: str, universe: int | Sequence[str], rels: list[tuple[str, int, list]]) -> FiniteStructure:
    if isinstance(universe, int):
        m, elements = universe, None
    else:
        m, elements = len(universe), tuple(universe)
    lookup = {} if elements is None else {e: i for i, e in enumerate(elements)}
    relations = {}
    for rname, k, tuples in rels:
        if rname in relations:
            raise InputError(f"relation {rname} declared twice")
        resolved = []
        for t in tuples:
            if len(t) != k:
                raise ArityMismatch(f"relation {rname}/{k}: tuple {list(t)} has length {len(t)}")
            resolved.append(tuple(_resolve(a, lookup, m, f"relation {rname}") for a in t))
        relations[rname] = Relation.from_tuples(m, k, resolved)
    return FiniteStructure(name, m, relations, elements)


def structure_from_dict(data: dict) -> FiniteStructure:
    try:
        jsonschema.validate(data, STRUCTURE_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"schema violation at {path}: {exc.message}") from None
    rels = [(n, r["arity"], r["tuples"]) for n, r in data["relations"].items()]
    return _build(data["name"], data["universe"], rels)


def structure_to_dict(s: FiniteStructure) -> dict:
    default = s.elements == tuple(str(i) for i in range(s.m))
    return {
        "name": s.name,
        "universe": s.m if default else list(s.elements),
        "relations": {n: {"arity": r.k, "tuples": [list(t) for t in r]} for n, r in s.relations.items()},
    }


def dumps_json(s: FiniteStructure) -> str:
    """Stable JSON text: one tuple per line, relations in declaration order."""
    d = structure_to_dict(s)
    lines = ["{", f'  "name": {json.dumps(d["name"])},', f'  "universe": {json.dumps(d["universe"])},']
    if not d["relations"]:
        lines.append('  "relations": {}')
    else:
        lines.append('  "relations": {')
        items = list(d["relations"].items())
        for i, (n, r) in enumerate(items):
            tuples = ",\n".join(f"        {json.dumps(t)}" for t in r["tuples"])
            body = f"[\n{tuples}\n      ]" if tuples else "[]"
            comma = "," if i + 1 < len(items) else ""
            lines.append(f'    {json.dumps(n)}: {{\n      "arity": {r["arity"]},\n      "tuples": {body}\n    }}{comma}')
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def loads_json(text: str) -> FiniteStructure:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return structure_from_dict(data)


_TOKEN = re.compile(r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)|(?P<punct>[;{}(),/])|(?P<word>[A-Za-z0-9_.:\-]+)")


def _tokenize_dsl(text: str) -> list[tuple[str, int, int]]:
    out = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if mt is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind, value = mt.lastgroup, mt.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind in ("punct", "word"):
                out.append((value, line, col))
            col += len(value)
        pos = mt.end()
    return out


class _DSLParser:
    def __init__(self, text: str):
        self.toks = _tokenize_dsl(text)
        self.i = 0
        end_line = text.count("\n") + 1
        self.eof = ("<eof>", end_line, len(text.rsplit("\n", 1)[-1]) + 1)

    def peek(self) -> tuple[str, int, int]:
        return self.toks[self.i] if self.i < len(self.toks) else self.eof

    def next(self) -> tuple[str, int, int]:
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        tok, line, col = self.next()
        if tok != value:
            raise ParseError(f"expected {value!r}, found {tok!r}", line, col)

    def word(self, what: str, pattern: re.Pattern = WORD) -> str:
        tok, line, col = self.next()
        if tok == "<eof>" or not pattern.match(tok):
            raise ParseError(f"expected {what}, found {tok!r}", line, col)
        return tok

    def integer(self, what: str) -> int:
        tok, line, col = self.next()
        if not tok.isdigit():
            raise ParseError(f"expected {what}, found {tok!r}", line, col)
        return int(tok)

    def parse(self) -> FiniteStructure:
        self.expect("structure")
        name = self.word("structure name")
        self.expect(";")
        self.expect("universe")
        items = []
        while self.peek()[0] not in (";", "<eof>"):
            items.append(self.word("element name or universe size"))
        self.expect(";")
        if not items:
            tok, line, col = self.peek()
            raise ParseError("empty universe declaration", line, col)
        universe: int | list[str]
        if len(items) == 1 and items[0].isdigit():
            universe = int(items[0])
        else:
            universe = items
        rels = []
        while self.peek()[0] != "<eof>":
            self.expect("relation")
            rname = self.word("relation name", re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z"))
            self.expect("/")
            k = self.integer("arity")
            self.expect("{")
            tuples = []
            while self.peek()[0] == "(":
                _, line, col = self.next()
                t: list[str] = []
                if self.peek()[0] != ")":
                    t.append(self.word("element"))
                    while self.peek()[0] == ",":
                        self.next()
                        t.append(self.word("element"))
                self.expect(")")
                if len(t) != k:
                    raise ArityMismatch(f"relation {rname}/{k}: tuple at line {line}, column {col} has length {len(t)}")
                tuples.append(t)
            self.expect("}")
            if self.peek()[0] == ";":
                self.next()
            rels.append((rname, k, tuples))
        return _build(name, universe, rels)


def loads_dsl(text: str) -> FiniteStructure:
    return _DSLParser(text).parse()


def dumps_dsl(s: FiniteStructure) -> str:
    if not WORD.match(s.name):
        raise InputError(f"structure name {s.name!r} cannot be written in the DSL")
    lines = [f"structure {s.name};"]
    if s.elements == tuple(str(i) for i in range(s.m)):
        lines.append(f"universe {s.m};")
    else:
        bad = [e for e in s.elements if not WORD.match(e)]
        if bad:
            raise InputError(f"element names {bad} cannot be written in the DSL")
        lines.append("universe " + " ".join(s.elements) + ";")
    for n, r in s.relations.items():
        tuples = ["(" + ",".join(str(a) for a in t) + ")" for t in r]
        if not tuples:
            lines.append(f"relation {n}/{r.k} {{ }}")
            continue
        lines.append(f"relation {n}/{r.k} {{")
        for i in range(0, len(tuples), 8):
            lines.append("  " + " ".join(tuples[i:i + 8]))
        lines.append("}")
    return "\n".join(lines) + "\n"


def load_structure(text: str, format: str = "json") -> FiniteStructure:
    if format == "json":
        return loads_json(text)
    if format == "dsl":
        return loads_dsl(text)
    raise InputError(f"unknown structure format {format!r}")


def save_structure(s: FiniteStructure, format: str = "json") -> str:
    if format == "json":
        return dumps_json(s)
    if format == "dsl":
        return dumps_dsl(s)
    raise InputError(f"unknown structure format {format!r}")


def guess_format(path: str | Path) -> str:
    return "json" if str(path).endswith(".json") else "dsl"


def read_structure(path: str | Path, format: str | None = None) -> FiniteStructure:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return load_structure(text, format or guess_format(path))


def write_structure(s: FiniteStructure, path: str | Path, format: str | None = None) -> None:
    Path(path).write_text(save_structure(s, format or guess_format(path)), encoding="utf-8")
