"""Semilinear functions given as ordered lists of affine partial pieces.

Each piece computes ``y(j) = b_j + (1/d_j) * sum_i n_ij * (x(i) - c_i)`` on a
domain written as a boolean formula over two kinds of atom:

* ``(ge a_1 ... a_k t)``    true iff ``sum a_i x_i >= t``
* ``(mod a_1 ... a_k m r)`` true iff ``sum a_i x_i = r (mod m)``

combined with ``(and f ...)``, ``(or f ...)`` and ``(not f)``. On an input
the first piece whose domain holds defines the value.

A ``.fnspec`` file is a JSON object::

    {
      "arity_in": 2,
      "arity_out": 1,
      "pieces": [
        {"coeff": [[2], [-1]], "denom": [1], "b": [0], "c": [0, 0],
         "domain": "(ge 2 -1 0)"},
        {"coeff": [[0], [0]], "denom": [1], "b": [0], "c": [0, 0],
         "domain": "(not (ge 2 -1 0))"}
      ]
    }

``coeff`` is the row-major k x l matrix, so ``coeff[i][j]`` is ``n_ij``.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

__all__ = [
    "SpecError",
    "SpecParseError",
    "DomainError",
    "CoverageError",
    "Threshold",
    "Mod",
    "And",
    "Or",
    "Not",
    "Formula",
    "AffinePiece",
    "SemilinearFunctionSpec",
    "ValidationReport",
    "eval_atom",
    "eval_formula",
    "eval_piece",
    "eval_function",
    "piece_index",
    "validate",
    "parse_formula",
    "format_formula",
    "parse_spec",
    "serialize_spec",
    "atoms_of",
]


class SpecError(ValueError):
    pass


class SpecParseError(SpecError):
    def __init__(self, message: str, line: Optional[int] = None, where: str = ""):
        self.line = line
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if where:
            prefix.append(where)
        super().__init__(f"{': '.join(prefix)}: {message}" if prefix else message)


class DomainError(SpecError):
    pass


class CoverageError(SpecError):
    pass


@dataclass(frozen=True)
class Threshold:
    a: tuple[int, ...]
    t: int

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(v) for v in self.a))


@dataclass(frozen=True)
class Mod:
    a: tuple[int, ...]
    m: int
    r: int

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(v) for v in self.a))
        if self.m < 2:
            raise SpecError(f"modulus must be >= 2, got {self.m}")
        if not 0 <= self.r < self.m:
            raise SpecError(f"residue {self.r} outside [0, {self.m})")


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Not:
    arg: "Formula"


Atom = Union[Threshold, Mod]
Formula = Union[Threshold, Mod, And, Or, Not]


def _dot(a: Sequence[int], x: Sequence[int]) -> int:
    if len(a) != len(x):
        raise SpecError(f"arity mismatch: atom has {len(a)} coefficients, input has {len(x)}")
    return sum(ai * xi for ai, xi in zip(a, x))


def eval_atom(atom: Atom, x: Sequence[int]) -> bool:
    if isinstance(atom, Threshold):
        return _dot(atom.a, x) >= atom.t
    return _dot(atom.a, x) % atom.m == atom.r


def eval_formula(f: Formula, x: Sequence[int]) -> bool:
    if isinstance(f, (Threshold, Mod)):
        return eval_atom(f, x)
    if isinstance(f, And):
        return all(eval_formula(g, x) for g in f.args)
    if isinstance(f, Or):
        return any(eval_formula(g, x) for g in f.args)
    return not eval_formula(f.arg, x)


def atoms_of(f: Formula) -> list[Atom]:
    """Distinct atoms of ``f`` in first-occurrence order."""
    out: list[Atom] = []

    def walk(g: Formula) -> None:
        if isinstance(g, (Threshold, Mod)):
            if g not in out:
                out.append(g)
        elif isinstance(g, Not):
            walk(g.arg)
        else:
            for h in g.args:
                walk(h)

    walk(f)
    return out


def _formula_arity(f: Formula) -> set[int]:
    return {len(a.a) for a in atoms_of(f)}


_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")


def parse_formula(text: str) -> Formula:
    tokens = _TOKEN_RE.findall(text)
    pos = 0

    def expect_int(tok: str) -> int:
        try:
            return int(tok)
        except ValueError:
            raise SpecParseError(f"expected integer, got {tok!r}") from None

    def parse() -> Formula:
        nonlocal pos
        if pos >= len(tokens):
            raise SpecParseError("unexpected end of formula")
        if tokens[pos] != "(":
            raise SpecParseError(f"expected '(' at token {pos}, got {tokens[pos]!r}")
        pos += 1
        if pos >= len(tokens):
            raise SpecParseError("unexpected end of formula")
        head = tokens[pos]
        pos += 1
        if head in ("ge", "mod"):
            nums = []
            while pos < len(tokens) and tokens[pos] not in ("(", ")"):
                nums.append(expect_int(tokens[pos]))
                pos += 1
            if pos >= len(tokens) or tokens[pos] != ")":
                raise SpecParseError(f"unterminated ({head} ...)")
            pos += 1
            if head == "ge":
                if len(nums) < 2:
                    raise SpecParseError("(ge a... t) needs at least one coefficient")
                return Threshold(tuple(nums[:-1]), nums[-1])
            if len(nums) < 3:
                raise SpecParseError("(mod a... m r) needs at least one coefficient")
            try:
                return Mod(tuple(nums[:-2]), nums[-2], nums[-1])
            except SpecError as exc:
                raise SpecParseError(str(exc)) from None
        if head in ("and", "or", "not"):
            args = []
            while pos < len(tokens) and tokens[pos] != ")":
                args.append(parse())
            if pos >= len(tokens):
                raise SpecParseError(f"unterminated ({head} ...)")
            pos += 1
            if head == "not":
                if len(args) != 1:
                    raise SpecParseError("(not f) takes exactly one argument")
                return Not(args[0])
            if not args:
                raise SpecParseError(f"({head}) needs at least one argument")
            return And(tuple(args)) if head == "and" else Or(tuple(args))
        raise SpecParseError(f"unknown operator {head!r}")

    f = parse()
    if pos != len(tokens):
        raise SpecParseError(f"trailing tokens after formula: {' '.join(tokens[pos:])}")
    return f


def format_formula(f: Formula) -> str:
    if isinstance(f, Threshold):
        return "(ge " + " ".join(map(str, (*f.a, f.t))) + ")"
    if isinstance(f, Mod):
        return "(mod " + " ".join(map(str, (*f.a, f.m, f.r))) + ")"
    if isinstance(f, Not):
        return f"(not {format_formula(f.arg)})"
    head = "and" if isinstance(f, And) else "or"
    return f"({head} " + " ".join(format_formula(g) for g in f.args) + ")"


@dataclass(frozen=True)
class AffinePiece:
    """``y(j) = b_j + (1/d_j) * sum_i coeff[i][j] * (x(i) - c_i)``."""

    coeff: tuple[tuple[int, ...], ...]
    denom: tuple[int, ...]
    b: tuple[int, ...]
    c: tuple[int, ...]

    def __post_init__(self):
        coeff = tuple(tuple(int(v) for v in row) for row in self.coeff)
        object.__setattr__(self, "coeff", coeff)
        for name in ("denom", "b", "c"):
            object.__setattr__(self, name, tuple(int(v) for v in getattr(self, name)))
        k, l = len(coeff), len(self.denom)
        if k == 0 or l == 0:
            raise SpecError("piece needs at least one input and one output")
        if any(len(row) != l for row in coeff):
            raise SpecError(f"coeff rows must have {l} entries (one per output)")
        if len(self.b) != l:
            raise SpecError(f"b must have {l} entries")
        if len(self.c) != k:
            raise SpecError(f"c must have {k} entries")
        if any(d < 1 for d in self.denom):
            raise SpecError("denominators must be >= 1")
        if any(v < 0 for v in self.b) or any(v < 0 for v in self.c):
            raise SpecError("offsets b and c must be nonnegative")

    @property
    def k(self) -> int:
        return len(self.coeff)

    @property
    def l(self) -> int:
        return len(self.denom)


@dataclass(frozen=True)
class SemilinearFunctionSpec:
    k: int
    l: int
    pieces: tuple[tuple[AffinePiece, Formula], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple((p, f) for p, f in self.pieces))
        if not self.pieces:
            raise SpecError("spec needs at least one piece")
        for idx, (p, f) in enumerate(self.pieces):
            if (p.k, p.l) != (self.k, self.l):
                raise SpecError(
                    f"piece {idx} has arity {p.k}->{p.l}, spec is {self.k}->{self.l}"
                )
            bad = _formula_arity(f) - {self.k}
            if bad:
                raise SpecError(f"piece {idx} domain has atoms of arity {sorted(bad)}")

    def gate(self, i: int) -> Formula:
        """Domain of piece ``i`` minus the domains of all earlier pieces."""
        own = self.pieces[i][1]
        earlier = [Not(self.pieces[q][1]) for q in range(i)]
        return And((own, *earlier)) if earlier else own


def eval_piece(p: AffinePiece, x: Sequence[int]) -> tuple[int, ...]:
    if len(x) != p.k:
        raise SpecError(f"arity mismatch: piece takes {p.k} inputs, got {len(x)}")
    shifted = [xi - ci for xi, ci in zip(x, p.c)]
    if any(v < 0 for v in shifted):
        raise DomainError(f"x={tuple(x)} below offset c={p.c}")
    y = []
    for j in range(p.l):
        num = sum(p.coeff[i][j] * shifted[i] for i in range(p.k))
        q, rem = divmod(num, p.denom[j])
        if rem:
            raise DomainError(f"output {j}: {p.denom[j]} does not divide {num} at x={tuple(x)}")
        yj = p.b[j] + q
        if yj < 0:
            raise DomainError(f"output {j} is negative ({yj}) at x={tuple(x)}")
        y.append(yj)
    return tuple(y)


def piece_index(spec: SemilinearFunctionSpec, x: Sequence[int]) -> int:
    for i, (_, dom) in enumerate(spec.pieces):
        if eval_formula(dom, x):
            return i
    raise CoverageError(f"no piece domain contains x={tuple(x)}")


def eval_function(spec: SemilinearFunctionSpec, x: Sequence[int]) -> tuple[int, ...]:
    return eval_piece(spec.pieces[piece_index(spec, x)][0], x)


@dataclass
class ValidationReport:
    bound: int
    checked: int = 0
    counterexample: Optional[tuple[int, ...]] = None
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.counterexample is None

    def __str__(self) -> str:
        if self.ok:
            return f"ok: {self.checked} inputs in [0, {self.bound}]^k"
        return f"fail at x={self.counterexample}: {self.reason}"


def _box(k: int, bound: int) -> Iterator[tuple[int, ...]]:
    # Ordered by total size so the reported counterexample is a smallest one.
    pts = itertools.product(range(bound + 1), repeat=k)
    return iter(sorted(pts, key=lambda x: (sum(x), x)))


def validate(spec: SemilinearFunctionSpec, bound: int) -> ValidationReport:
    if bound < 1:
        raise SpecError("validation bound must be >= 1")
    report = ValidationReport(bound)
    for x in _box(spec.k, bound):
        report.checked += 1
        try:
            eval_function(spec, x)
        except SpecError as exc:
            report.counterexample = x
            report.reason = str(exc)
            break
    return report


def _json_line(text: str, needle: str) -> Optional[int]:
    idx = text.find(needle)
    return text.count("\n", 0, idx) + 1 if idx >= 0 else None


def _int_list(value, where: str) -> list[int]:
    if not isinstance(value, list) or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in value
    ):
        raise SpecParseError("expected a list of integers", where=where)
    return value


def parse_spec(text: str) -> SemilinearFunctionSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise SpecParseError("top level must be an object", line=1)
    for key in ("arity_in", "arity_out", "pieces"):
        if key not in doc:
            raise SpecParseError(f"missing field {key!r}", line=1)
    k, l = doc["arity_in"], doc["arity_out"]
    if not isinstance(k, int) or not isinstance(l, int) or k < 1 or l < 1:
        raise SpecParseError("arities must be positive integers", line=_json_line(text, "arity"))
    if not isinstance(doc["pieces"], list) or not doc["pieces"]:
        raise SpecParseError("pieces must be a non-empty list", line=_json_line(text, '"pieces"'))
    pieces = []
    domain_seen = 0
    for idx, raw in enumerate(doc["pieces"]):
        where = f"pieces[{idx}]"
        if not isinstance(raw, dict):
            raise SpecParseError("piece must be an object", where=where)
        missing = [f for f in ("coeff", "denom", "b", "c", "domain") if f not in raw]
        if missing:
            raise SpecParseError(f"missing field(s) {', '.join(missing)}", where=where)
        coeff = raw["coeff"]
        if not isinstance(coeff, list):
            raise SpecParseError("coeff must be a list of rows", where=f"{where}.coeff")
        rows = [_int_list(row, f"{where}.coeff[{i}]") for i, row in enumerate(coeff)]
        denom = _int_list(raw["denom"], f"{where}.denom")
        b = _int_list(raw["b"], f"{where}.b")
        c = _int_list(raw["c"], f"{where}.c")
        if len(rows) != k or len(c) != k:
            raise SpecParseError(f"arity mismatch: expected {k} coefficient rows and offsets",
                                 where=where)
        if len(denom) != l or len(b) != l or any(len(row) != l for row in rows):
            raise SpecParseError(f"arity mismatch: expected {l} outputs", where=where)
        if not isinstance(raw["domain"], str):
            raise SpecParseError("domain must be a string", where=f"{where}.domain")
        line = None
        pos = text.find('"domain"', domain_seen)
        if pos >= 0:
            domain_seen = pos + 1
            line = text.count("\n", 0, pos) + 1
        try:
            dom = parse_formula(raw["domain"])
            piece = AffinePiece(rows, denom, b, c)
        except SpecParseError as exc:
            raise SpecParseError(str(exc), line=line, where=f"{where}.domain") from None
        except SpecError as exc:
            raise SpecParseError(str(exc), where=where) from None
        if _formula_arity(dom) - {k}:
            raise SpecParseError(f"arity mismatch: domain atoms must have {k} coefficients",
                                 line=line, where=f"{where}.domain")
        pieces.append((piece, dom))
    return SemilinearFunctionSpec(k, l, tuple(pieces), name=str(doc.get("name", "")))


def serialize_spec(spec: SemilinearFunctionSpec) -> str:
    doc: dict = {}
    if spec.name:
        doc["name"] = spec.name
    doc["arity_in"] = spec.k
    doc["arity_out"] = spec.l
    doc["pieces"] = [
        {
            "coeff": [list(row) for row in p.coeff],
            "denom": list(p.denom),
            "b": list(p.b),
            "c": list(p.c),
            "domain": format_formula(dom),
        }
        for p, dom in spec.pieces
    ]
    return json.dumps(doc, indent=2) + "\n"
