"""Core chemical reaction network model.

Species are plain strings. A :class:`Reaction` is a pair of multisets
with unit rate constant and at most two reactant molecules. A
:class:`Configuration` is an immutable multiset of species counts, and a
:class:`Crn` bundles species, reactions and the input/output/voter roles.

The ``.crn`` text format::

    # comment
    species: B, K, X, Y
    inputs: X
    outputs: Y
    yesvoters: A, B          (optional; marks a decider)
    X -> B + 2Y
    B + B -> B + K
    Y + K -> 0

Coefficients default to 1, ``0`` denotes the empty side, and ``A + A``
is the same as ``2A``. The ``species:`` header is optional on input; when
present every species used elsewhere must be declared in it.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Optional

__all__ = [
    "CrnError",
    "CrnParseError",
    "NotApplicableError",
    "Configuration",
    "Reaction",
    "Crn",
    "is_applicable",
    "apply_reaction",
    "applicable_reactions",
    "parse_crn",
    "serialize_crn",
    "parse_reaction",
]

SPECIES_RE = re.compile(r"[A-Za-z_^'][A-Za-z0-9_^']*")
_TERM_RE = re.compile(r"^(\d+)?\s*([A-Za-z_^'][A-Za-z0-9_^']*)$")

# Counts never exceed this; larger values mean a runaway network.
COUNT_LIMIT = 2**62


class CrnError(ValueError):
    pass


class CrnParseError(CrnError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotApplicableError(CrnError):
    pass


class Configuration(Mapping):
    """Immutable multiset of species counts; absent species have count 0."""

    __slots__ = ("_counts", "_hash")

    def __init__(self, counts: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        items = counts.items() if isinstance(counts, Mapping) else counts
        data: dict[str, int] = {}
        for sp, n in items:
            n = int(n)
            if n < 0:
                raise CrnError(f"negative count {n} for species {sp!r}")
            if n >= COUNT_LIMIT:
                raise OverflowError(f"count for {sp!r} exceeds {COUNT_LIMIT}")
            if n:
                data[sp] = data.get(sp, 0) + n
        self._counts = dict(sorted(data.items()))
        self._hash: Optional[int] = None

    def __getitem__(self, sp: str) -> int:
        return self._counts.get(sp, 0)

    def __contains__(self, sp: object) -> bool:
        return sp in self._counts

    def __iter__(self) -> Iterator[str]:
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._counts.items()))
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Configuration):
            return self._counts == other._counts
        if isinstance(other, Mapping):
            return self._counts == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v}" for k, v in self._counts.items())
        return "{" + body + "}"

    def __le__(self, other: Mapping[str, int]) -> bool:
        return all(n <= other.get(sp, 0) for sp, n in self._counts.items())

    def __add__(self, other: Mapping[str, int]) -> Configuration:
        out = dict(self._counts)
        for sp, n in other.items():
            out[sp] = out.get(sp, 0) + n
        return Configuration(out)

    def __sub__(self, other: Mapping[str, int]) -> Configuration:
        out = dict(self._counts)
        for sp, n in other.items():
            out[sp] = out.get(sp, 0) - n
        return Configuration(out)

    def __mul__(self, k: int) -> Configuration:
        return Configuration({sp: k * n for sp, n in self._counts.items()})

    __rmul__ = __mul__

    def size(self) -> int:
        """Total molecule count ``||c||_1``."""
        return sum(self._counts.values())

    def restrict(self, species: Iterable[str]) -> Configuration:
        keep = set(species)
        return Configuration({sp: n for sp, n in self._counts.items() if sp in keep})


def _multiset(terms: Mapping[str, int] | Iterable[str]) -> dict[str, int]:
    if isinstance(terms, Mapping):
        out = {sp: int(n) for sp, n in terms.items() if n}
    else:
        out = {}
        for sp in terms:
            out[sp] = out.get(sp, 0) + 1
    for sp, n in out.items():
        if n < 0:
            raise CrnError(f"negative stoichiometry for {sp!r}")
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class Reaction:
    """Unit-rate reaction with one or two reactant molecules."""

    reactants: Mapping[str, int]
    products: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        r = _multiset(self.reactants)
        p = _multiset(self.products)
        order = sum(r.values())
        if order not in (1, 2):
            raise CrnError(
                f"reactions must be uni- or bimolecular, got {order} reactant molecules"
            )
        object.__setattr__(self, "reactants", r)
        object.__setattr__(self, "products", p)

    def __hash__(self) -> int:
        return hash((tuple(self.reactants.items()), tuple(self.products.items())))

    @property
    def order(self) -> int:
        return sum(self.reactants.values())

    @property
    def species(self) -> set[str]:
        return set(self.reactants) | set(self.products)

    def delta(self) -> dict[str, int]:
        """Net stoichiometric change, zero entries dropped."""
        d = {sp: -n for sp, n in self.reactants.items()}
        for sp, n in self.products.items():
            d[sp] = d.get(sp, 0) + n
        return {sp: n for sp, n in sorted(d.items()) if n}

    def __str__(self) -> str:
        return f"{_format_side(self.reactants)} -> {_format_side(self.products)}"


def _format_side(side: Mapping[str, int]) -> str:
    if not side:
        return "0"
    return " + ".join(sp if n == 1 else f"{n}{sp}" for sp, n in side.items())


@dataclass(frozen=True)
class Crn:
    """A CRN with input, output and (for deciders) yes-voter roles."""

    reactions: tuple[Reaction, ...]
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()
    yes_voters: Optional[frozenset[str]] = None
    species: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "reactions", tuple(self.reactions))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if self.yes_voters is not None:
            object.__setattr__(self, "yes_voters", frozenset(self.yes_voters))
        used: set[str] = set(self.inputs) | set(self.outputs) | set(self.yes_voters or ())
        for r in self.reactions:
            used |= r.species
        if self.species:
            declared = list(self.species)
            if len(set(declared)) != len(declared):
                dup = sorted({s for s in declared if declared.count(s) > 1})
                raise CrnError(f"duplicate species: {', '.join(dup)}")
            missing = used - set(declared)
            if missing:
                raise CrnError(f"undeclared species: {', '.join(sorted(missing))}")
            names = set(declared)
        else:
            names = used
        for sp in names:
            if not SPECIES_RE.fullmatch(sp):
                raise CrnError(f"invalid species name {sp!r}")
        object.__setattr__(self, "species", tuple(sorted(names)))
        for group, label in ((self.inputs, "input"), (self.outputs, "output")):
            if len(set(group)) != len(group):
                raise CrnError(f"duplicate {label} species")
        overlap = set(self.inputs) & set(self.outputs)
        if overlap:
            raise CrnError(f"species both input and output: {', '.join(sorted(overlap))}")

    @property
    def is_decider(self) -> bool:
        return self.yes_voters is not None

    def role(self, sp: str) -> str:
        if sp in self.inputs:
            return "input"
        if sp in self.outputs:
            return "output"
        return "internal"

    def index(self) -> dict[str, int]:
        return {sp: i for i, sp in enumerate(self.species)}

    def initial(self, values: Iterable[int]) -> Configuration:
        """Leaderless initial configuration for an input vector."""
        values = list(values)
        if len(values) != len(self.inputs):
            raise CrnError(f"expected {len(self.inputs)} input values, got {len(values)}")
        return Configuration(zip(self.inputs, values))

    def output_vector(self, c: Mapping[str, int]) -> tuple[int, ...]:
        return tuple(c.get(y, 0) for y in self.outputs)

    def vote(self, c: Mapping[str, int]) -> Optional[bool]:
        """Consensus output: None when undefined (empty or mixed votes)."""
        if self.yes_voters is None:
            raise CrnError("CRN has no voter partition")
        yes = no = False
        for sp, n in c.items():
            if n:
                if sp in self.yes_voters:
                    yes = True
                else:
                    no = True
        if yes == no:
            return None
        return yes


def is_applicable(c: Mapping[str, int], r: Reaction) -> bool:
    return all(c.get(sp, 0) >= n for sp, n in r.reactants.items())


def apply_reaction(c: Mapping[str, int], r: Reaction) -> Configuration:
    if not is_applicable(c, r):
        raise NotApplicableError(f"{r} is not applicable to {dict(c)}")
    base = c if isinstance(c, Configuration) else Configuration(c)
    return base - r.reactants + r.products


def applicable_reactions(c: Mapping[str, int], crn: Crn) -> list[int]:
    return [i for i, r in enumerate(crn.reactions) if is_applicable(c, r)]


def _parse_side(text: str, line: Optional[int]) -> dict[str, int]:
    text = text.strip()
    if text in ("0", "∅"):
        return {}
    if not text:
        raise CrnParseError("empty reaction side (use 0)", line)
    out: dict[str, int] = {}
    for term in text.split("+"):
        term = term.strip()
        m = _TERM_RE.match(term)
        if not m:
            raise CrnParseError(f"malformed term {term!r}", line)
        coef = int(m.group(1)) if m.group(1) else 1
        if coef <= 0:
            raise CrnParseError(f"non-positive coefficient in {term!r}", line)
        out[m.group(2)] = out.get(m.group(2), 0) + coef
    return out


def parse_reaction(text: str, line: Optional[int] = None) -> Reaction:
    if text.count("->") != 1:
        raise CrnParseError(f"expected exactly one '->' in {text!r}", line)
    lhs, rhs = text.split("->")
    reactants = _parse_side(lhs, line)
    products = _parse_side(rhs, line)
    try:
        return Reaction(reactants, products)
    except CrnError as exc:
        raise CrnParseError(str(exc), line) from None


def _parse_names(value: str, line: int) -> list[str]:
    names = [s.strip() for s in value.split(",") if s.strip()]
    for s in names:
        if not SPECIES_RE.fullmatch(s):
            raise CrnParseError(f"invalid species name {s!r}", line)
    return names


_HEADERS = ("species", "inputs", "outputs", "yesvoters")


def parse_crn(text: str) -> Crn:
    headers: dict[str, list[str]] = {}
    reactions: list[Reaction] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line and ":" in line:
            key, _, value = line.partition(":")
            key = key.strip().lower()
            if key not in _HEADERS:
                raise CrnParseError(f"unknown header {key!r}", lineno)
            if key in headers:
                raise CrnParseError(f"repeated header {key!r}", lineno)
            names = _parse_names(value, lineno)
            if key == "species" and len(set(names)) != len(names):
                dup = sorted({s for s in names if names.count(s) > 1})
                raise CrnParseError(f"duplicate species: {', '.join(dup)}", lineno)
            headers[key] = names
            continue
        reactions.append(parse_reaction(line, lineno))
    try:
        return Crn(
            reactions=tuple(reactions),
            inputs=tuple(headers.get("inputs", ())),
            outputs=tuple(headers.get("outputs", ())),
            yes_voters=frozenset(headers["yesvoters"]) if "yesvoters" in headers else None,
            species=tuple(headers.get("species", ())),
        )
    except CrnError as exc:
        raise CrnParseError(str(exc)) from None


def serialize_crn(crn: Crn) -> str:
    lines = [
        f"species: {', '.join(crn.species)}",
        f"inputs: {', '.join(crn.inputs)}",
        f"outputs: {', '.join(crn.outputs)}",
    ]
    if crn.yes_voters is not None:
        lines.append(f"yesvoters: {', '.join(sorted(crn.yes_voters))}")
    lines.extend(str(r) for r in crn.reactions)
    return "\n".join(lines) + "\n"
