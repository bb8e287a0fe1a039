"""Leaderless deciders for boolean combinations of threshold and mod atoms.

Every molecule is an agent whose species encodes a state
``(leader, values, vote)`` with one value component per atom:

* threshold ``sum a_i x_i >= t``: an integer in ``[-s, s]`` with
  ``s = |t| + sum |a_i| + 1``
* mod ``sum a_i x_i = r (mod m)``: a residue in ``[0, m)``

Input ``x_i'`` becomes a leader holding ``a_i'`` in every component. When
a leader meets another agent the pair's values are pooled into the leader
(threshold components saturate at ``+-s`` and the non-leader keeps the
overflow), the other agent becomes a non-leader and copies the leader's
new vote. Two non-leaders never interact. The pooled sum is conserved, so
once a single leader remains it ends holding either the exact total or a
saturated value on the correct side of every threshold, and the whole
population converges to its vote. All reactions are two agents in, two
agents out, so the number of voters equals the number of inputs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from ..crn import Configuration, Crn, Reaction
from ..semilinear import And, Formula, Mod, Not, Or, Threshold, atoms_of

__all__ = [
    "ThresholdSchema",
    "ModSchema",
    "AgentState",
    "PredicateCrd",
    "StateSpaceWarning",
    "compile_atom_threshold",
    "compile_atom_mod",
    "compile_predicate",
    "DEFAULT_SPECIES_BUDGET",
]

DEFAULT_SPECIES_BUDGET = 2000


class StateSpaceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ThresholdSchema:
    a: tuple[int, ...]
    t: int

    @property
    def bound(self) -> int:
        return abs(self.t) + sum(abs(v) for v in self.a) + 1

    def initial(self, ip: int) -> int:
        return self.a[ip]

    def combine(self, u: int, v: int) -> tuple[int, int]:
        s = self.bound
        w = u + v
        kept = max(-s, min(s, w))
        return kept, w - kept

    def vote(self, u: int) -> bool:
        return u >= self.t


@dataclass(frozen=True)
class ModSchema:
    a: tuple[int, ...]
    m: int
    r: int

    def initial(self, ip: int) -> int:
        return self.a[ip] % self.m

    def combine(self, u: int, v: int) -> tuple[int, int]:
        return (u + v) % self.m, 0

    def vote(self, u: int) -> bool:
        return u == self.r


Schema = Union[ThresholdSchema, ModSchema]


def compile_atom_threshold(a: Sequence[int], t: int, k: int) -> ThresholdSchema:
    if len(a) != k:
        raise ValueError(f"threshold atom has {len(a)} coefficients, expected {k}")
    return ThresholdSchema(tuple(a), t)


def compile_atom_mod(a: Sequence[int], m: int, r: int, k: int) -> ModSchema:
    if len(a) != k:
        raise ValueError(f"mod atom has {len(a)} coefficients, expected {k}")
    if m < 2:
        raise ValueError("modulus must be >= 2")
    return ModSchema(tuple(a), m, r % m)


@dataclass(frozen=True, order=True)
class AgentState:
    leader: bool
    values: tuple[int, ...]
    vote: bool


def _eval(f: Formula, atom_votes: Mapping[object, bool]) -> bool:
    if isinstance(f, (Threshold, Mod)):
        return atom_votes[f]
    if isinstance(f, And):
        return all(_eval(g, atom_votes) for g in f.args)
    if isinstance(f, Or):
        return any(_eval(g, atom_votes) for g in f.args)
    assert isinstance(f, Not)
    return not _eval(f.arg, atom_votes)


@dataclass(frozen=True)
class PredicateCrd:
    formula: Formula
    index: int
    crn: Crn
    input_aliases: tuple[str, ...]
    states: Mapping[str, AgentState]
    atoms: tuple[object, ...]

    @property
    def yes_voters(self) -> frozenset[str]:
        return self.crn.yes_voters or frozenset()

    @property
    def no_voters(self) -> frozenset[str]:
        return frozenset(self.crn.species) - self.yes_voters

    def initial(self, x: Sequence[int]) -> Configuration:
        counts: dict[str, int] = {}
        for alias, v in zip(self.input_aliases, x):
            counts[alias] = counts.get(alias, 0) + v
        return Configuration(counts)

    def describe(self, species: str) -> str:
        st = self.states[species]
        kind = "leader" if st.leader else "follower"
        return f"{kind} values={list(st.values)} vote={'yes' if st.vote else 'no'}"


def _schemas(atoms, k: int) -> list[Schema]:
    out: list[Schema] = []
    for atom in atoms:
        if isinstance(atom, Threshold):
            out.append(compile_atom_threshold(atom.a, atom.t, k))
        else:
            out.append(compile_atom_mod(atom.a, atom.m, atom.r, k))
    return out


def compile_predicate(
    formula: Formula,
    k: int,
    index: int,
    species_budget: Optional[int] = DEFAULT_SPECIES_BUDGET,
) -> PredicateCrd:
    """Decider for ``formula`` over ``k`` inputs, species tagged with ``index``.

    Species are named ``L1^i_n`` (yes voters) and ``L0^i_n`` (no voters).
    """
    atoms = atoms_of(formula)
    schemas = _schemas(atoms, k)

    def leader_vote(values) -> bool:
        return _eval(formula, {atom: sch.vote(v) for atom, sch, v in zip(atoms, schemas, values)})

    def interact(a: AgentState, b: AgentState) -> tuple[AgentState, AgentState]:
        kept, rest = [], []
        for sch, u, v in zip(schemas, a.values, b.values):
            w, r = sch.combine(u, v)
            kept.append(w)
            rest.append(r)
        vote = leader_vote(kept)
        return AgentState(True, tuple(kept), vote), AgentState(False, tuple(rest), vote)

    init_states = []
    for ip in range(k):
        values = tuple(sch.initial(ip) for sch in schemas)
        init_states.append(AgentState(True, values, leader_vote(values)))

    order: list[AgentState] = []
    seen: set[AgentState] = set()
    for st in init_states:
        if st not in seen:
            seen.add(st)
            order.append(st)
    transitions: list[tuple[AgentState, AgentState, AgentState, AgentState]] = []
    head = 0
    while head < len(order):
        a = order[head]
        for b in order[: head + 1]:
            if not (a.leader or b.leader):
                continue
            first, second = (a, b) if a.leader else (b, a)
            if b.leader and a.leader:
                first, second = max(a, b), min(a, b)
            p, q = interact(first, second)
            if sorted((p, q)) == sorted((a, b)):
                continue
            transitions.append((a, b, p, q))
            for st in (p, q):
                if st not in seen:
                    seen.add(st)
                    order.append(st)
            if species_budget is not None and len(order) > species_budget:
                warnings.warn(
                    f"predicate decider {index} exceeds {species_budget} species",
                    StateSpaceWarning,
                    stacklevel=2,
                )
                species_budget = None
        head += 1

    counters = {True: 0, False: 0}
    names: dict[AgentState, str] = {}
    for st in order:
        counters[st.vote] += 1
        names[st] = f"L{int(st.vote)}^{index}_{counters[st.vote]}"

    reactions = []
    for a, b, p, q in transitions:
        lhs: dict[str, int] = {}
        rhs: dict[str, int] = {}
        for st in (a, b):
            lhs[names[st]] = lhs.get(names[st], 0) + 1
        for st in (p, q):
            rhs[names[st]] = rhs.get(names[st], 0) + 1
        reactions.append(Reaction(lhs, rhs))

    aliases = tuple(names[st] for st in init_states)
    unique_inputs = tuple(dict.fromkeys(aliases))
    crn = Crn(
        reactions=tuple(reactions),
        inputs=unique_inputs,
        yes_voters=frozenset(names[st] for st in order if st.vote),
        species=tuple(names.values()),
    )
    return PredicateCrd(
        formula=formula,
        index=index,
        crn=crn,
        input_aliases=aliases,
        states={names[st]: st for st in order},
        atoms=tuple(atoms),
    )
