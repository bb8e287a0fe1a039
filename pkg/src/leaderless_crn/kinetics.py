"""Stochastic kinetics: propensities, SSA steps and full trajectories.

All rate constants are 1. With volume ``v`` the propensity of ``X -> ...``
is ``#X``, of ``X + Y -> ...`` is ``#X #Y / v`` and of ``X + X -> ...`` is
``#X (#X - 1) / (2 v)``.

Randomness: every run draws from ``numpy.random.Generator(PCG64(ss))``.
A single run with seed ``s`` uses ``ss = SeedSequence(s)``; trial ``i`` of
a multi-trial invocation uses ``SeedSequence(s, spawn_key=(i,))``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

from .crn import Configuration, Crn, Reaction, apply_reaction
from .kernels import ssa_kernel

__all__ = [
    "QuiescentError",
    "MassBoundError",
    "NetworkArrays",
    "StopRule",
    "Trajectory",
    "propensity",
    "total_propensity",
    "ssa_step",
    "simulate",
    "stabilization_time",
    "make_rng",
    "trial_rng",
    "default_silence_window",
    "trajectory_csv",
]

_STATUS = ("quiescent", "horizon", "event_cap", "silent", "mass_bound")


class QuiescentError(RuntimeError):
    pass


class MassBoundError(RuntimeError):
    pass


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def trial_rng(seed: int, *index: int) -> np.random.Generator:
    """Independent stream for one trial: ``SeedSequence(seed, spawn_key=index)``."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(i) for i in index))
    return np.random.Generator(np.random.PCG64(ss))


def _kind(r: Reaction) -> int:
    if r.order == 1:
        return 1
    return 3 if len(r.reactants) == 1 else 2


def propensity(c: Mapping[str, int], r: Reaction, volume: float) -> float:
    kind = _kind(r)
    names = list(r.reactants)
    if kind == 1:
        return float(c.get(names[0], 0))
    if kind == 2:
        return (c.get(names[0], 0) * c.get(names[1], 0)) / volume
    n = c.get(names[0], 0)
    return 0.5 * (n * (n - 1)) / volume


def total_propensity(c: Mapping[str, int], crn: Crn, volume: float) -> float:
    total = 0.0
    for r in crn.reactions:
        total += propensity(c, r, volume)
    return total


def ssa_step(
    c: Mapping[str, int], crn: Crn, volume: float, rng: np.random.Generator
) -> tuple[float, int, Configuration]:
    """One Gillespie step: ``(dt, reaction index, next configuration)``."""
    props = [propensity(c, r, volume) for r in crn.reactions]
    a0 = 0.0
    for p in props:
        a0 += p
    if a0 <= 0.0:
        raise QuiescentError("no reaction is applicable")
    u1, u2 = rng.random(2)
    dt = -math.log(1.0 - u1) / a0
    target = u2 * a0
    acc = 0.0
    chosen = -1
    for i, p in enumerate(props):
        if p > 0.0:
            chosen = i
            acc += p
            if acc > target:
                break
    return dt, chosen, apply_reaction(c, crn.reactions[chosen])


@dataclass(frozen=True)
class NetworkArrays:
    """Flat integer encoding of a CRN consumed by the SSA kernels."""

    kind: np.ndarray
    reactant_a: np.ndarray
    reactant_b: np.ndarray
    delta_ptr: np.ndarray
    delta_species: np.ndarray
    delta_value: np.ndarray
    dep_ptr: np.ndarray
    dep_reactions: np.ndarray
    output_change: np.ndarray
    voter: np.ndarray
    mass_delta: np.ndarray

    @classmethod
    def from_crn(cls, crn: Crn) -> NetworkArrays:
        idx = crn.index()
        n_sp = len(crn.species)
        kind, ra, rb = [], [], []
        d_ptr, d_sp, d_val = [0], [], []
        deps: list[list[int]] = [[] for _ in range(n_sp)]
        out_change, mass = [], []
        outputs = {idx[y] for y in crn.outputs}
        for ri, r in enumerate(crn.reactions):
            names = list(r.reactants)
            kind.append(_kind(r))
            ra.append(idx[names[0]])
            rb.append(idx[names[1]] if len(names) > 1 else -1)
            for sp in names:
                deps[idx[sp]].append(ri)
            delta = r.delta()
            for sp, dv in delta.items():
                d_sp.append(idx[sp])
                d_val.append(dv)
            d_ptr.append(len(d_sp))
            out_change.append(int(any(idx[sp] in outputs for sp in delta)))
            mass.append(sum(delta.values()))
        dep_ptr = [0]
        dep_rx: list[int] = []
        for lst in deps:
            dep_rx.extend(lst)
            dep_ptr.append(len(dep_rx))
        if crn.yes_voters is None:
            voter = [-1] * n_sp
        else:
            voter = [1 if sp in crn.yes_voters else 0 for sp in crn.species]
        i64 = np.int64
        return cls(
            kind=np.asarray(kind, dtype=np.int8),
            reactant_a=np.asarray(ra, dtype=i64),
            reactant_b=np.asarray(rb, dtype=i64),
            delta_ptr=np.asarray(d_ptr, dtype=i64),
            delta_species=np.asarray(d_sp, dtype=i64),
            delta_value=np.asarray(d_val, dtype=i64),
            dep_ptr=np.asarray(dep_ptr, dtype=i64),
            dep_reactions=np.asarray(dep_rx, dtype=i64),
            output_change=np.asarray(out_change, dtype=np.uint8),
            voter=np.asarray(voter, dtype=np.int8),
            mass_delta=np.asarray(mass, dtype=i64),
        )


@dataclass(frozen=True)
class StopRule:
    """When to end a run. Quiescence always ends it.

    ``silence`` is the output-silence window W: stop after W consecutive
    events that change no output count and do not change the vote status.
    """

    horizon: float = math.inf
    max_events: int = 50_000_000
    silence: Optional[int] = None

    @classmethod
    def parse(cls, text: str, n_molecules: int = 0) -> StopRule:
        """Parse ``quiescence``, ``horizon=T``, ``events=N``, ``silence[=W]``.

        Several rules may be joined with commas.
        """
        kw: dict = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            key, _, value = part.partition("=")
            key = key.strip().lower()
            if key == "quiescence":
                continue
            if key == "horizon":
                kw["horizon"] = float(value)
                if not kw["horizon"] > 0:
                    raise ValueError("horizon must be positive")
            elif key in ("events", "event-cap", "cap"):
                kw["max_events"] = int(value)
                if kw["max_events"] <= 0:
                    raise ValueError("event cap must be positive")
            elif key == "silence":
                kw["silence"] = int(value) if value else default_silence_window(n_molecules)
                if kw["silence"] <= 0:
                    raise ValueError("silence window must be positive")
            else:
                raise ValueError(f"unknown stop rule {part!r}")
        return cls(**kw)

    def describe(self) -> str:
        parts = ["quiescence"]
        if math.isfinite(self.horizon):
            parts.append(f"horizon={self.horizon:g}")
        parts.append(f"events={self.max_events}")
        if self.silence:
            parts.append(f"silence={self.silence}")
        return ",".join(parts)


def default_silence_window(n_molecules: int) -> int:
    return 50 * max(1, n_molecules)


@dataclass
class Trajectory:
    crn: Crn
    initial: Configuration
    volume: float
    seed: Optional[int]
    status: str
    final: Configuration
    time: float
    n_events: int
    last_change: float
    times: list[float] = field(default_factory=list)
    reactions: list[int] = field(default_factory=list)

    @property
    def recorded(self) -> bool:
        return len(self.times) == self.n_events

    def configurations(self) -> Iterator[Configuration]:
        """Replay configurations after each recorded event."""
        if not self.recorded:
            raise ValueError("trajectory events were not recorded")
        c = self.initial
        for ri in self.reactions:
            c = apply_reaction(c, self.crn.reactions[ri])
            yield c

    def count_matrix(self) -> np.ndarray:
        """Species counts after each event, one row per event."""
        if not self.recorded:
            raise ValueError("trajectory events were not recorded")
        idx = self.crn.index()
        deltas = np.zeros((len(self.crn.reactions), len(self.crn.species)), dtype=np.int64)
        for ri, r in enumerate(self.crn.reactions):
            for sp, dv in r.delta().items():
                deltas[ri, idx[sp]] = dv
        start = np.zeros(len(self.crn.species), dtype=np.int64)
        for sp, n in self.initial.items():
            start[idx[sp]] = n
        if not self.reactions:
            return np.zeros((0, len(self.crn.species)), dtype=np.int64)
        return start + np.cumsum(deltas[np.asarray(self.reactions)], axis=0)

    def outputs(self) -> tuple[int, ...]:
        return self.crn.output_vector(self.final)


def simulate(
    crn: Crn,
    init: Mapping[str, int],
    volume: float,
    stop: StopRule = StopRule(),
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    record: bool = True,
    mass_bound: Optional[float] = None,
    kernel: Optional[str] = None,
    network: Optional[NetworkArrays] = None,
) -> Trajectory:
    """Run the SSA from ``init`` until ``stop`` fires or the CRN quiesces.

    ``mass_bound`` is the factor gamma: every visited configuration must
    hold at most ``gamma * |init|`` molecules, otherwise
    :class:`MassBoundError` is raised.
    """
    if not volume > 0:
        raise ValueError("volume must be positive")
    init = init if isinstance(init, Configuration) else Configuration(init)
    unknown = set(init) - set(crn.species)
    if unknown:
        raise ValueError(f"initial configuration uses unknown species {sorted(unknown)}")
    if rng is None:
        if seed is None:
            raise ValueError("either seed or rng is required")
        rng = make_rng(seed)
    net = network if network is not None else NetworkArrays.from_crn(crn)
    idx = crn.index()
    counts = np.zeros(len(crn.species), dtype=np.int64)
    for sp, n in init.items():
        counts[idx[sp]] = n
    n0 = init.size()
    cap = -1 if mass_bound is None else int(math.floor(mass_bound * n0 + 1e-9))
    if cap >= 0 and n0 > cap:
        raise MassBoundError(f"initial size {n0} already exceeds bound {cap}")
    run = ssa_kernel(kernel)
    status, events, t, last, times, rxns = run(
        net, counts, float(volume), rng, float(stop.horizon), int(stop.max_events),
        int(stop.silence or 0), cap, bool(record),
    )
    final = Configuration({sp: int(counts[i]) for i, sp in enumerate(crn.species)})
    if _STATUS[status] == "mass_bound":
        raise MassBoundError(
            f"configuration with {final.size()} molecules exceeds bound {cap} "
            f"(gamma={mass_bound}, n={n0}) after {events} events"
        )
    return Trajectory(
        crn=crn, initial=init, volume=float(volume), seed=seed, status=_STATUS[status],
        final=final, time=t, n_events=events, last_change=last,
        times=list(times), reactions=list(rxns),
    )


def stabilization_time(traj: Trajectory, crn: Optional[Crn] = None) -> float:
    """Time of the last event that changed an output count or the vote status."""
    crn = crn or traj.crn
    if traj.n_events == 0:
        return 0.0
    if not traj.recorded:
        return traj.last_change
    outputs = set(crn.outputs)
    changes = [any(sp in outputs for sp in r.delta()) for r in crn.reactions]
    last = 0.0
    if crn.yes_voters is None:
        for t, ri in zip(traj.times, traj.reactions):
            if changes[ri]:
                last = t
        return last
    status = crn.vote(traj.initial)
    for t, ri, c in zip(traj.times, traj.reactions, traj.configurations()):
        new = crn.vote(c)
        if changes[ri] or new != status:
            last = t
        status = new
    return last


def trajectory_csv(traj: Trajectory, mode: str = "full", header: Sequence[str] = ()) -> str:
    """Render a trajectory as CSV.

    ``full``: ``time,reaction,<species...>`` with counts after each event
    (row with reaction ``-1`` at time 0 holds the initial counts).
    ``sparse``: ``time,reaction,species,delta`` per changed species.
    ``final``: a single row with the final counts.
    Lines in ``header`` are emitted first as ``# `` comments.
    """
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    species = list(traj.crn.species)
    if mode == "full":
        w.writerow(["time", "reaction", *species])
        w.writerow([repr(0.0), -1, *(traj.initial[s] for s in species)])
        for t, ri, row in zip(traj.times, traj.reactions, traj.count_matrix()):
            w.writerow([repr(t), ri, *row.tolist()])
    elif mode == "sparse":
        w.writerow(["time", "reaction", "species", "delta"])
        deltas = [r.delta() for r in traj.crn.reactions]
        for t, ri in zip(traj.times, traj.reactions):
            for sp, dv in deltas[ri].items():
                w.writerow([repr(t), ri, sp, dv])
    elif mode == "final":
        w.writerow(["time", "reaction", *species])
        w.writerow([repr(traj.time), -1, *(traj.final[s] for s in species)])
    else:
        raise ValueError(f"unknown record mode {mode!r}")
    return buf.getvalue()
