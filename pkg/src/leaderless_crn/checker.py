"""Exhaustive stable-computation and stable-decision checking.

The reachability graph from one initial configuration is explored
breadth-first. A node ``o`` is output-stable when every node reachable
from it has the same output (output counts for a computer, the defined
consensus vote for a decider). That holds exactly when ``o`` has a
defined output and cannot reach an edge whose endpoints disagree on the
output, so the stable set is the complement of one backward search from
all output-changing edges: O(V + E) in total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .crn import Configuration, Crn, CrnError
from .kernels import explore_kernel
from .kinetics import MassBoundError, NetworkArrays

__all__ = [
    "DEFAULT_NODE_BUDGET",
    "CappedGraphError",
    "ReachabilityGraph",
    "Verdict",
    "build_graph",
    "classify_output_stable",
    "output_stable_nodes",
    "check_stable_computation",
    "check_stable_decision",
    "check_terminal_outputs",
]

DEFAULT_NODE_BUDGET = 2_000_000


class CappedGraphError(RuntimeError):
    pass


@dataclass
class ReachabilityGraph:
    species: tuple[str, ...]
    configs: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    rxn: np.ndarray
    parent: np.ndarray
    parent_rx: np.ndarray
    capped: bool
    root: int = 0

    @property
    def n_nodes(self) -> int:
        return self.configs.shape[0]

    @property
    def n_edges(self) -> int:
        return self.src.shape[0]

    def config(self, node: int) -> Configuration:
        row = self.configs[node]
        return Configuration({sp: int(row[i]) for i, sp in enumerate(self.species)})

    def find(self, c: Mapping[str, int]) -> Optional[int]:
        idx = {sp: i for i, sp in enumerate(self.species)}
        target = np.zeros(len(self.species), dtype=np.int64)
        for sp, n in c.items():
            if n:
                if sp not in idx:
                    return None
                target[idx[sp]] = n
        hits = np.flatnonzero((self.configs == target).all(axis=1))
        return int(hits[0]) if hits.size else None

    def path_to(self, node: int) -> list[int]:
        """Reaction indices along the BFS tree from the root to ``node``."""
        out = []
        while node != self.root:
            out.append(int(self.parent_rx[node]))
            node = int(self.parent[node])
        return out[::-1]

    def terminal(self) -> np.ndarray:
        has_out = np.zeros(self.n_nodes, dtype=bool)
        moving = self.src != self.dst
        has_out[self.src[moving]] = True
        return ~has_out

    def is_acyclic(self) -> bool:
        if np.any(self.src == self.dst):
            return False
        adj = sparse.csr_matrix(
            (np.ones(self.n_edges, dtype=np.int8), (self.src, self.dst)),
            shape=(self.n_nodes, self.n_nodes),
        )
        n_comp, _ = connected_components(adj, directed=True, connection="strong")
        return n_comp == self.n_nodes


def build_graph(
    crn: Crn,
    init: Mapping[str, int],
    node_budget: int = DEFAULT_NODE_BUDGET,
    mass_bound: Optional[float] = None,
    kernel: Optional[str] = None,
) -> ReachabilityGraph:
    if node_budget < 1:
        raise ValueError("node budget must be positive")
    idx = crn.index()
    start = np.zeros(len(crn.species), dtype=np.int64)
    for sp, n in init.items():
        if n:
            if sp not in idx:
                raise CrnError(f"unknown species {sp!r} in initial configuration")
            start[idx[sp]] = n
    net = NetworkArrays.from_crn(crn)
    configs, parent, parent_rx, src, dst, rxn, capped = explore_kernel(kernel)(
        net, start, int(node_budget)
    )
    graph = ReachabilityGraph(
        species=crn.species, configs=configs, src=src, dst=dst, rxn=rxn,
        parent=parent, parent_rx=parent_rx, capped=bool(capped),
    )
    if mass_bound is not None:
        n0 = int(start.sum())
        cap = math.floor(mass_bound * n0 + 1e-9)
        sizes = configs.sum(axis=1, dtype=np.int64)
        worst = int(sizes.argmax())
        if sizes[worst] > cap:
            raise MassBoundError(
                f"reachable configuration {graph.config(worst)} has {sizes[worst]} "
                f"molecules, bound is {cap}"
            )
    return graph


def _output_labels(graph: ReachabilityGraph, crn: Crn, decision: bool) -> np.ndarray:
    """Integer output label per node; -1 marks an undefined vote."""
    idx = {sp: i for i, sp in enumerate(graph.species)}
    if decision:
        if crn.yes_voters is None:
            raise CrnError("stable decision needs a yes-voter partition")
        yes_cols = [idx[s] for s in crn.yes_voters if s in idx]
        no_cols = [i for s, i in idx.items() if s not in crn.yes_voters]
        yes = graph.configs[:, yes_cols].sum(axis=1, dtype=np.int64) if yes_cols else 0
        no = graph.configs[:, no_cols].sum(axis=1, dtype=np.int64) if no_cols else 0
        yes = np.broadcast_to(yes, (graph.n_nodes,))
        no = np.broadcast_to(no, (graph.n_nodes,))
        labels = np.full(graph.n_nodes, -1, dtype=np.int64)
        labels[(yes > 0) & (no == 0)] = 1
        labels[(no > 0) & (yes == 0)] = 0
        return labels
    cols = [idx[y] for y in crn.outputs]
    if not cols:
        return np.zeros(graph.n_nodes, dtype=np.int64)
    _, inverse = np.unique(graph.configs[:, cols], axis=0, return_inverse=True)
    return inverse.reshape(-1).astype(np.int64)


def _backward_closure(graph: ReachabilityGraph, seeds: np.ndarray) -> np.ndarray:
    """Nodes that can reach some seed (seeds included)."""
    n = graph.n_nodes
    reached = np.zeros(n, dtype=bool)
    if not seeds.any():
        return reached
    seed_ids = np.flatnonzero(seeds)
    rows = np.concatenate([graph.dst, np.full(seed_ids.size, n, dtype=np.int64)])
    cols = np.concatenate([graph.src, seed_ids])
    rev = sparse.csr_matrix(
        (np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(n + 1, n + 1)
    )
    order = breadth_first_order(rev, n, directed=True, return_predecessors=False)
    reached[order[order < n]] = True
    return reached


def classify_output_stable(
    graph: ReachabilityGraph, crn: Crn, decision: Optional[bool] = None
) -> np.ndarray:
    """Boolean mask of output-stable nodes."""
    if graph.capped:
        raise CappedGraphError("cannot classify stability on a capped graph")
    if decision is None:
        decision = crn.is_decider and not crn.outputs
    labels = _output_labels(graph, crn, decision)
    changing = labels[graph.src] != labels[graph.dst]
    seeds = np.zeros(graph.n_nodes, dtype=bool)
    seeds[graph.src[changing]] = True
    if decision:
        seeds |= labels < 0
    return ~_backward_closure(graph, seeds)


def output_stable_nodes(graph: ReachabilityGraph, crn: Crn, decision: Optional[bool] = None) -> set[int]:
    return set(np.flatnonzero(classify_output_stable(graph, crn, decision)).tolist())


@dataclass
class Verdict:
    kind: str  # certified | refuted | inconclusive
    reason: str = ""
    n_nodes: int = 0
    n_edges: int = 0
    witness: list[int] = field(default_factory=list)
    witness_config: Optional[Configuration] = None
    stable_outputs: list = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.kind == "certified"

    def report(self) -> str:
        lines = [
            f"verdict: {self.kind}",
            f"nodes: {self.n_nodes}",
            f"edges: {self.n_edges}",
        ]
        if self.reason:
            lines.append(f"reason: {self.reason}")
        if self.stable_outputs:
            lines.append("stable outputs: " + "; ".join(map(str, self.stable_outputs)))
        if self.kind == "refuted":
            lines.append("witness: " + (" ".join(map(str, self.witness)) or "(root)"))
            lines.append(f"witness configuration: {self.witness_config}")
        return "\n".join(lines) + "\n"


def _certify(graph: ReachabilityGraph, crn: Crn, decision: bool, correct_label) -> Verdict:
    base = dict(n_nodes=graph.n_nodes, n_edges=graph.n_edges)
    if graph.capped:
        return Verdict("inconclusive", "node budget exhausted", **base)
    stable = classify_output_stable(graph, crn, decision)
    labels = _output_labels(graph, crn, decision)
    correct = stable & correct_label(labels)
    stable_ids = np.flatnonzero(stable)
    if decision:
        seen = sorted({bool(v) for v in labels[stable_ids].tolist()})
    else:
        cols = [graph.species.index(y) for y in crn.outputs]
        seen = sorted({tuple(int(v) for v in row) for row in graph.configs[stable_ids][:, cols]})
    base["stable_outputs"] = seen
    wrong = np.flatnonzero(stable & ~correct)
    if wrong.size:
        node = int(wrong.min())
        return Verdict("refuted", "incorrect output-stable configuration is reachable",
                       witness=graph.path_to(node), witness_config=graph.config(node), **base)
    can_finish = _backward_closure(graph, correct)
    stuck = np.flatnonzero(~can_finish)
    if stuck.size:
        node = int(stuck.min())
        return Verdict("refuted", "reachable configuration cannot reach a correct output-stable one",
                       witness=graph.path_to(node), witness_config=graph.config(node), **base)
    return Verdict("certified", **base)


def check_stable_computation(
    crn: Crn,
    init: Mapping[str, int],
    expected: Sequence[int],
    node_budget: int = DEFAULT_NODE_BUDGET,
    mass_bound: Optional[float] = None,
    kernel: Optional[str] = None,
) -> Verdict:
    expected = tuple(int(v) for v in expected)
    if len(expected) != len(crn.outputs):
        raise ValueError(f"expected {len(crn.outputs)} output values, got {len(expected)}")
    graph = build_graph(crn, init, node_budget, mass_bound, kernel)
    idx = {sp: i for i, sp in enumerate(graph.species)}
    cols = [idx[y] for y in crn.outputs]
    want = np.asarray(expected, dtype=np.int64)
    matches = (graph.configs[:, cols].astype(np.int64) == want).all(axis=1)
    return _certify(graph, crn, False, lambda _labels: matches)


def check_stable_decision(
    crn: Crn,
    init: Mapping[str, int],
    expected: bool,
    node_budget: int = DEFAULT_NODE_BUDGET,
    kernel: Optional[str] = None,
) -> Verdict:
    if crn.yes_voters is None:
        raise CrnError("stable decision needs a yes-voter partition")
    if not any(n for n in init.values()):
        return Verdict("inconclusive", "undefined: consensus output of the empty configuration is undefined",
                       n_nodes=1)
    graph = build_graph(crn, init, node_budget, kernel=kernel)
    want = 1 if expected else 0
    return _certify(graph, crn, True, lambda labels: labels == want)


def check_terminal_outputs(
    crn: Crn,
    init: Mapping[str, int],
    accept: Callable[[Configuration], bool],
    node_budget: int = DEFAULT_NODE_BUDGET,
    kernel: Optional[str] = None,
) -> Verdict:
    """Certify a property of every maximal execution.

    Certified iff the reachable graph is finite and acyclic (so every
    execution is finite) and every terminal configuration satisfies
    ``accept``.
    """
    graph = build_graph(crn, init, node_budget, kernel=kernel)
    base = dict(n_nodes=graph.n_nodes, n_edges=graph.n_edges)
    if graph.capped:
        return Verdict("inconclusive", "node budget exhausted", **base)
    if not graph.is_acyclic():
        return Verdict("refuted", "reachability graph has a cycle (infinite execution)", **base)
    terminals = np.flatnonzero(graph.terminal())
    for node in terminals.tolist():
        c = graph.config(node)
        if not accept(c):
            return Verdict("refuted", "terminal configuration violates the property",
                           witness=graph.path_to(node), witness_config=c, **base)
    return Verdict("certified", f"{terminals.size} terminal configurations", **base)
