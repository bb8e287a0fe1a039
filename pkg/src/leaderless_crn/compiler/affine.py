"""Leaderless fragment computing a diff-representation of one affine piece.

For piece ``i`` the fragment turns ``x(i')`` copies of each input alias
into inactive outputs ``YhatP^i_j`` and ``YhatC^i_j``, produced
monotonically, with ``#YhatP - #YhatC = y(j)`` once it quiesces:

(a) ``Xa^i_i' -> C^i_i'_1 + B^i_1 + ... + B^i_l + sum_j b_j YhatP^i_j``
(b) subtract ``c_i'``: merge ``C^i_i'_m + C^i_i'_p`` saturating at ``c_i'``,
    overflow released as ``X'^i_i'`` (``C^i_i'_1 -> X'^i_i'`` when ``c_i' = 0``)
(c) ``X'^i_i' -> Xs^i_i'_1 + ... + Xs^i_i'_l``
(d) ``Xs^i_i'_j -> n D{P,C}^i_j_1`` by the sign of ``n = n_i'j``
(e) divide by ``d_j``: merge ``D^i_j_m + D^i_j_p`` modulo ``d_j``, one
    ``Yhat`` per wrap (``D^i_j_1 -> Yhat`` when ``d_j = 1``)
(f) ``B^i_j + B^i_j -> B^i_j + b_j YhatC^i_j``

Every input alias carries the ``B``/``b_j`` payload, so the offset is
right whenever at least one input molecule is present.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..checker import DEFAULT_NODE_BUDGET, build_graph
from ..crn import Configuration, Crn, Reaction
from ..semilinear import AffinePiece

__all__ = [
    "AffineFragment",
    "NondeterministicOutputError",
    "compile_affine",
    "affine_gamma",
    "fragment_quiescent_output",
    "monotone_violations",
    "affine_names",
]


class NondeterministicOutputError(RuntimeError):
    pass


class affine_names:
    """Species names used by the fragment of piece ``i`` (1-based)."""

    @staticmethod
    def alias(i: int, ip: int) -> str:
        return f"Xa^{i}_{ip}"

    @staticmethod
    def c(i: int, ip: int, m: int) -> str:
        return f"C^{i}_{ip}_{m}"

    @staticmethod
    def xprime(i: int, ip: int) -> str:
        return f"X'^{i}_{ip}"

    @staticmethod
    def split(i: int, ip: int, j: int) -> str:
        return f"Xs^{i}_{ip}_{j}"

    @staticmethod
    def d(i: int, sign: str, j: int, m: int) -> str:
        return f"D{sign}^{i}_{j}_{m}"

    @staticmethod
    def b(i: int, j: int) -> str:
        return f"B^{i}_{j}"

    @staticmethod
    def yhat(i: int, sign: str, j: int) -> str:
        return f"Yhat{sign}^{i}_{j}"


@dataclass(frozen=True)
class AffineFragment:
    piece: AffinePiece
    index: int
    crn: Crn
    input_aliases: tuple[str, ...]
    output_p: tuple[str, ...]
    output_c: tuple[str, ...]
    gamma: int

    def initial(self, x: Sequence[int]) -> Configuration:
        return Configuration(zip(self.input_aliases, x))

    def diff(self, c: Mapping[str, int]) -> tuple[int, ...]:
        return tuple(c.get(p, 0) - c.get(q, 0) for p, q in zip(self.output_p, self.output_c))


def affine_gamma(p: AffinePiece) -> int:
    """Live-molecule bound per input molecule.

    ``1 + l + 2 * sum_j b_j + sum_j max_i |n_ij|``: the payload (``l`` B's
    and ``sum b_j`` YhatP), the YhatC each B can release, and the largest
    chain an input can feed (one C/X' or ``l`` split copies or the D's and
    Yhat's they turn into).
    """
    col_max = sum(max(abs(p.coeff[i][j]) for i in range(p.k)) for j in range(p.l))
    return 1 + p.l + 2 * sum(p.b) + col_max


def _pair(a: str, b: str) -> dict[str, int]:
    return {a: 2} if a == b else {a: 1, b: 1}


def compile_affine(p: AffinePiece, index: int) -> AffineFragment:
    n = affine_names
    i = index
    rxns: list[Reaction] = []
    yp = tuple(n.yhat(i, "P", j) for j in range(1, p.l + 1))
    yc = tuple(n.yhat(i, "C", j) for j in range(1, p.l + 1))
    aliases = tuple(n.alias(i, ip) for ip in range(1, p.k + 1))

    payload: dict[str, int] = {}
    for j in range(1, p.l + 1):
        bj = p.b[j - 1]
        if bj:
            payload[n.b(i, j)] = 1
            payload[yp[j - 1]] = bj

    for ip in range(1, p.k + 1):
        rxns.append(Reaction({aliases[ip - 1]: 1}, {n.c(i, ip, 1): 1, **payload}))

    for ip in range(1, p.k + 1):
        cap = p.c[ip - 1]
        if cap == 0:
            rxns.append(Reaction({n.c(i, ip, 1): 1}, {n.xprime(i, ip): 1}))
            continue
        for m in range(1, cap + 1):
            for q in range(m, cap + 1):
                lhs = _pair(n.c(i, ip, m), n.c(i, ip, q))
                if m + q <= cap:
                    rhs = {n.c(i, ip, m + q): 1}
                else:
                    rhs = {n.c(i, ip, cap): 1, n.xprime(i, ip): m + q - cap}
                rxns.append(Reaction(lhs, rhs))

    for ip in range(1, p.k + 1):
        rxns.append(Reaction({n.xprime(i, ip): 1},
                             {n.split(i, ip, j): 1 for j in range(1, p.l + 1)}))

    used_sign = {(j, s): False for j in range(1, p.l + 1) for s in "PC"}
    for ip in range(1, p.k + 1):
        for j in range(1, p.l + 1):
            coef = p.coeff[ip - 1][j - 1]
            if coef > 0:
                rhs = {n.d(i, "P", j, 1): coef}
                used_sign[j, "P"] = True
            elif coef < 0:
                rhs = {n.d(i, "C", j, 1): -coef}
                used_sign[j, "C"] = True
            else:
                rhs = {}
            rxns.append(Reaction({n.split(i, ip, j): 1}, rhs))

    for j in range(1, p.l + 1):
        dj = p.denom[j - 1]
        for sign in "PC":
            if not used_sign[j, sign]:
                continue
            out = n.yhat(i, sign, j)
            if dj == 1:
                rxns.append(Reaction({n.d(i, sign, j, 1): 1}, {out: 1}))
                continue
            for m in range(1, dj):
                for q in range(m, dj):
                    lhs = _pair(n.d(i, sign, j, m), n.d(i, sign, j, q))
                    if m + q <= dj - 1:
                        rhs = {n.d(i, sign, j, m + q): 1}
                    else:
                        rhs = {out: 1}
                        if m + q - dj:
                            rhs[n.d(i, sign, j, m + q - dj)] = 1
                    rxns.append(Reaction(lhs, rhs))

    for j in range(1, p.l + 1):
        bj = p.b[j - 1]
        if bj:
            rxns.append(Reaction({n.b(i, j): 2}, {n.b(i, j): 1, yc[j - 1]: bj}))

    crn = Crn(reactions=tuple(rxns), inputs=aliases, outputs=yp + yc)
    return AffineFragment(p, index, crn, aliases, yp, yc, affine_gamma(p))


def monotone_violations(crn: Crn, species: Iterable[str]) -> list[int]:
    """Indices of reactions with negative net stoichiometry on ``species``."""
    watch = set(species)
    return [
        ri for ri, r in enumerate(crn.reactions)
        if any(r.delta().get(sp, 0) < 0 for sp in watch)
    ]


def fragment_quiescent_output(
    fragment: AffineFragment,
    x: Sequence[int],
    node_budget: int = DEFAULT_NODE_BUDGET,
    kernel=None,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The unique quiescent ``(yP, yC)`` over all maximal executions.

    Computed by exhaustive exploration; raises
    :class:`NondeterministicOutputError` if executions can end differently
    or never end.
    """
    graph = build_graph(fragment.crn, fragment.initial(x), node_budget, kernel=kernel)
    if graph.capped:
        raise RuntimeError(f"node budget {node_budget} exhausted at x={tuple(x)}")
    if not graph.is_acyclic():
        raise NondeterministicOutputError(f"fragment has an infinite execution at x={tuple(x)}")
    idx = {sp: k for k, sp in enumerate(graph.species)}
    terminal = graph.configs[graph.terminal()]
    names = fragment.output_p + fragment.output_c
    picked = np.zeros((terminal.shape[0], len(names)), dtype=np.int64)
    for k, name in enumerate(names):
        if name in idx:
            picked[:, k] = terminal[:, idx[name]]
    rows = np.unique(picked, axis=0)
    if rows.shape[0] != 1:
        raise NondeterministicOutputError(
            f"{rows.shape[0]} distinct quiescent outputs at x={tuple(x)}"
        )
    l = len(fragment.output_p)
    return tuple(int(v) for v in rows[0, :l]), tuple(int(v) for v in rows[0, l:])
