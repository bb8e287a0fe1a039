"""Full leaderless CRN for a semilinear function.

Each global input ``X<i'>`` fans out into one copy per predicate decider
and per affine fragment. Decider ``i`` decides whether piece ``i`` is the
first piece whose domain holds; its voters then switch the inactive
outputs of fragment ``i`` on or off. For every yes voter ``L1`` and no
voter ``L0`` of decider ``i`` and every output ``j``::

    L1 + YhatP^i_j -> L1 + YP^i_j + Y<j>
    L0 + YP^i_j    -> L0 + M^i_j
    M^i_j + Y<j>   -> YhatP^i_j
    L1 + YhatC^i_j -> L1 + YC^i_j
    L0 + YC^i_j    -> L0 + YhatC^i_j
    YP^i_j + YC^i_j -> K_j
    K_j + Y<j>     -> 0

These keep ``#Y<j> = #K_j + sum_i (#YP^i_j + #M^i_j)`` in every reachable
configuration.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .. import __version__
from ..crn import Configuration, Crn, Reaction
from ..semilinear import (
    SemilinearFunctionSpec,
    SpecError,
    eval_function,
    format_formula,
    validate,
)
from .affine import AffineFragment, compile_affine
from .predicate import DEFAULT_SPECIES_BUDGET, PredicateCrd, compile_predicate

__all__ = [
    "CompiledCrn",
    "SpecValidationError",
    "ZeroInputWarning",
    "compile_spec",
    "audit_invariant",
    "audit_violations",
    "activation_names",
]

DEFAULT_VALIDATION_BOUND = 10


class SpecValidationError(SpecError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"validation failed at x={report.counterexample}: {report.reason}")


class ZeroInputWarning(UserWarning):
    pass


class activation_names:
    @staticmethod
    def global_input(ip: int) -> str:
        return f"X{ip}"

    @staticmethod
    def global_output(j: int) -> str:
        return f"Y{j}"

    @staticmethod
    def active(i: int, sign: str, j: int) -> str:
        return f"Y{sign}^{i}_{j}"

    @staticmethod
    def m(i: int, j: int) -> str:
        return f"M^{i}_{j}"

    @staticmethod
    def k(j: int) -> str:
        return f"K_{j}"


@dataclass(frozen=True)
class CompiledCrn:
    crn: Crn
    spec: SemilinearFunctionSpec
    gamma: int
    roles: Mapping[str, str]
    predicates: tuple[PredicateCrd, ...]
    fragments: tuple[AffineFragment, ...]
    warnings: tuple[str, ...] = field(default=())

    @property
    def k(self) -> int:
        return self.spec.k

    @property
    def l(self) -> int:
        return self.spec.l

    def initial(self, x: Sequence[int]) -> Configuration:
        return self.crn.initial(x)

    def volume(self, x: Sequence[int]) -> float:
        """Finite-density volume ``gamma * ||x||``."""
        return float(self.gamma * max(1, sum(x)))

    def expected(self, x: Sequence[int]) -> tuple[int, ...]:
        if not any(x):
            return (0,) * self.l
        return eval_function(self.spec, x)

    def metadata(self) -> dict:
        return {
            "tool": f"leaderless_crn {__version__}",
            "name": self.spec.name,
            "arity_in": self.k,
            "arity_out": self.l,
            "gamma": self.gamma,
            "species": len(self.crn.species),
            "reactions": len(self.crn.reactions),
            "inputs": list(self.crn.inputs),
            "outputs": list(self.crn.outputs),
            "pieces": [
                {
                    "index": i + 1,
                    "gate": format_formula(self.spec.gate(i)),
                    "fragment_gamma": frag.gamma,
                    "yes_voters": sorted(pred.yes_voters),
                    "no_voters": sorted(pred.no_voters),
                    "agent_states": {sp: pred.describe(sp) for sp in sorted(pred.states)},
                }
                for i, (pred, frag) in enumerate(zip(self.predicates, self.fragments))
            ],
            "roles": dict(sorted(self.roles.items())),
            "warnings": list(self.warnings),
        }

    def metadata_json(self) -> str:
        return json.dumps(self.metadata(), indent=2) + "\n"


def _add(d: dict[str, int], sp: str, n: int = 1) -> None:
    d[sp] = d.get(sp, 0) + n


def compile_spec(
    spec: SemilinearFunctionSpec,
    validation_bound: int = DEFAULT_VALIDATION_BOUND,
    species_budget: Optional[int] = DEFAULT_SPECIES_BUDGET,
) -> CompiledCrn:
    report = validate(spec, validation_bound)
    if not report.ok:
        raise SpecValidationError(report)
    notes: list[str] = []
    zero = eval_function(spec, (0,) * spec.k)
    if any(zero):
        msg = (
            f"f(0) = {zero} is nonzero; a leaderless CRN cannot react from the empty "
            "configuration, so the compiled CRN outputs 0 there"
        )
        warnings.warn(msg, ZeroInputWarning, stacklevel=2)
        notes.append(msg)

    an = activation_names
    m = len(spec.pieces)
    predicates = tuple(
        compile_predicate(spec.gate(i), spec.k, i + 1, species_budget) for i in range(m)
    )
    fragments = tuple(compile_affine(p, i + 1) for i, (p, _) in enumerate(spec.pieces))

    roles: dict[str, str] = {}
    reactions: list[Reaction] = []
    inputs = tuple(an.global_input(ip) for ip in range(1, spec.k + 1))
    outputs = tuple(an.global_output(j) for j in range(1, spec.l + 1))
    for sp in inputs:
        roles[sp] = "input"
    for sp in outputs:
        roles[sp] = "output"

    for ip in range(spec.k):
        rhs: dict[str, int] = {}
        for pred in predicates:
            _add(rhs, pred.input_aliases[ip])
        for frag in fragments:
            _add(rhs, frag.input_aliases[ip])
        reactions.append(Reaction({inputs[ip]: 1}, rhs))

    for i, (pred, frag) in enumerate(zip(predicates, fragments), start=1):
        for sp in pred.crn.species:
            roles[sp] = f"predicate({i})"
        for sp in frag.crn.species:
            roles[sp] = f"affine({i})"
        reactions.extend(pred.crn.reactions)
        reactions.extend(frag.crn.reactions)

    for i, (pred, frag) in enumerate(zip(predicates, fragments), start=1):
        yes = sorted(pred.yes_voters)
        no = sorted(pred.no_voters)
        for j in range(1, spec.l + 1):
            yhat_p, yhat_c = frag.output_p[j - 1], frag.output_c[j - 1]
            yp, yc = an.active(i, "P", j), an.active(i, "C", j)
            mm, kk, y = an.m(i, j), an.k(j), outputs[j - 1]
            for sp in (yp, yc, mm):
                roles[sp] = f"activation({i},{j})"
            roles[kk] = f"activation(*,{j})"
            for l1 in yes:
                reactions.append(Reaction({l1: 1, yhat_p: 1}, {l1: 1, yp: 1, y: 1}))
            for l0 in no:
                reactions.append(Reaction({l0: 1, yp: 1}, {l0: 1, mm: 1}))
            reactions.append(Reaction({mm: 1, y: 1}, {yhat_p: 1}))
            for l1 in yes:
                reactions.append(Reaction({l1: 1, yhat_c: 1}, {l1: 1, yc: 1}))
            for l0 in no:
                reactions.append(Reaction({l0: 1, yc: 1}, {l0: 1, yhat_c: 1}))
            reactions.append(Reaction({yp: 1, yc: 1}, {kk: 1}))
    for j in range(1, spec.l + 1):
        reactions.append(Reaction({an.k(j): 1, outputs[j - 1]: 1}, {}))

    crn = Crn(reactions=tuple(reactions), inputs=inputs, outputs=outputs)
    gamma = m + sum(
        frag.gamma + sum(frag.piece.b)
        + sum(max(abs(r[j]) for r in frag.piece.coeff) for j in range(spec.l))
        for frag in fragments
    )
    return CompiledCrn(crn, spec, gamma, roles, predicates, fragments, tuple(notes))


def _audit_terms(compiled: CompiledCrn, j: int):
    an = activation_names
    plus = [an.global_output(j)]
    minus = [an.k(j)]
    for i in range(1, len(compiled.fragments) + 1):
        minus += [an.active(i, "P", j), an.m(i, j)]
    return plus, minus


def audit_invariant(c: Mapping[str, int], compiled: CompiledCrn) -> bool:
    """``#Y<j> == #K_j + sum_i (#YP^i_j + #M^i_j)`` for every output ``j``."""
    for j in range(1, compiled.l + 1):
        plus, minus = _audit_terms(compiled, j)
        if sum(c.get(s, 0) for s in plus) != sum(c.get(s, 0) for s in minus):
            return False
    return True


def audit_violations(compiled: CompiledCrn) -> list[int]:
    """Reactions whose net stoichiometry changes either side of the audit identity."""
    bad = []
    for ri, r in enumerate(compiled.crn.reactions):
        delta = r.delta()
        for j in range(1, compiled.l + 1):
            plus, minus = _audit_terms(compiled, j)
            if sum(delta.get(s, 0) for s in plus) != sum(delta.get(s, 0) for s in minus):
                bad.append(ri)
                break
    return bad
