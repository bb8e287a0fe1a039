import itertools
import json

import pytest

from leaderless_crn import corpus
from leaderless_crn.checker import check_stable_computation
from leaderless_crn.compiler import SpecValidationError, audit_invariant, audit_violations, compile_spec
from leaderless_crn.compiler.top import ZeroInputWarning, activation_names as an
from leaderless_crn.crn import Configuration, apply_reaction
from leaderless_crn.kinetics import simulate
from leaderless_crn.semilinear import AffinePiece, SemilinearFunctionSpec, eval_function, parse_formula


def run(compiled, x, seed=0, **kw):
    return simulate(compiled.crn, compiled.initial(x), compiled.volume(x), seed=seed,
                    mass_bound=compiled.gamma, **kw)


@pytest.mark.parametrize("name,x,y", [
    ("increment", (3,), 4),
    ("max_2x1_minus_x2", (3, 2), 4),
    ("halve_or_increment", (5,), 6),
    ("halve_or_increment", (8,), 4),
])
def test_examples(compiled, name, x, y):
    for seed in range(3):
        tr = run(compiled[name], x, seed)
        assert tr.status == "quiescent" and tr.final["Y1"] == y


@pytest.mark.parametrize("x", [1, 2, 3])
def test_increment_certified(compiled, x):
    c = compiled["increment"]
    v = check_stable_computation(c.crn, c.initial((x,)), (x + 1,), mass_bound=c.gamma)
    assert v.certified, v.report()


@pytest.mark.slow
def test_increment_certified_at_four(compiled):
    c = compiled["increment"]
    assert check_stable_computation(c.crn, c.initial((4,)), (5,), mass_bound=c.gamma).certified


@pytest.mark.parametrize("name", corpus.CORPUS_SPECS)
def test_master_oracle_small_inputs(compiled, name):
    c = compiled[name]
    for x in itertools.product(range(13), repeat=c.k):
        if not 0 < sum(x) <= 12:
            continue
        tr = run(c, x, seed=sum(x))
        assert tr.status == "quiescent"
        assert tr.outputs() == eval_function(c.spec, x), x


def test_static_audit(compiled):
    for c in compiled.values():
        assert audit_violations(c) == []


def test_audit_detects_a_broken_reaction(compiled):
    from dataclasses import replace
    from leaderless_crn.crn import Crn, Reaction
    c = compiled["increment"]
    bad = Reaction({an.k(1): 1}, {})
    broken = replace(c, crn=Crn(c.crn.reactions + (bad,), c.crn.inputs, c.crn.outputs))
    assert audit_violations(broken) == [len(c.crn.reactions)]


def test_audit_examples(compiled):
    c = compiled["increment"]
    init = c.initial((3,))
    assert audit_invariant(init, c)
    pred, frag = c.predicates[0], c.fragments[0]
    voter = sorted(pred.yes_voters)[0]
    state = Configuration({voter: 1, frag.output_p[0]: 1})
    r7 = next(r for r in c.crn.reactions if r.reactants == {voter: 1, frag.output_p[0]: 1})
    after = apply_reaction(state, r7)
    assert after[an.global_output(1)] == after[an.active(1, "P", 1)] == 1
    assert audit_invariant(after, c)


@pytest.mark.parametrize("name,x", [("max_2x1_minus_x2", (6, 12)), ("halve_or_increment", (9,))])
def test_audit_along_trajectories(compiled, name, x):
    c = compiled[name]
    ks = [an.k(j) for j in range(1, c.l + 1)]
    for seed in range(20):
        tr = run(c, x, seed)
        for cfg in tr.configurations():
            assert audit_invariant(cfg, c)
            for j, k in enumerate(ks, start=1):
                y = cfg.get(an.global_output(j), 0)
                assert y >= cfg.get(k, 0)
                assert all(y >= cfg.get(an.m(i, j), 0) for i in range(1, len(c.fragments) + 1))


def test_roles_and_disjointness(compiled):
    c = compiled["max_2x1_minus_x2"]
    assert c.crn.outputs == ("Y1",) and c.crn.inputs == ("X1", "X2")
    assert set(c.roles) == set(c.crn.species)
    groups = {}
    for sp, role in c.roles.items():
        groups.setdefault(role, set()).add(sp)
    assert groups["output"] == {"Y1"}
    assert not set(c.fragments[0].crn.species) & set(c.fragments[1].crn.species)
    assert not set(c.predicates[0].crn.species) & set(c.predicates[1].crn.species)


def test_fan_out(compiled):
    c = compiled["max_2x1_minus_x2"]
    fan = [r for r in c.crn.reactions if r.reactants == {"X1": 1}]
    assert len(fan) == 1
    assert sum(fan[0].products.values()) == 4


def test_gamma_bounds_every_run(compiled):
    for c in compiled.values():
        for x in itertools.product(range(1, 8), repeat=c.k):
            tr = run(c, x, seed=1)
            peak = max((cfg.size() for cfg in tr.configurations()), default=0)
            assert peak <= c.gamma * sum(x)


def test_zero_output_warning():
    with pytest.warns(ZeroInputWarning):
        compile_spec(corpus.load_spec("increment"))


def test_validation_failure():
    spec = SemilinearFunctionSpec(1, 1, ((AffinePiece([[1]], [2], [0], [0]),
                                          parse_formula("(ge 1 0)")),))
    with pytest.raises(SpecValidationError) as err:
        compile_spec(spec)
    assert err.value.report.counterexample == (1,)


def test_expected_handles_zero(compiled):
    assert compiled["increment"].expected((0,)) == (0,)
    assert compiled["increment"].expected((2,)) == (3,)


def test_metadata(compiled):
    meta = json.loads(compiled["halve_or_increment"].metadata_json())
    assert meta["gamma"] == compiled["halve_or_increment"].gamma
    assert [p["gate"] for p in meta["pieces"]] == [
        "(mod 1 2 0)", "(and (ge 1 0) (not (mod 1 2 0)))"]
    assert set(meta["roles"]) == set(compiled["halve_or_increment"].crn.species)
