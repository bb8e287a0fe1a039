import pytest
from hypothesis import given, settings, strategies as st

from leaderless_crn.checker import check_terminal_outputs
from leaderless_crn.compiler import compile_affine, fragment_quiescent_output, monotone_violations
from leaderless_crn.compiler.affine import affine_gamma, affine_names as n
from leaderless_crn.crn import Crn, parse_reaction
from leaderless_crn.semilinear import AffinePiece, eval_piece

INC = AffinePiece([[1]], [1], [1], [0])


def test_increment_reactions():
    frag = compile_affine(INC, 1)
    got = {str(r) for r in frag.crn.reactions}
    want = {
        "Xa^1_1 -> B^1_1 + C^1_1_1 + YhatP^1_1",
        "C^1_1_1 -> X'^1_1",
        "X'^1_1 -> Xs^1_1_1",
        "Xs^1_1_1 -> DP^1_1_1",
        "DP^1_1_1 -> YhatP^1_1",
        "2B^1_1 -> B^1_1 + YhatC^1_1",
    }
    assert got == want


@pytest.mark.parametrize("piece,x,expect", [
    (INC, (3,), ((6,), (2,))),
    (INC, (1,), ((2,), (0,))),
    (AffinePiece([[-1]], [1], [0], [0]), (2,), ((0,), (2,))),
    (AffinePiece([[1]], [2], [0], [0]), (4,), ((2,), (0,))),
    (AffinePiece([[1]], [1], [0], [0]), (5,), ((5,), (0,))),
])
def test_quiescent_output(piece, x, expect):
    assert fragment_quiescent_output(compile_affine(piece, 1), x) == expect


def test_division_never_emits_empty_remainder():
    frag = compile_affine(AffinePiece([[1]], [2], [0], [0]), 1)
    assert parse_reaction("2DP^1_1_1 -> YhatP^1_1") in frag.crn.reactions
    assert not any("DP^1_1_0" in r.species for r in frag.crn.reactions)


def test_offset_merge_table():
    frag = compile_affine(AffinePiece([[1]], [1], [0], [2]), 4)
    rx = {str(r) for r in frag.crn.reactions}
    assert "2C^4_1_1 -> C^4_1_2" in rx
    assert "C^4_1_1 + C^4_1_2 -> C^4_1_2 + X'^4_1" in rx
    assert "2C^4_1_2 -> C^4_1_2 + 2X'^4_1" in rx


@pytest.mark.parametrize("c", [1, 2, 3, 4])
@pytest.mark.parametrize("m", range(1, 7))
def test_offset_subnetwork_alone(c, m):
    frag = compile_affine(AffinePiece([[1]], [1], [0], [c]), 1)
    sub = Crn(tuple(r for r in frag.crn.reactions if any(s.startswith("C^") for s in r.reactants)))
    xp = n.xprime(1, 1)
    v = check_terminal_outputs(sub, {n.c(1, 1, 1): m}, lambda cfg: cfg.get(xp, 0) == max(0, m - c))
    assert v.certified, v.report()


def test_namespacing():
    a = compile_affine(AffinePiece([[1], [2]], [3], [1], [1, 0]), 1)
    b = compile_affine(AffinePiece([[1], [2]], [3], [1], [1, 0]), 2)
    assert not set(a.crn.species) & set(b.crn.species)


def test_gamma_formula():
    p = AffinePiece([[2, 0], [-3, 1]], [1, 2], [4, 0], [0, 1])
    assert affine_gamma(p) == 1 + 2 + 2 * 4 + (3 + 1)


pieces = st.integers(1, 2).flatmap(lambda k: st.integers(1, 2).flatmap(lambda l: st.builds(
    AffinePiece,
    st.lists(st.lists(st.integers(-2, 2), min_size=l, max_size=l), min_size=k, max_size=k),
    st.lists(st.integers(1, 3), min_size=l, max_size=l),
    st.lists(st.integers(0, 2), min_size=l, max_size=l),
    st.lists(st.integers(0, 2), min_size=k, max_size=k),
)))


@given(pieces)
def test_monotone_production(p):
    frag = compile_affine(p, 1)
    assert monotone_violations(frag.crn, frag.output_p + frag.output_c) == []


@settings(max_examples=40)
@given(pieces, st.data())
def test_diff_representation_random(p, data):
    frag = compile_affine(p, 1)
    x = tuple(data.draw(st.integers(p.c[i], p.c[i] + 3)) for i in range(p.k))
    if not any(x):
        return
    try:
        y = eval_piece(p, x)
    except Exception:
        return  # outside the domain: nothing is required
    yp, yc = fragment_quiescent_output(frag, x)
    assert tuple(a - b for a, b in zip(yp, yc)) == y
    assert all(v <= frag.gamma * (sum(x) + sum(y)) for v in yp)
