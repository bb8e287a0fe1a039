import pytest
from hypothesis import given, strategies as st

from leaderless_crn import corpus
from leaderless_crn.semilinear import (
    AffinePiece,
    And,
    CoverageError,
    DomainError,
    Mod,
    Not,
    Or,
    SemilinearFunctionSpec,
    SpecParseError,
    Threshold,
    eval_atom,
    eval_formula,
    eval_function,
    eval_piece,
    format_formula,
    parse_formula,
    parse_spec,
    serialize_spec,
    validate,
)

INC = AffinePiece([[1]], [1], [1], [0])
TWO_MINUS = AffinePiece([[2], [-1]], [1], [0], [0, 0])
THIRD = AffinePiece([[1]], [3], [0], [0])


def test_atoms():
    assert eval_atom(Threshold((1, -1), 0), (3, 2))
    assert not eval_atom(Mod((1,), 2, 0), (5,))
    assert not eval_atom(Threshold((1,), 1), (0,))


def test_formula_connectives():
    f = parse_formula("(and (ge 1 1) (not (ge 1 3)))")
    assert [eval_formula(f, (x,)) for x in range(5)] == [False, True, True, False, False]
    g = parse_formula("(or (mod 1 3 1) (ge 1 4))")
    assert [eval_formula(g, (x,)) for x in range(6)] == [False, True, False, False, True, True]


class TestPiece:
    def test_increment(self):
        assert eval_piece(INC, (4,)) == (5,)

    def test_positive_branch_of_max(self):
        assert eval_piece(TWO_MINUS, (3, 2)) == (4,)

    def test_exact_division(self):
        assert eval_piece(THIRD, (6,)) == (2,)

    @pytest.mark.parametrize("piece,x", [
        (THIRD, (4,)),                          # 3 does not divide 4
        (TWO_MINUS, (1, 5)),                    # negative output
        (AffinePiece([[1]], [1], [0], [2]), (1,)),  # below the offset
    ])
    def test_domain_errors(self, piece, x):
        with pytest.raises(DomainError):
            eval_piece(piece, x)


def test_function_precedence():
    mx = corpus.load_spec("max_2x1_minus_x2")
    assert eval_function(mx, (1, 5)) == (0,)
    assert eval_function(corpus.load_spec("increment"), (0,)) == (1,)
    both = SemilinearFunctionSpec(1, 1, (
        (AffinePiece([[0]], [1], [7], [0]), parse_formula("(ge 1 0)")),
        (INC, parse_formula("(ge 1 0)")),
    ))
    assert eval_function(both, (3,)) == (7,)


def test_coverage_error():
    gap = SemilinearFunctionSpec(1, 1, ((INC, parse_formula("(ge 1 1)")),))
    with pytest.raises(CoverageError):
        eval_function(gap, (0,))


class TestValidate:
    def test_corpus_passes(self):
        for name in corpus.CORPUS_SPECS:
            assert validate(corpus.load_spec(name), 10).ok

    def test_gap_found(self):
        gap = SemilinearFunctionSpec(1, 1, ((INC, parse_formula("(ge 1 1)")),))
        rep = validate(gap, 5)
        assert not rep.ok and rep.counterexample == (0,)

    def test_divisibility_found(self):
        half = SemilinearFunctionSpec(1, 1, ((AffinePiece([[1]], [2], [0], [0]),
                                              parse_formula("(ge 1 0)")),))
        assert validate(half, 5).counterexample == (1,)


class TestParseSpec:
    @pytest.mark.parametrize("piece,dom,k", [
        (INC, "(ge 1 0)", 1),
        (TWO_MINUS, "(ge 2 -1 0)", 2),
        (THIRD, "(mod 1 3 0)", 1),
    ])
    def test_round_trip(self, piece, dom, k):
        spec = SemilinearFunctionSpec(k, 1, ((piece, parse_formula(dom)),), name="t")
        text = serialize_spec(spec)
        assert parse_spec(text) == spec
        assert serialize_spec(parse_spec(text)) == text

    def test_syntax_error_has_line(self):
        with pytest.raises(SpecParseError, match="line 2"):
            parse_spec('{"arity_in": 1,\n "arity_out" 1}')

    def test_formula_error_has_location(self):
        text = '{"arity_in": 1, "arity_out": 1,\n"pieces": [{"coeff": [[1]], "denom": [1], "b": [0], "c": [0],\n"domain": "(ge 1)"}]}'
        with pytest.raises(SpecParseError, match="line 3"):
            parse_spec(text)

    def test_arity_mismatch(self):
        text = '{"arity_in": 2, "arity_out": 1, "pieces": [{"coeff": [[1]], "denom": [1], "b": [0], "c": [0], "domain": "(ge 1 0)"}]}'
        with pytest.raises(SpecParseError, match="arity"):
            parse_spec(text)

    def test_atom_arity_mismatch(self):
        text = '{"arity_in": 1, "arity_out": 1, "pieces": [{"coeff": [[1]], "denom": [1], "b": [0], "c": [0], "domain": "(ge 1 1 0)"}]}'
        with pytest.raises(SpecParseError, match="arity"):
            parse_spec(text)


coef = st.integers(-3, 3)


@st.composite
def formulas(draw, k, depth=2):
    if depth == 0 or draw(st.booleans()):
        a = tuple(draw(st.lists(coef, min_size=k, max_size=k)))
        if draw(st.booleans()):
            return Threshold(a, draw(st.integers(-5, 5)))
        m = draw(st.integers(2, 5))
        return Mod(a, m, draw(st.integers(0, m - 1)))
    op = draw(st.sampled_from(["and", "or", "not"]))
    if op == "not":
        return Not(draw(formulas(k, depth - 1)))
    args = tuple(draw(st.lists(formulas(k, depth - 1), min_size=1, max_size=3)))
    return And(args) if op == "and" else Or(args)


@given(st.integers(1, 3).flatmap(lambda k: st.tuples(st.just(k), formulas(k))), st.data())
def test_formula_text_round_trip(kf, data):
    k, f = kf
    assert parse_formula(format_formula(f)) == f
    x = tuple(data.draw(st.lists(st.integers(0, 9), min_size=k, max_size=k)))
    assert eval_formula(parse_formula(format_formula(f)), x) == eval_formula(f, x)


@given(st.integers(0, 30), st.integers(0, 30))
def test_single_domain_agrees_with_piece(x1, x2):
    mx = corpus.load_spec("max_2x1_minus_x2")
    expect = (max(0, 2 * x1 - x2),)
    assert eval_function(mx, (x1, x2)) == expect
    if 2 * x1 >= x2:
        assert eval_piece(mx.pieces[0][0], (x1, x2)) == expect
