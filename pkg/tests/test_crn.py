import pytest
from hypothesis import given, strategies as st

from leaderless_crn.crn import (
    COUNT_LIMIT,
    Configuration,
    Crn,
    CrnError,
    CrnParseError,
    NotApplicableError,
    Reaction,
    applicable_reactions,
    apply_reaction,
    is_applicable,
    parse_crn,
    parse_reaction,
    serialize_crn,
)


def R(text):
    return parse_reaction(text)


class TestApplicability:
    def test_exact_match(self):
        assert is_applicable({"X": 1}, R("X -> 2Y"))

    def test_missing_reactant(self):
        assert not is_applicable({"X": 0, "Y": 3}, R("X + Y -> 0"))

    def test_self_pair_needs_two(self):
        assert not is_applicable({"A": 1}, R("2A -> A"))
        assert is_applicable({"A": 2}, R("A + A -> A"))


class TestApply:
    def test_seeding(self):
        assert apply_reaction({"X": 3}, R("X -> B + 2Y")) == {"X": 2, "B": 1, "Y": 2}

    def test_self_annihilation(self):
        assert apply_reaction({"A": 2}, R("A + A -> A")) == {"A": 1}

    def test_to_empty(self):
        out = apply_reaction({"Y": 1, "K": 1}, R("Y + K -> 0"))
        assert out == {} and len(out) == 0

    def test_value_semantics(self):
        c = Configuration({"X": 3})
        apply_reaction(c, R("X -> Y"))
        assert c == {"X": 3}

    def test_not_applicable(self):
        with pytest.raises(NotApplicableError):
            apply_reaction({"X": 0}, R("X -> Y"))


def test_applicable_reactions(intro):
    assert applicable_reactions({"X": 2}, intro) == [0]
    assert applicable_reactions({}, intro) == []
    assert applicable_reactions({"B": 2, "Y": 1, "K": 1}, intro) == [1, 2]


class TestConfiguration:
    def test_zero_entries_vanish(self):
        assert Configuration({"A": 0, "B": 2}) == Configuration({"B": 2})
        assert hash(Configuration({"A": 0, "B": 2})) == hash(Configuration({"B": 2}))

    def test_arithmetic(self):
        a, b = Configuration({"A": 1, "B": 2}), Configuration({"B": 1})
        assert a + b == {"A": 1, "B": 3}
        assert a - b == {"A": 1, "B": 1}
        assert 3 * b == {"B": 3}
        assert b <= a and not a <= b

    def test_negative_rejected(self):
        with pytest.raises(CrnError):
            Configuration({"A": 1}) - Configuration({"A": 2})

    def test_overflow_is_an_error(self):
        with pytest.raises(OverflowError):
            Configuration({"A": COUNT_LIMIT})


class TestParse:
    def test_reaction_forms(self):
        assert R("X -> B + 2Y") == Reaction({"X": 1}, {"B": 1, "Y": 2})
        assert R("Y + K -> 0") == Reaction({"Y": 1, "K": 1}, {})

    @pytest.mark.parametrize("text", ["3A -> B", "A + B + C -> D", "2A + B -> 0"])
    def test_termolecular_rejected(self, text):
        with pytest.raises(CrnParseError):
            R(text)

    def test_line_numbers(self):
        with pytest.raises(CrnParseError, match="line 3"):
            parse_crn("inputs: X\noutputs: Y\nX -> -> Y\n")

    def test_duplicate_species(self):
        with pytest.raises(CrnParseError, match="duplicate"):
            parse_crn("species: X, Y, X\ninputs: X\noutputs: Y\nX -> Y\n")

    def test_undeclared_species(self):
        with pytest.raises(CrnParseError, match="undeclared"):
            parse_crn("species: X, Y\ninputs: X\noutputs: Y\nX -> Z\n")

    def test_roles_partition(self):
        with pytest.raises(CrnParseError):
            parse_crn("inputs: X\noutputs: X\nX -> 2X\n")

    def test_canonical_serialization(self, intro):
        text = serialize_crn(intro)
        assert text.splitlines() == [
            "species: B, K, X, Y",
            "inputs: X",
            "outputs: Y",
            "X -> B + 2Y",
            "2B -> B + K",
            "K + Y -> 0",
        ]

    def test_comments_and_blank_lines(self, intro):
        noisy = "# header\n\ninputs: X   # in\noutputs: Y\nX->B+2Y\n 2 B -> B + K\nY + K -> 0 # annihilate\n"
        assert parse_crn(noisy) == Crn(intro.reactions, ("X",), ("Y",))

    def test_decider_round_trip(self):
        crn = parse_crn("inputs: A\nyesvoters: A, C\nA + B -> 2C\nA -> B\n")
        assert crn.is_decider and crn.yes_voters == {"A", "C"}
        assert parse_crn(serialize_crn(crn)) == crn


names = st.sampled_from(["A", "B", "C", "X1", "Y'", "K^2_1", "L1^3_4", "_t"])
sides = st.dictionaries(names, st.integers(1, 3), max_size=3)


@st.composite
def reactions(draw):
    a = draw(names)
    r = {a: 2} if draw(st.booleans()) else {a: 1}
    if r[a] == 1 and draw(st.booleans()):
        b = draw(names.filter(lambda s: s != a))
        r[b] = 1
    return Reaction(r, draw(sides))


@st.composite
def crns(draw):
    rx = tuple(draw(st.lists(reactions(), min_size=1, max_size=6)))
    pool = sorted(set().union(*(r.species for r in rx)))
    inputs = draw(st.lists(st.sampled_from(pool), unique=True, max_size=2))
    rest = [s for s in pool if s not in inputs]
    outputs = draw(st.lists(st.sampled_from(rest), unique=True, max_size=2)) if rest else []
    yes = draw(st.none() | st.frozensets(st.sampled_from(pool)))
    return Crn(rx, tuple(inputs), tuple(outputs), yes)


@given(crns())
def test_round_trip(crn):
    text = serialize_crn(crn)
    back = parse_crn(text)
    assert back == crn
    assert serialize_crn(back) == text


@given(crns(), st.data())
def test_apply_keeps_counts_nonnegative(crn, data):
    c = Configuration({sp: data.draw(st.integers(0, 3)) for sp in crn.species})
    for i in applicable_reactions(c, crn):
        nxt = apply_reaction(c, crn.reactions[i])
        assert all(v >= 0 for v in nxt.values())
        assert nxt - c.restrict([]) == c - crn.reactions[i].reactants + crn.reactions[i].products
