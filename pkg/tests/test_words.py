"""Free-word algebra and presentation-format tests."""

import pytest
from hypothesis import given, settings, strategies as st

from gradientlab.errors import DomainError, ParseError
from gradientlab.parsing import format_presentation, parse_presentation, parse_word_text
from gradientlab.words import (
    GroupPresentation,
    GeneratorSymbol,
    SubgroupSpec,
    free_reduce,
    invert,
    multiply,
    presentation,
    word,
)

AB = ("a", "b")
ABC = ("a", "b", "c")


def naive_reduce(letters):
    """Oracle: repeatedly delete the first cancelling pair until none remain."""
    out = list(letters)
    changed = True
    while changed:
        changed = False
        for i in range(len(out) - 1):
            if out[i] == -out[i + 1]:
                del out[i : i + 2]
                changed = True
                break
    return tuple(out)


letters_st = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=32)


class TestFreeReduce:
    def test_cancellation(self):
        assert free_reduce([1, -1], AB).letters == ()

    def test_inner_cancellation(self):
        assert free_reduce([1, 2, -2, 1], AB).letters == (1, 1)

    def test_identity_case(self):
        w = free_reduce([1, 2, 1], AB)
        assert free_reduce(w.letters, AB) == w

    @given(letters_st)
    def test_idempotent(self, letters):
        once = free_reduce(letters, AB)
        assert free_reduce(once.letters, AB) == once

    @given(letters_st)
    def test_matches_naive_oracle(self, letters):
        assert free_reduce(letters, AB).letters == naive_reduce(letters)

    @given(letters_st)
    def test_no_adjacent_cancelling_pair(self, letters):
        w = free_reduce(letters, AB)
        assert all(x != -y for x, y in zip(w.letters, w.letters[1:]))


class TestProductAndInverse:
    def test_multiply_cancels(self):
        a = word([1], AB)
        assert multiply(a, invert(a)).is_identity()

    def test_invert_reverses(self):
        ab = word([1, 2], AB)
        assert invert(ab).letters == (-2, -1)

    def test_concatenate_then_scan(self):
        # derived example: (a b)(b^-1 c) = a c, checked against the oracle
        u = word([1, 2], ABC)
        v = word([-2, 3], ABC)
        assert multiply(u, v).letters == naive_reduce(u.letters + v.letters) == (1, 3)

    def test_mixed_alphabets_rejected(self):
        with pytest.raises(DomainError):
            multiply(word([1], AB), word([1], ABC))

    @given(letters_st, letters_st)
    def test_length_bound(self, xs, ys):
        u, v = word(xs, AB), word(ys, AB)
        assert len(multiply(u, v)) <= len(u) + len(v)

    @given(letters_st, letters_st, letters_st)
    def test_associative(self, xs, ys, zs):
        u, v, w = word(xs, AB), word(ys, AB), word(zs, AB)
        assert multiply(multiply(u, v), w) == multiply(u, multiply(v, w))

    @given(letters_st)
    def test_double_inverse(self, xs):
        u = word(xs, AB)
        assert invert(invert(u)) == u


class TestPresentations:
    def test_cyclic_of_order_two(self):
        p = parse_presentation("gens: a\nrels: a^2")
        assert p.alphabet == ("a",)
        assert [r.letters for r in p.relators] == [(1, 1)]

    def test_free_group(self):
        p = parse_presentation("gens: a,b\nrels:")
        assert p.alphabet == ("a", "b")
        assert p.relators == ()

    def test_free_product_round_trip(self):
        p = parse_presentation("gens: a,b\nrels: a^2, b^3")
        assert parse_presentation(format_presentation(p)) == p

    def test_relators_cyclically_reduced(self):
        p = presentation(["a", "b"], [[2, 1, 1, -2]])
        assert p.relators[0].letters == (1, 1)

    def test_duplicate_relators_dropped(self):
        p = presentation(["a"], [[1, 1], [1, 1]])
        assert len(p.relators) == 1

    def test_duplicate_generator_rejected(self):
        with pytest.raises(ParseError):
            parse_presentation("gens: a,a\nrels:")

    def test_undeclared_generator_positioned(self):
        with pytest.raises(ParseError) as err:
            parse_presentation("gens: a\nrels: a^2, c")
        assert err.value.line == 2
        assert err.value.column > 1

    def test_syntax_error_positioned(self):
        with pytest.raises(ParseError) as err:
            parse_presentation("gens: a\nrels: a^x")
        assert err.value.line == 2

    def test_comments_and_whitespace(self):
        p = parse_presentation("# c\ngens: a, b  # trailing\n\nrels: a b^-1 a\n")
        assert p.relators[0].letters == (1, -2, 1)

    def test_generator_cap(self):
        names = [f"g{i}" for i in range(4097)]
        with pytest.raises(DomainError):
            presentation(names, [])

    def test_word_powers(self):
        w = parse_word_text("a^-2*b^3", AB, 1, 1)
        assert w.letters == (-1, -1, 2, 2, 2)

    def test_subgroup_spec_empty_is_trivial(self):
        spec = SubgroupSpec()
        assert len(spec) == 0

    def test_generator_symbol_name_validation(self):
        with pytest.raises(DomainError):
            GeneratorSymbol(0, "1bad")


names_st = st.lists(
    st.from_regex(r"[a-z][a-z0-9_]{0,3}", fullmatch=True), min_size=1, max_size=4, unique=True
)


@st.composite
def presentations(draw):
    names = draw(names_st)
    n = len(names)
    rels = draw(
        st.lists(
            st.lists(
                st.integers(min_value=1, max_value=n).flatmap(
                    lambda i: st.sampled_from([i, -i])
                ),
                min_size=1,
                max_size=8,
            ),
            max_size=4,
        )
    )
    return presentation(names, rels)


@settings(max_examples=60)
@given(presentations())
def test_parse_print_round_trip(p: GroupPresentation):
    assert parse_presentation(format_presentation(p)) == GroupPresentation(
        p.generators, p.relators, ""
    )
