"""Relation matrices, Smith normal form, and mod-p rank tests."""

import itertools
import math
import random

from hypothesis import given, settings, strategies as st

from gradientlab.abelian import (
    abelian_data,
    matrix_from_json,
    matrix_to_json,
    rank_mod_p,
    relation_matrix,
    smith_normal_form,
)
from gradientlab.words import presentation

PRIMES_TO_97 = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
                67, 71, 73, 79, 83, 89, 97]


def gcd_of_minors(m, k):
    """Oracle: gcd over all k x k minors, by brute-force expansion."""
    rows = len(m)
    cols = len(m[0]) if rows else 0

    def det(sub):
        if len(sub) == 1:
            return sub[0][0]
        total = 0
        for j in range(len(sub)):
            minor = [row[:j] + row[j + 1 :] for row in sub[1:]]
            total += (-1) ** j * sub[0][j] * det(minor)
        return total

    g = 0
    for ri in itertools.combinations(range(rows), k):
        for ci in itertools.combinations(range(cols), k):
            sub = [[m[i][j] for j in ci] for i in ri]
            g = math.gcd(g, det(sub))
    return g


def snf_oracle(m):
    """Invariant factors via the gcd-of-minors identity d_k = g_k / g_{k-1}."""
    size = min(len(m), len(m[0]) if m else 0)
    factors = []
    prev = 1
    for k in range(1, size + 1):
        g = gcd_of_minors(m, k)
        if g == 0:
            factors.extend([0] * (size - len(factors)))
            break
        factors.append(g // prev)
        prev = g
    return factors


class TestRelationMatrix:
    def test_single_power(self):
        assert relation_matrix(presentation(["a"], [[1, 1]])) == [[2]]

    def test_commutator_has_zero_sums(self):
        assert relation_matrix(presentation(["a", "b"], [[1, 2, -1, -2]])) == [[0, 0]]

    def test_mixed_powers(self):
        assert relation_matrix(presentation(["a", "b"], [[1, 1, 2, 2, 2]])) == [[2, 3]]


class TestSmithNormalForm:
    def test_two_by_two(self):
        assert smith_normal_form([[2, 0], [0, 3]]) == [1, 6]
        assert gcd_of_minors([[2, 0], [0, 3]], 1) == 1
        assert gcd_of_minors([[2, 0], [0, 3]], 2) == 6

    def test_zero_matrix(self):
        assert smith_normal_form([[0, 0], [0, 0]]) == [0, 0]

    def test_single_entry(self):
        assert smith_normal_form([[2]]) == [2]

    def test_matches_minor_oracle_random(self):
        rng = random.Random(99)
        for _ in range(120):
            rows = rng.randint(1, 4)
            cols = rng.randint(1, 4)
            m = [[rng.randint(-6, 6) for _ in range(cols)] for _ in range(rows)]
            assert smith_normal_form(m) == snf_oracle(m)

    @settings(max_examples=80)
    @given(
        st.lists(
            st.lists(st.integers(min_value=-30, max_value=30), min_size=3, max_size=3),
            min_size=1,
            max_size=4,
        )
    )
    def test_divisibility_chain(self, m):
        factors = smith_normal_form(m)
        for a, b in zip(factors, factors[1:]):
            if a == 0:
                assert b == 0
            else:
                assert b % a == 0

    def test_big_entries_stay_exact(self):
        m = [[10**30, 1], [1, 10**30]]
        assert smith_normal_form(m) == [1, 10**60 - 1]


class TestRankModP:
    def test_two_routes_agree(self):
        # Gaussian elimination vs. counting SNF factors not divisible by p
        rng = random.Random(1234)
        for _ in range(200):
            rows = rng.randint(1, 4)
            cols = rng.randint(1, 4)
            m = [[rng.randint(-20, 20) for _ in range(cols)] for _ in range(rows)]
            factors = smith_normal_form(m)
            for p in PRIMES_TO_97:
                snf_rank = sum(1 for d in factors if d % p != 0)
                assert rank_mod_p(m, p) == snf_rank


class TestAbelianData:
    def test_z_mod_p(self):
        ab = abelian_data(presentation(["a"], [[1] * 5]), (5,))
        assert ab.d_p_by_prime[5] == 1 and ab.d_lower == 1

    def test_free_group(self):
        ab = abelian_data(presentation(["a", "b", "c"], []), (2, 3, 5))
        assert ab.d_lower == ab.d_upper == 3
        assert set(ab.d_p_by_prime.values()) == {3}
        assert ab.torsion_free_rank == 3

    def test_z6_resolution(self):
        # <a,b | a^2, b^3> abelianises to Z/6: one nontrivial factor
        ab = abelian_data(presentation(["a", "b"], [[1, 1], [2, 2, 2]]), (2, 3))
        assert ab.invariant_factors == (1, 6)
        assert ab.d_lower == 1
        assert ab.d_p_by_prime == {2: 1, 3: 1}

    def test_d_p_counts_factors_with_zeros(self):
        p = presentation(["a", "b", "c"], [[1, 1, 1, 1], [2, 2]])
        ab = abelian_data(p, (2,))
        by_factors = sum(1 for d in ab.invariant_factors if d % 2 == 0)
        assert ab.d_p_by_prime[2] == by_factors


class TestMatrixSerialization:
    def test_round_trip_with_big_entries(self):
        import json

        m = [[10**40, -3], [0, 7]]
        doc = json.dumps(matrix_to_json(m))
        assert matrix_from_json(json.loads(doc)) == m
