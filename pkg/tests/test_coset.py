"""Todd-Coxeter, finite actions, and normal-subgroup enumeration tests."""

import itertools

import pytest

from gradientlab.coset import (
    Limits,
    index_in_quotient,
    is_normal,
    low_index_normal_subgroups,
    orbit_count,
    orbits,
    to_action,
    todd_coxeter,
)
from gradientlab.errors import DomainError, Indeterminate
from gradientlab.words import SubgroupSpec, presentation

Z2 = presentation(["a"], [[1, 1]], "z2")
F2 = presentation(["a", "b"], [], "F2")
F3 = presentation(["a", "b", "c"], [], "F3")
Z2Z3 = presentation(["a", "b"], [[1, 1], [2, 2, 2]], "z2*z3")
S3 = presentation(["a", "b"], [[1, 1], [2, 2, 2], [1, 2, 1, 2]], "S3")


# --------------------------------------------------------------- oracles


def oracle_orbits(degree, perms):
    """Independent orbit counter: union-find over all permutation edges."""
    parent = list(range(degree))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for perm in perms:
        for x, y in enumerate(perm):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry
    return len({find(x) for x in range(degree)})


def _cyclic(k):
    elems = list(range(k))
    return elems, lambda x, y: (x + y) % k, 0


def _v4():
    elems = [(i, j) for i in range(2) for j in range(2)]
    return elems, lambda x, y: ((x[0] + y[0]) % 2, (x[1] + y[1]) % 2), (0, 0)


def _s3():
    elems = list(itertools.permutations(range(3)))
    return elems, lambda x, y: tuple(x[y[i]] for i in range(3)), (0, 1, 2)


def _generates(gens, elems, mul, identity):
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(seen) == len(elems)


def _aut_count(elems, mul, identity):
    count = 0
    for images in itertools.permutations(elems):
        phi = dict(zip(elems, images))
        if phi[identity] != identity:
            continue
        if all(phi[mul(x, y)] == mul(phi[x], phi[y]) for x in elems for y in elems):
            count += 1
    return count


def oracle_normal_subgroup_count(rank, index):
    """Normal subgroups of F_rank with quotient of the given order, counted as
    |Epi(F_rank, Q)| / |Aut(Q)| summed over all groups Q of that order."""
    groups = {
        1: [_cyclic(1)],
        2: [_cyclic(2)],
        3: [_cyclic(3)],
        4: [_cyclic(4), _v4()],
        5: [_cyclic(5)],
        6: [_cyclic(6), _s3()],
    }[index]
    total = 0
    for elems, mul, identity in groups:
        epi = sum(
            1
            for tup in itertools.product(elems, repeat=rank)
            if _generates(tup, elems, mul, identity)
        )
        total += epi // _aut_count(elems, mul, identity)
    return total


# ----------------------------------------------------------------- tests


class TestToddCoxeter:
    def test_finite_group_order(self):
        t = todd_coxeter(Z2, SubgroupSpec())
        assert t.index == 2

    def test_infinite_index_is_indeterminate(self):
        r = todd_coxeter(F2, SubgroupSpec(), Limits(max_cosets=1000, max_steps=10**6))
        assert isinstance(r, Indeterminate)

    def test_free_product_finite_subgroup_has_infinite_index(self):
        # <a> = Z/2 sits with infinite index in Z/2 * Z/3, so the enumeration
        # must refuse to close rather than report a table
        r = todd_coxeter(
            Z2Z3, SubgroupSpec((Z2Z3.word([1]),)), Limits(max_cosets=2000, max_steps=10**6)
        )
        assert isinstance(r, Indeterminate)

    def test_index_three_in_s3(self):
        t = todd_coxeter(S3, SubgroupSpec((S3.word([1]),)))
        assert t.index == 3

    def test_determinism(self):
        a = todd_coxeter(S3, SubgroupSpec((S3.word([1]),)))
        b = todd_coxeter(S3, SubgroupSpec((S3.word([1]),)))
        assert a.rows == b.rows

    def test_closure_certificate(self):
        t = todd_coxeter(S3, SubgroupSpec())
        t.validate()
        for rel in S3.relators:
            for c in range(t.index):
                assert t.trace_word(c, rel) == c

    def test_subgroup_words_fix_zero(self):
        spec = SubgroupSpec((S3.word([1]), S3.word([2, 1, 2, 2])))
        t = todd_coxeter(S3, spec)
        for w in spec.words:
            assert t.trace_word(0, w) == 0

    def test_generating_subgroup_collapses_to_index_one(self):
        # <a, b> is the whole group even when the quotient is infinite; the
        # enumeration must collapse its overshoot down to a single coset
        big = presentation(["a", "b"], [[1] * 2, [2] * 3, [1, 2] * 7], "(2,3,7)")
        t = todd_coxeter(big, SubgroupSpec((big.word([1]), big.word([2]))), Limits(2000, 10**7))
        assert t.index == 1

    def test_alternating_group_order_sixty(self):
        a5 = presentation(["a", "b"], [[1] * 2, [2] * 3, [1, 2] * 5], "(2,3,5)")
        t = todd_coxeter(a5, SubgroupSpec())
        assert t.index == 60
        t.validate()

    def test_lookahead_path_with_tight_budget(self):
        # enough room for the answer but not for the overshoot: the
        # lookahead-and-compact path has to reclaim dead cosets
        a5 = presentation(["a", "b"], [[1] * 2, [2] * 3, [1, 2] * 5], "(2,3,5)")
        t = todd_coxeter(a5, SubgroupSpec(), Limits(max_cosets=75, max_steps=10**7))
        if not isinstance(t, Indeterminate):
            assert t.index == 60

    def test_zero_generator_presentation(self):
        trivial = presentation([], [], "1")
        t = todd_coxeter(trivial, SubgroupSpec())
        assert t.index == 1
        assert [x.index for x in low_index_normal_subgroups(trivial, 4)] == [1]

    def test_serialization_layout(self):
        t = todd_coxeter(S3, SubgroupSpec((S3.word([1]),)))
        doc = t.to_json_dict()
        assert doc["index"] == 3
        assert doc["subgroup_words"] == ["a"]
        assert len(doc["rows"]) == 3 and len(doc["rows"][0]) == 4


class TestActions:
    def test_index_one_gives_identities(self):
        t = todd_coxeter(Z2, SubgroupSpec((Z2.word([1]),)))
        act = to_action(t)
        assert act.degree == 1 and act.perms == ((0,),)

    def test_transposition(self):
        t = todd_coxeter(Z2, SubgroupSpec())
        act = to_action(t)
        assert act.perms[0] == (1, 0)

    def test_b_acts_as_three_cycle(self):
        t = todd_coxeter(S3, SubgroupSpec((S3.word([1]),)))
        act = to_action(t)
        b = act.perms[1]
        assert sorted((0, b[0], b[b[0]])) == [0, 1, 2] and b[b[b[0]]] == 0

    def test_orbit_count_whole_group_is_one(self):
        t = todd_coxeter(S3, SubgroupSpec((S3.word([1]),)))
        act = to_action(t)
        assert orbit_count(act, SubgroupSpec(S3.generator_words())) == 1

    def test_orbit_count_trivial_subgroup(self):
        t = todd_coxeter(S3, SubgroupSpec((S3.word([1]),)))
        act = to_action(t)
        assert orbit_count(act, SubgroupSpec()) == act.degree

    def test_orbit_count_matches_oracle(self):
        tables = low_index_normal_subgroups(Z2Z3, 6)
        h6 = [t for t in tables if t.index == 6][0]
        act = to_action(h6)
        l = SubgroupSpec((Z2Z3.word([1]),))
        perms = [act.word_image(w) for w in l.words]
        assert orbit_count(act, l) == oracle_orbits(act.degree, perms) == 3

    def test_index_in_quotient(self):
        tables = low_index_normal_subgroups(Z2Z3, 6)
        h6 = [t for t in tables if t.index == 6][0]
        act = to_action(h6)
        assert index_in_quotient(act, SubgroupSpec()) == 1
        assert index_in_quotient(act, SubgroupSpec(Z2Z3.generator_words())) == 6
        assert index_in_quotient(act, SubgroupSpec((Z2Z3.word([2]),))) == 3

    def test_orbit_sizes_uniform_for_normal(self):
        tables = low_index_normal_subgroups(Z2Z3, 6)
        for t in tables:
            act = to_action(t)
            for l in (SubgroupSpec((Z2Z3.word([1]),)), SubgroupSpec((Z2Z3.word([2]),))):
                sizes = {len(o) for o in orbits(act, l)}
                assert len(sizes) == 1
                assert orbit_count(act, l) * index_in_quotient(act, l) == act.degree


class TestIsNormal:
    def test_trivial_subgroup_normal(self):
        t = todd_coxeter(Z2, SubgroupSpec())
        assert is_normal(t)

    def test_point_stabiliser_not_normal(self):
        t = todd_coxeter(S3, SubgroupSpec((S3.word([1]),)))
        assert not is_normal(t)
        # witness: the conjugate b a b^-1 moves coset 0
        conj = S3.word([2, 1, -2])
        assert t.trace_word(0, conj) != 0

    def test_enumerated_kernels_always_normal(self):
        for t in low_index_normal_subgroups(Z2Z3, 6):
            assert is_normal(t)


class TestLowIndexNormal:
    def test_z2(self):
        res = low_index_normal_subgroups(Z2, 2)
        assert [t.index for t in res] == [1, 2]

    def test_f2_index_two_matches_surjection_count(self):
        res = low_index_normal_subgroups(F2, 2)
        assert [t.index for t in res] == [1, 2, 2, 2]
        assert oracle_normal_subgroup_count(2, 2) == 3

    @pytest.mark.parametrize("rank,pres", [(2, F2), (3, F3)])
    def test_free_group_counts_match_oracle(self, rank, pres):
        res = low_index_normal_subgroups(pres, 6)
        by_index = {}
        for t in res:
            by_index[t.index] = by_index.get(t.index, 0) + 1
        for index in range(1, 7):
            assert by_index.get(index, 0) == oracle_normal_subgroup_count(rank, index)

    def test_z2z3_contains_free_rank_two_kernel(self):
        from gradientlab.abelian import abelian_data
        from gradientlab.rewriting import reidemeister_schreier, tietze_simplify

        res = low_index_normal_subgroups(Z2Z3, 6)
        assert [t.index for t in res] == [1, 2, 3, 6, 6]
        ranks = []
        for t in res:
            if t.index != 6:
                continue
            pres = tietze_simplify(reidemeister_schreier(Z2Z3, t))
            ab = abelian_data(pres)
            ranks.append((ab.torsion_free_rank, len(pres.relators)))
        assert (2, 0) in ranks

    def test_deterministic_and_canonical(self):
        a = low_index_normal_subgroups(F2, 3)
        b = low_index_normal_subgroups(F2, 3)
        assert [t.rows for t in a] == [t.rows for t in b]
        keys = [(t.index, t.rows) for t in a]
        assert keys == sorted(keys)

    def test_tables_carry_valid_subgroup_specs(self):
        for t in low_index_normal_subgroups(Z2Z3, 6):
            t.validate()
            for w in t.subgroup.words:
                assert t.trace_word(0, w) == 0

    def test_indeterminate_on_tiny_budget(self):
        res = low_index_normal_subgroups(F3, 6, Limits(max_cosets=10**6, max_steps=50))
        assert isinstance(res, Indeterminate)

    def test_index_cap_enforced(self):
        with pytest.raises(DomainError):
            low_index_normal_subgroups(F2, 100)
