"""Frattini steps, p-chains, intersections, and chain restriction tests."""

import pytest

from gradientlab.chains import (
    SubgroupRecord,
    intersect,
    mod_p_frattini_step,
    p_chain,
    restrict_chain,
    whole_group_record,
)
from gradientlab.coset import (
    index_in_quotient,
    is_normal,
    low_index_normal_subgroups,
    orbit_count,
    to_action,
)
from gradientlab.errors import CapExceededError, DomainError, EmbeddingViolationError
from gradientlab.words import SubgroupSpec, presentation

Z = presentation(["a"], [], "Z")
ZXZ = presentation(["a", "t"], [[-2, 1, 2, -1]], "ZxZ")
DINF = presentation(["a", "b"], [[1, 1], [2, 2]], "Dinf")
F2 = presentation(["a", "b"], [], "F2")
Z2Z3 = presentation(["a", "b"], [[1, 1], [2, 2, 2]], "z2*z3")


def oracle_pair_orbit(rows_a, rows_b):
    """Independent product-action orbit size of (0, 0)."""
    ncols = len(rows_a[0])
    seen = {(0, 0)}
    frontier = [(0, 0)]
    while frontier:
        nxt = []
        for ca, cb in frontier:
            for col in range(ncols):
                state = (rows_a[ca][col], rows_b[cb][col])
                if state not in seen:
                    seen.add(state)
                    nxt.append(state)
        frontier = nxt
    return len(seen)


class TestFrattiniStep:
    def test_z_step(self):
        k = mod_p_frattini_step(Z, whole_group_record(Z), 2)
        assert k.index == 2

    def test_f2_step_nielsen_schreier(self):
        # index p^2 = 4; the new subgroup is free of rank 4*1 + 1 = 5
        k = mod_p_frattini_step(F2, whole_group_record(F2), 2)
        assert k.index == 4
        assert k.d_p(2) == 5
        pres = k.raw_presentation()
        assert pres.n_generators == 5 and pres.relators == ()

    def test_dinf_step(self):
        k = mod_p_frattini_step(DINF, whole_group_record(DINF), 2)
        assert k.index == 4
        assert is_normal(k.table)

    def test_index_growth_formula(self):
        rec = whole_group_record(ZXZ)
        for _ in range(3):
            nxt = mod_p_frattini_step(ZXZ, rec, 2)
            assert nxt.index == rec.index * 2 ** rec.d_p(2)
            rec = nxt

    def test_index_multiplicativity_along_chain(self):
        chain = p_chain(DINF, 2, 3)
        for upper, lower in zip(chain.levels, chain.levels[1:]):
            assert lower.index % upper.index == 0
            assert lower.index // upper.index == 2 ** upper.d_p(2)

    def test_cap_exceeded(self):
        f3 = presentation(["a", "b", "c"], [], "F3")
        with pytest.raises(CapExceededError):
            mod_p_frattini_step(f3, whole_group_record(f3), 2, dp_cap=2)

    def test_normality_requirement(self):
        t = [x for x in low_index_normal_subgroups(Z2Z3, 6) if x.index == 6][0]
        rec = SubgroupRecord(t, normal=False, provenance="test")
        with pytest.raises(DomainError):
            mod_p_frattini_step(Z2Z3, rec, 2)


class TestPChain:
    def test_z_chain_indices(self):
        chain = p_chain(Z, 2, 3)
        assert [r.index for r in chain.levels] == [1, 2, 4, 8]

    def test_zxz_chain_indices(self):
        chain = p_chain(ZXZ, 2, 3)
        assert [r.index for r in chain.levels] == [1, 4, 16, 64]
        assert [r.d_p(2) for r in chain.levels] == [2, 2, 2, 2]

    def test_dinf_values_reach_zero(self):
        chain = p_chain(DINF, 2, 3)
        assert [r.index for r in chain.levels] == [1, 4, 8, 16]
        assert [r.d_p(2) for r in chain.levels] == [2, 1, 1, 1]

    def test_finite_p_group_stabilises(self):
        z8 = presentation(["a"], [[1] * 8], "z8")
        chain = p_chain(z8, 2, 6)
        assert [r.index for r in chain.levels] == [1, 2, 4, 8]
        assert chain.stabilized

    def test_p_power_indices_validated(self):
        chain = p_chain(Z2Z3, 3, 3)
        for rec in chain.levels:
            k = rec.index
            while k % 3 == 0:
                k //= 3
            assert k == 1

    def test_every_level_normal_by_trace(self):
        chain = p_chain(DINF, 2, 3)
        for rec in chain.levels:
            assert is_normal(rec.table)

    def test_truncation_keeps_prior_levels(self):
        f2chain = p_chain(F2, 2, 4)  # d_p blows past the cap at depth 2
        assert f2chain.truncated_reason is not None
        assert [r.index for r in f2chain.levels] == [1, 4, 128]

    def test_depth_cap(self):
        with pytest.raises(DomainError):
            p_chain(Z, 2, 9)


class TestIntersect:
    def test_self_intersection(self):
        chain = p_chain(DINF, 2, 2)
        h = chain.levels[1]
        assert intersect(h, h).table.rows == h.table.rows

    def test_whole_group_identity(self):
        chain = p_chain(DINF, 2, 2)
        h = chain.levels[1]
        whole = whole_group_record(DINF)
        assert intersect(h, whole).table.rows == h.table.rows

    def test_two_index_two_subgroups_of_f2(self):
        tables = [t for t in low_index_normal_subgroups(F2, 2) if t.index == 2]
        r1 = SubgroupRecord(tables[0], True, "enum")
        r2 = SubgroupRecord(tables[1], True, "enum")
        meet = intersect(r1, r2)
        assert meet.index == 4
        assert meet.index == oracle_pair_orbit(tables[0].rows, tables[1].rows)

    def test_commutative(self):
        tables = [t for t in low_index_normal_subgroups(F2, 2) if t.index == 2]
        r1 = SubgroupRecord(tables[0], True, "enum")
        r2 = SubgroupRecord(tables[1], True, "enum")
        assert intersect(r1, r2).table.rows == intersect(r2, r1).table.rows

    def test_index_bound(self):
        tables = [t for t in low_index_normal_subgroups(Z2Z3, 6) if t.index in (2, 3)]
        r1 = SubgroupRecord(tables[0], True, "enum")
        r2 = SubgroupRecord(tables[1], True, "enum")
        meet = intersect(r1, r2)
        assert meet.index <= r1.index * r2.index
        assert is_normal(meet.table)


class TestRestrict:
    def test_whole_group_restriction_is_identity(self):
        chain = p_chain(DINF, 2, 2)
        restricted = restrict_chain(chain, DINF.generator_words(), DINF)
        assert [r.index for r in restricted.levels] == [r.index for r in chain.levels]

    def test_restrict_to_finite_factor_divides_order(self):
        chain = p_chain(Z2Z3, 2, 2)
        z2 = presentation(["x"], [[1, 1]], "z2")
        restricted = restrict_chain(chain, (Z2Z3.word([1]),), z2)
        for rec in restricted.levels:
            assert 2 % rec.index == 0

    def test_f2_chain_restricted_to_z(self):
        chain = p_chain(F2, 2, 2)
        restricted = restrict_chain(chain, (F2.word([1]),), Z)
        assert [r.index for r in restricted.levels] == [1, 2, 4]
        # oracle: orbit of coset 0 under <a> in each ambient level
        for amb, res in zip(chain.levels, restricted.levels):
            act = to_action(amb.table)
            assert index_in_quotient(act, SubgroupSpec((F2.word([1]),))) == res.index

    def test_orbit_index_product(self):
        chain = p_chain(Z2Z3, 2, 2)
        l = SubgroupSpec((Z2Z3.word([2]),))
        for rec in chain.levels:
            act = to_action(rec.table)
            assert orbit_count(act, l) * index_in_quotient(act, l) == rec.index

    def test_embedding_violation(self):
        chain = p_chain(F2, 2, 2)
        z3 = presentation(["x"], [[1, 1, 1]], "z3")
        with pytest.raises(EmbeddingViolationError):
            restrict_chain(chain, (F2.word([1]),), z3)

    def test_restricted_stabilisation_when_factor_dies(self):
        z4a = presentation(["a"], [[1] * 4], "z4")
        z4b = presentation(["b"], [[1] * 4], "z4")
        from gradientlab.constructions import AmalgamSpec, build_amalgam

        spec = AmalgamSpec(
            left=z4a, right=z4b,
            a_words_left=(z4a.word([1, 1]),), a_words_right=(z4b.word([1, 1]),),
            a_pres=presentation(["x"], [[1, 1]], "z2"),
            a_finite_order=2, a_amenable=True, label="z4*z4",
        )
        group = build_amalgam(spec)
        chain = p_chain(group.presentation, 2, 3)
        restricted = restrict_chain(chain, group.factor_words[0], z4a)
        assert restricted.levels[-1].index == 4  # the copy of Z/4 meets H trivially
        assert restricted.stabilized

    def test_restricted_tables_are_valid(self):
        chain = p_chain(ZXZ, 2, 3)
        restricted = restrict_chain(chain, (ZXZ.word([1]),), Z)
        for rec in restricted.levels:
            rec.table.validate()
            assert is_normal(rec.table)
