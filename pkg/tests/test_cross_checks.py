"""Dual-route consistency: independent algorithms must produce identical tables.

Canonical numbering makes coset tables of equal subgroups literally equal,
so the backtrack enumerator, the Frattini extension, the diagonal-action
intersection, and plain Todd-Coxeter can all be played against each other.
"""

from fractions import Fraction

from gradientlab.chains import (
    SubgroupRecord,
    intersect,
    mod_p_frattini_step,
    p_chain,
    whole_group_record,
)
from gradientlab.coset import low_index_normal_subgroups, todd_coxeter
from gradientlab.gradient import rg_absolute_upper, rg_sequence
from gradientlab.words import SubgroupSpec, presentation

Z2Z3 = presentation(["a", "b"], [[1, 1], [2, 2, 2]], "z2*z3")
F2 = presentation(["a", "b"], [], "F2")
DINF = presentation(["a", "b"], [[1, 1], [2, 2]], "Dinf")


def test_backtrack_tables_reproduced_by_todd_coxeter():
    # enumerated subgroup spec fed back through HLT gives the same table
    for t in low_index_normal_subgroups(Z2Z3, 6):
        again = todd_coxeter(Z2Z3, t.subgroup)
        assert again.rows == t.rows


def test_frattini_table_reproduced_by_todd_coxeter():
    # the mod-2 kernel of the infinite dihedral group is the subgroup
    # generated by (ab)^2; both routes must agree row for row
    k = mod_p_frattini_step(DINF, whole_group_record(DINF), 2)
    direct = todd_coxeter(DINF, SubgroupSpec((DINF.word([1, 2, 1, 2]),)))
    assert direct.rows == k.table.rows
    via_spec = todd_coxeter(DINF, k.table.subgroup)
    assert via_spec.rows == k.table.rows


def test_f2_frattini_reproduced_by_todd_coxeter():
    k = mod_p_frattini_step(F2, whole_group_record(F2), 2)
    again = todd_coxeter(F2, k.table.subgroup)
    assert again.rows == k.table.rows


def test_intersection_reproduced_by_todd_coxeter():
    tables = [t for t in low_index_normal_subgroups(F2, 2) if t.index == 2]
    meet = intersect(
        SubgroupRecord(tables[0], True, "enum"), SubgroupRecord(tables[1], True, "enum")
    )
    again = todd_coxeter(F2, meet.table.subgroup)
    assert again.rows == meet.table.rows


def test_frattini_levels_appear_in_low_index_enumeration():
    # the depth-1 and depth-2 chain levels of Dinf are normal subgroups of
    # index 4 and 8, so the backtrack must find those exact tables
    chain = p_chain(DINF, 2, 2)
    enumerated = {t.rows for t in low_index_normal_subgroups(DINF, 8)}
    for rec in chain.levels[1:]:
        assert rec.table.rows in enumerated


def test_absolute_rgp_agrees_with_chain_route():
    # enumeration route: minimum over 2-power-index normals; chain route:
    # stabilised mod-2 Frattini chain; both give exactly -1/2 for z2*z3
    enum_route = rg_absolute_upper(Z2Z3, 8, "rgp", prime=2)
    chain_route = rg_sequence(p_chain(Z2Z3, 2, 4), "rgp")
    assert enum_route.interval.hi == Fraction(-1, 2)
    assert chain_route.exact
    assert chain_route.chain_estimate.hi == Fraction(-1, 2)
    assert enum_route.witness.index == 2
