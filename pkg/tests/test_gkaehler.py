"""Generalized Kaehler pairs: validation, bigrading, d_H split, deformations."""

from fractions import Fraction

import pytest

from gchodge.cohomology import ddbar_check
from gchodge.courant import GenElem
from gchodge.errors import MetricNotPositive, NotADecomposition, NotCommuting
from gchodge.families import FamilySpec
from gchodge.forms import Form
from gchodge.gcs import make_complex, make_general, make_symplectic
from gchodge.gkaehler import (algebroid_split_check, bigraded_cohomology,
                              bigrading, delta_split_check, gk_deformation_check,
                              gk_validate)
from gchodge.liemodel import LieModel
from gchodge.poly import ParamPoly, pmat_from_qi
from gchodge.scalars import I, ONE, QI

from test_gcs import ABELIAN4, std_I, torus_omega
from test_families import poly_two_form

# flat Kaehler solvable model: d e1 = -e23, d e2 = e13 (isometries of the plane)
FLAT4 = LieModel(4, [(1, 2, 3, -1), (2, 1, 3, 1)], name="flat4")


def kahler_I(dim=4):
    # the orientation pairing with omega = e12 + e34 + ... that makes
    # G = -J1 J2 positive is x_{2k} -> x_{2k-1}, x_{2k-1} -> -x_{2k}
    return [[-x for x in row] for row in std_I(dim)]


def kahler_pair(model=ABELIAN4):
    s1 = make_complex(model, kahler_I(4))
    s2 = make_symplectic(model, torus_omega(4))
    return gk_validate(s1, s2)


def test_gk_validate_torus():
    pair = kahler_pair()
    assert pair.Lp.rank == 2 and pair.Lm.rank == 2

def test_gk_validate_flat4():
    pair = kahler_pair(FLAT4)
    assert pair.Lp.rank == 2 and pair.Lm.rank == 2

def test_gk_rejects_negated_partner():
    s1 = make_complex(ABELIAN4, kahler_I(4))
    J2 = [[-x for x in row] for row in s1.J]
    s2 = make_general(ABELIAN4, J2)
    with pytest.raises(MetricNotPositive):
        gk_validate(s1, s2)

def test_gk_rejects_indefinite_pair():
    s1 = make_complex(ABELIAN4, kahler_I(4))
    s2 = make_symplectic(ABELIAN4,
                         Form.blade(4, [1, 2]) - Form.blade(4, [3, 4]))
    with pytest.raises(MetricNotPositive):
        gk_validate(s1, s2)

def test_gk_rejects_noncommuting():
    s1 = make_complex(ABELIAN4, kahler_I(4))
    s2 = make_symplectic(ABELIAN4,
                         Form.blade(4, [1, 3]) + Form.blade(4, [2, 4]))
    # omega = e13 + e24 anticommutes with the standard I
    with pytest.raises((NotCommuting, MetricNotPositive)):
        gk_validate(s1, s2)


def test_bigrading_dims():
    pair = kahler_pair()
    rep = bigrading(pair)
    assert rep.total_ok and rep.parity_ok and rep.commute_ok and rep.hodge_dims_ok
    assert rep.dims[(-2, 0)] == 1
    assert sum(rep.dims.values()) == 16
    assert all((r + s) % 2 == 0 for r, s in rep.dims)

def test_bigrading_flat4():
    rep = bigrading(kahler_pair(FLAT4))
    assert rep.total_ok and rep.parity_ok and rep.commute_ok and rep.hodge_dims_ok


def test_delta_split_torus_all_zero():
    pair = kahler_pair()
    rep = delta_split_check(pair)
    assert rep.residual_ok and rep.matches_delbar1 and rep.matches_delbar2
    assert rep.anticommute_ok and rep.strong_anticommute

def test_delta_split_flat4():
    # nonzero differentials here; the four components and the d_H^2 = 0
    # bidegree identities are real content, while the diagonal pairs
    # anticommute only in sum
    pair = kahler_pair(FLAT4)
    rep = delta_split_check(pair)
    assert rep.residual_ok and rep.matches_delbar1 and rep.matches_delbar2
    assert rep.anticommute_ok
    assert not rep.strong_anticommute

def test_both_structures_satisfy_ddbar():
    for model in (ABELIAN4, FLAT4):
        pair = kahler_pair(model)
        assert ddbar_check(pair.s1).holds
        assert ddbar_check(pair.s2).holds


def test_bigraded_cohomology_torus():
    pair = kahler_pair()
    rep = bigraded_cohomology(pair)
    assert rep.total_matches_twisted
    assert rep.blocks_decompose and rep.intersection_ok and rep.marginals_ok
    assert sum(rep.dims.values()) == 16
    assert rep.dims[(-2, 0)] == 1

def test_bigraded_cohomology_flat4():
    rep = bigraded_cohomology(kahler_pair(FLAT4))
    assert rep.total_matches_twisted
    assert rep.blocks_decompose and rep.intersection_ok and rep.marginals_ok
    assert sum(rep.dims.values()) == 8


def test_algebroid_split_identities():
    pair = kahler_pair()
    rep1 = algebroid_split_check(pair.s1.L, pair.Lp, pair.Lm)
    assert rep1.ok
    Lm_conj_basis = [b.conj() for b in pair.Lm.basis]
    from gchodge.courant import algebroid_from_basis
    Lmc = algebroid_from_basis(pair.model, Lm_conj_basis, name="conj(L1-)")
    rep2 = algebroid_split_check(pair.s2.L, pair.Lp, Lmc)
    assert rep2.ok

def test_algebroid_split_identities_flat4():
    pair = kahler_pair(FLAT4)
    rep = algebroid_split_check(pair.s1.L, pair.Lp, pair.Lm)
    assert rep.ok

def test_algebroid_split_rejects_nonclosed():
    # {x1, x2} is not bracket-closed on Kodaira-Thurston: [x1, x2] = -x4
    # leaks into the complementary factor
    kt = LieModel(4, [(4, 1, 2, 1)])
    from gchodge.courant import algebroid_from_basis
    from gchodge.liemodel import LieAlgebroid
    L = algebroid_from_basis(kt, [GenElem.x(4, i) for i in range(1, 5)])
    with pytest.raises(NotADecomposition):
        a1 = LieAlgebroid(kt, [GenElem.x(4, 1), GenElem.x(4, 2)],
                          [[[QI(0)] * 2] * 2] * 2, name="bad")
        a2 = LieAlgebroid(kt, [GenElem.x(4, 3), GenElem.x(4, 4)],
                          [[[QI(0)] * 2] * 2] * 2, name="rest")
        algebroid_split_check(L, a1, a2)


def constant_complex_family(model=ABELIAN4):
    nv = 1
    return FamilySpec(model, "complex", nv,
                      samples=[(QI(Fraction(1, 2)),)],
                      It=pmat_from_qi(kahler_I(4), nv), name="const-complex")


def scaling_symplectic_family(model=ABELIAN4, mu=None):
    nv = 1
    w = torus_omega(4)
    mu = mu if mu is not None else w
    t = ParamPoly.var(nv, 0)
    return FamilySpec(model, "symplectic", nv,
                      samples=[(QI(Fraction(1, 2)),)],
                      omega_t=poly_two_form(model, nv,
                                            (ParamPoly.const(nv, ONE), w),
                                            (t, mu)),
                      name="scaling-symplectic")


def test_gk_deformation_compatible():
    f1 = constant_complex_family()
    f2 = scaling_symplectic_family()
    rep = gk_deformation_check(f1, f2)
    assert all(rep.samples_gk.values())
    assert rep.compatible

def test_gk_deformation_incompatible():
    # mu with a (2,0)+(0,2) part breaks the conjugation symmetry of rho_2
    mu = Form.blade(4, [1, 3]) - Form.blade(4, [2, 4])
    f1 = constant_complex_family()
    f2 = scaling_symplectic_family(mu=mu)
    rep = gk_deformation_check(f1, f2)
    assert not rep.compatible
    assert not all(rep.samples_gk.values())
