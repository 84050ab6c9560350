"""Families: validation, graphs, KS classes, Gauss-Manin, transversality."""

from fractions import Fraction

import pytest

from gchodge.courant import GenElem
from gchodge.errors import GraphConditionFailed, SectionNotClosed
from gchodge.families import (FamilySpec, extend_section, family_validate,
                              gcy_check, gm_derivative, graph_epsilon,
                              holomorphy_check, ks_class, q_flatness,
                              symp_filtration_check, transversality_check)
from gchodge.forms import Form
from gchodge.gcs import make_complex, make_symplectic
from gchodge.poly import ParamPoly, PolyForm, pmat_from_qi
from gchodge.scalars import I, ONE, QI

from test_gcs import ABELIAN4, KT, KT_TW, std_I, torus_omega


def poly_two_form(model, nvars, *terms):
    """terms: (poly, form) pairs summed into a PolyForm."""
    out = PolyForm(model.dim, nvars)
    for poly, form in terms:
        out = out + PolyForm.from_form(form, nvars).scale_poly(poly)
    return out


def scaling_family(samples=((QI(Fraction(1, 2)),), (QI(Fraction(-1, 3)),))):
    """sigma(t) = (1+t)(e12+e34) on the torus."""
    w = torus_omega(4)
    nv = 1
    one_plus_t = ParamPoly.const(nv, ONE) + ParamPoly.var(nv, 0)
    return FamilySpec(ABELIAN4, "symplectic", nv, samples=samples,
                      omega_t=poly_two_form(ABELIAN4, nv, (one_plus_t, w)),
                      name="torus-scaling")


def constant_symplectic_family():
    nv = 1
    return FamilySpec(ABELIAN4, "symplectic", nv,
                      samples=[(QI(Fraction(1, 2)),)],
                      omega_t=PolyForm.from_form(torus_omega(4), nv),
                      name="torus-constant")


def shear_complex_family():
    """I(t) = (1+tN) I0 (1-tN) with a nilpotent shear N (x1 -> x3)."""
    nv = 1
    I0 = std_I(4)
    N = [[QI(0)] * 4 for _ in range(4)]
    N[2][0] = ONE  # x1 -> x3
    t = ParamPoly.var(nv, 0)
    P = [[ParamPoly.const(nv, ONE if i == j else QI(0)) +
          t.scale(N[i][j]) for j in range(4)] for i in range(4)]
    Pinv = [[ParamPoly.const(nv, ONE if i == j else QI(0)) +
             t.scale(-N[i][j]) for j in range(4)] for i in range(4)]
    from gchodge.poly import pmat_mul
    It = pmat_mul(P, pmat_mul(pmat_from_qi(I0, nv), Pinv))
    return FamilySpec(ABELIAN4, "complex", nv,
                      samples=[(QI(Fraction(1, 3)),)], It=It,
                      name="torus-shear")


def test_family_validate_scaling():
    assert family_validate(scaling_family()).ok

def test_family_validate_degenerate_sample():
    f = scaling_family(samples=[(QI(-1),)])
    rep = family_validate(f)
    assert not rep.ok
    assert rep.failures[0][1].startswith("degenerate-omega")

def test_family_validate_bad_complex():
    # I(t) = I0 + t with t=1 breaking I^2 = -1
    nv = 1
    t = ParamPoly.var(nv, 0)
    It = [[ParamPoly.const(nv, x) for x in row] for row in std_I(4)]
    It[0][0] = It[0][0] + t
    f = FamilySpec(ABELIAN4, "complex", nv, samples=[(ONE,)], It=It)
    rep = family_validate(f)
    assert not rep.ok and rep.failures[0][1].startswith("not-almost-complex")


def test_graph_epsilon_basepoint_zero():
    f = scaling_family()
    rep = graph_epsilon(f, f.basepoint)
    assert not rep.cochain
    assert rep.roundtrip_ok

def test_graph_epsilon_roundtrip_at_samples():
    f = scaling_family()
    for pt in f.samples:
        rep = graph_epsilon(f, pt)
        assert rep.roundtrip_ok
        assert rep.cochain  # genuinely deformed

def test_graph_condition_failure():
    # J(t) = (1-2t) J0 is a valid structure at t=1 where L_t = conj(L_0)
    base = make_symplectic(ABELIAN4, torus_omega(4))
    nv = 1
    t = ParamPoly.var(nv, 0)
    fac = ParamPoly.const(nv, ONE) + t.scale(QI(-2))
    Jt = [[fac.scale(x) for x in row] for row in base.J]
    f = FamilySpec(ABELIAN4, "general", nv, samples=[(ONE,)], Jt=Jt)
    assert family_validate(f).ok
    with pytest.raises(GraphConditionFailed):
        graph_epsilon(f, (ONE,))


def test_ks_class_scaling_is_i_mu_over_2():
    # the paper-pinned value: under psi: H^2(L) = H^2(M, C), class = i mu / 2
    f = scaling_family()
    rep = ks_class(f, 0)
    assert rep.closed and not rep.class_is_zero
    assert rep.jjandks_ok
    base = f.base_structure()
    mu = torus_omega(4)
    sigma0 = mu  # basepoint sigma = omega
    half_i = I * QI(Fraction(1, 2))
    for a in range(1, 5):
        for b in range(a + 1, 5):
            psi_a = GenElem.x(4, a) - GenElem(
                4, None, [sigma0.contract_index(a).coeffs.get(1 << (k), QI(0))
                          for k in range(4)]).scale(I)
            psi_b = GenElem.x(4, b) - GenElem(
                4, None, [sigma0.contract_index(b).coeffs.get(1 << (k), QI(0))
                          for k in range(4)]).scale(I)
            val = base.L.cochain_eval(rep.cochain, [psi_a, psi_b])
            want = half_i * mu.coeffs.get((1 << (a - 1)) | (1 << (b - 1)), QI(0))
            assert val == want

def test_ks_class_constant_family_zero():
    rep = ks_class(constant_symplectic_family(), 0)
    assert rep.class_is_zero and rep.closed and rep.jjandks_ok

def test_ks_class_shear_matches_classical():
    f = shear_complex_family()
    rep = ks_class(f, 0)
    assert rep.closed and rep.jjandks_ok and not rep.class_is_zero
    base = f.base_structure()
    # classical Kodaira-Spencer block: frame P(t) = (1 + i I(t))/2 on T^{0,1}
    from gchodge.poly import pmat_eval
    I0 = std_I(4)
    Idot = pmat_eval([[p.diff(0) for p in row] for row in f.It], f.basepoint)
    # vector-type basis elements of L (pure tangent part)
    vec_idx = [a for a, l in enumerate(base.L.basis)
               if not any(l.cov) and any(l.vec)]
    cov_idx = [a for a, l in enumerate(base.L.basis)
               if not any(l.vec) and any(l.cov)]
    assert len(vec_idx) == 2 and len(cov_idx) == 2
    # H^2(O)-block: cochain vanishes on pairs of vector-type arguments
    for i in vec_idx:
        for j in vec_idx:
            if i < j:
                assert ((1 << i) | (1 << j)) not in rep.cochain
    # classical graph derivative: mu = P10 . (i/2 Idot) restricted to T^{0,1};
    # the engine's eps on a vector-type l is  (d/dt)(1 + i I(t))/2 l = i/2 Idot l
    for a in vec_idx:
        l = base.L.basis[a]
        img = GenElem(4)
        for be in range(4):
            if rep.eps_matrix[be][a]:
                img = img + base.L.basis[be].conj().scale(rep.eps_matrix[be][a])
        want_vec = [QI(0, Fraction(1, 2)) * sum(
            (Idot[r][c] * l.vec[c] for c in range(4)), QI(0)) for r in range(4)]
        assert list(img.vec) == want_vec
        assert not any(img.cov)


def test_gm_derivative_constant_section():
    f = scaling_family()
    s = PolyForm.from_form(Form.one(4) + torus_omega(4), 1)
    coords, _tw = gm_derivative(f, s, 0)
    assert not coords

def test_gm_derivative_exponential_section():
    f = scaling_family()
    nv = 1
    sigma_t = f.omega_t.scale(I)
    s = sigma_t.exp()
    coords, tw = gm_derivative(f, s, 0)
    mu = torus_omega(4)
    want_form = mu.scale(I).wedge(mu.scale(I).exp())
    want = tw.coords(want_form)
    assert coords == want and coords

def test_gm_rejects_nonclosed_section():
    f = FamilySpec(KT, "symplectic", 1,
                   omega_t=PolyForm.from_form(
                       Form.blade(4, [1, 4]) + Form.blade(4, [2, 3]), 1))
    bad = PolyForm.from_form(Form.blade(4, [4]), 1)
    with pytest.raises(SectionNotClosed):
        gm_derivative(f, bad, 0)

def test_q_flatness_product_rule():
    # e^{i sigma(t)} is closed but not flat; the product rule still holds
    f = scaling_family()
    s1 = f.omega_t.scale(I).exp()
    s2 = s1.conj()
    rep = q_flatness(f, s1, s2)
    assert rep.ok and rep.product_rule_ok
    assert rep.flat == (False, False)
    assert rep.q.eval(f.basepoint) == QI(-4)

def test_q_constant_on_flat_sections():
    # flat sections with genuinely t-dependent representatives: s0 + t d_H(h)
    w = Form.blade(4, [1, 4]) + Form.blade(4, [2, 3])
    f = FamilySpec(KT, "symplectic", 1, samples=[],
                   omega_t=PolyForm.from_form(w, 1))
    nv = 1
    t = ParamPoly.var(nv, 0)
    rho = w.scale(I).exp()
    pert = PolyForm.from_form(KT.d_H(Form.blade(4, [4])), nv)
    assert not pert.is_zero()
    s1 = PolyForm.from_form(rho, nv) + pert.scale_poly(t)
    s2 = PolyForm.from_form(rho.conj(), nv) + pert.scale_poly(t.scale(QI(-2)))
    rep = q_flatness(f, s1, s2)
    assert rep.flat == (True, True)
    assert rep.ok
    assert rep.q.is_constant() and rep.q.eval((QI(0),)) == QI(-4)


def test_holomorphy_check():
    w = torus_omega(4)
    nv = 2
    t1 = ParamPoly.var(nv, 0)
    t2 = ParamPoly.var(nv, 1)
    holo = t1 + t2.scale(I)
    anti = t1 - t2.scale(I)
    base = ParamPoly.const(nv, ONE)
    f_holo = FamilySpec(ABELIAN4, "symplectic", nv,
                        omega_t=poly_two_form(ABELIAN4, nv, (base, w), (holo, w)))
    f_anti = FamilySpec(ABELIAN4, "symplectic", nv,
                        omega_t=poly_two_form(ABELIAN4, nv, (base, w), (anti, w)))
    f_const = FamilySpec(ABELIAN4, "symplectic", nv,
                         omega_t=poly_two_form(ABELIAN4, nv, (base, w)))
    assert holomorphy_check(f_holo).holomorphic
    assert not holomorphy_check(f_anti).holomorphic
    assert holomorphy_check(f_const).holomorphic  # vacuous


def test_symp_filtration_scaling():
    f = scaling_family(samples=[(QI(Fraction(1, 2)),)])
    for p in (-2, 0, 2):
        rep = symp_filtration_check(f, p)
        assert rep.ok, (p, rep.per_sample)

def test_symp_filtration_skipped_on_kt():
    f = FamilySpec(KT, "symplectic", 1, samples=[],
                   omega_t=PolyForm.from_form(
                       Form.blade(4, [1, 4]) + Form.blade(4, [2, 3]), 1))
    assert symp_filtration_check(f, 0).skipped


def test_gcy_torus_symplectic():
    s = make_symplectic(ABELIAN4, torus_omega(4))
    rep = gcy_check(s)
    assert rep.spinor_closed and rep.chain_identity_ok
    assert rep.iso_dims == (6, 6) and rep.iso_ok and rep.period_injective

def test_gcy_complex_torus():
    s = make_complex(ABELIAN4, std_I(4))
    rep = gcy_check(s)
    assert rep.iso_ok and rep.period_injective and rep.chain_identity_ok

def test_gcy_twisted_kt():
    s = make_symplectic(KT_TW, Form.blade(4, [1, 4]) + Form.blade(4, [2, 3]),
                        -Form.blade(4, [3, 4]))
    rep = gcy_check(s)
    assert rep.spinor_closed
    assert rep.iso_dims == (4, 4) and rep.iso_ok


def test_extend_section_tracks_moving_filtration():
    f = scaling_family()
    base = f.base_structure()
    s_poly = extend_section(f, -2, base.spinor)
    # the extension of e^{i omega} along sigma(t) = (1+t) omega is e^{i sigma(t)}
    want = f.omega_t.scale(I).exp()
    assert s_poly.eval((QI(Fraction(1, 2)),)) == want.eval((QI(Fraction(1, 2)),))

def test_transversality_scaling_family():
    f = scaling_family(samples=[(QI(Fraction(1, 2)),)])
    for p in (-2, 0):
        rep = transversality_check(f, p, 0)
        assert rep.skipped is None
        assert all(rep.samples_good.values())
        assert rep.transversal and rep.nabla_window_ok
        assert rep.proportional
    rep = transversality_check(f, -2, 0)
    assert rep.constant is not None and rep.constant != QI(0)

def test_transversality_constant_family():
    f = constant_symplectic_family()
    rep = transversality_check(f, -2, 0)
    assert rep.transversal and rep.proportional
    assert all(not v for v in rep.induced)

def test_transversality_complex_shear():
    f = shear_complex_family()
    rep = transversality_check(f, 0, 0)
    assert rep.skipped is None and rep.transversal and rep.nabla_window_ok
    assert rep.proportional

def test_transversality_constant_is_global():
    # one measured constant across models and kinds
    f1 = scaling_family(samples=[])
    f2 = shear_complex_family()
    c1 = transversality_check(f1, -2, 0).constant
    c2 = transversality_check(f1, 0, 0).constant
    c3 = transversality_check(f2, 0, 0).constant
    consts = {str(c) for c in (c1, c2, c3) if c is not None}
    assert len(consts) == 1

def test_transversality_skipped_without_ddbar():
    f = FamilySpec(KT_TW, "symplectic", 1, samples=[],
                   omega_t=PolyForm.from_form(
                       Form.blade(4, [1, 4]) + Form.blade(4, [2, 3]), 1),
                   B_t=PolyForm.from_form(-Form.blade(4, [3, 4]), 1))
    rep = transversality_check(f, 0, 0)
    assert rep.skipped is not None
