"""Pairing, Dorfman bracket, B-shifts, Clifford action, axiom suite."""

import random

from gchodge.courant import (GenElem, b_shift, b_shift_form, clifford_act,
                             courant_axiom_suite, dorfman, pairing,
                             random_gen_elem, random_real_form)
from gchodge.forms import Form
from gchodge.liemodel import LieModel
from gchodge.scalars import I, ONE, QI
from fractions import Fraction


ABELIAN = LieModel(4, [])
KT = LieModel(4, [(4, 1, 2, 1)])
KT_TW = LieModel(4, [(4, 1, 2, 1)], Form.blade(4, [1, 2, 3]))


def test_pairing_values():
    assert pairing(GenElem.x(4, 1), GenElem.e(4, 1)) == QI(Fraction(1, 2))
    assert pairing(GenElem.x(4, 1), GenElem.x(4, 2)) == QI(0)
    a = GenElem.x(4, 1) + GenElem.e(4, 1)
    assert pairing(a, a) == ONE

def test_dorfman_kt():
    out = dorfman(KT, GenElem.x(4, 1), GenElem.x(4, 2))
    assert out == -GenElem.x(4, 4)

def test_dorfman_kt_twisted():
    out = dorfman(KT_TW, GenElem.x(4, 1), GenElem.x(4, 2))
    assert out == -GenElem.x(4, 4) - GenElem.e(4, 3)

def test_dorfman_abelian():
    a = GenElem.x(4, 1) + GenElem.e(4, 2)
    b = GenElem.x(4, 3) + GenElem.e(4, 4)
    assert dorfman(ABELIAN, a, b).is_zero()

def test_b_shift_on_elements():
    B = Form.blade(4, [1, 2])
    assert b_shift(B, GenElem.x(4, 1)) == GenElem.x(4, 1) + GenElem.e(4, 2)
    a = GenElem.x(4, 3) + GenElem.e(4, 1)
    assert b_shift(Form(4), a) == a

def test_b_shift_on_forms():
    B = Form.blade(4, [1, 2])
    assert b_shift_form(B, Form.one(4)) == Form.one(4) + B

def test_b_shift_preserves_pairing():
    rng = random.Random(2)
    for _ in range(10):
        B = random_real_form(4, 2, rng)
        a, b = random_gen_elem(4, rng), random_gen_elem(4, rng)
        assert pairing(b_shift(B, a), b_shift(B, b)) == pairing(a, b)

def test_clifford_examples():
    a = GenElem.x(4, 1) + GenElem.e(4, 1)
    assert clifford_act(a, Form.one(4)) == Form.blade(4, [1])
    assert clifford_act(GenElem.x(4, 1), Form.blade(4, [1])) == Form.one(4)

def test_clifford_relation_random():
    rng = random.Random(3)
    for _ in range(20):
        a = random_gen_elem(4, rng)
        w = random_real_form(4, rng.randrange(5), rng)
        assert clifford_act(a, clifford_act(a, w)) == w.scale(pairing(a, a))

def test_d_H_e_B_conjugation():
    # d_H (e^B w) = e^B d_{H+dB} w on random forms
    rng = random.Random(4)
    for m in (KT, KT_TW):
        for _ in range(8):
            B = random_real_form(4, 2, rng)
            shifted = LieModel(m.dim, m.structure, m.H + m.d(B))
            w = random_real_form(4, rng.randrange(4), rng)
            assert m.d_H(b_shift_form(B, w)) == b_shift_form(B, shifted.d_H(w))

def test_axiom_suite_passes():
    for m in (ABELIAN, KT, KT_TW,
              LieModel(4, [], Form.blade(4, [1, 2, 3])),
              LieModel(6, [(6, 1, 2, 1)], Form.blade(6, [1, 3, 5]))):
        rep = courant_axiom_suite(m, samples=30)
        assert rep.ok, rep.first_failure()

def test_axiom_suite_detects_term_drop():
    # dropping the -i_Y d xi term breaks skewness (C4) on KT
    def corrupted(m, a, b):
        good = dorfman(m, a, b)
        dxi = m.d(a.cov_form()).contract_vector(b.vec)
        cov = list(good.cov)
        for mask, v in dxi.coeffs.items():
            i = mask.bit_length() - 1
            cov[i] = cov[i] + v
        return GenElem(m.dim, list(good.vec), cov)
    rep = courant_axiom_suite(KT, samples=30, bracket=corrupted)
    assert not rep.ok
    failed = {n for n, ok, _ in rep.checks if not ok}
    assert any("C1" in n or "C4" in n or "C5" in n for n in failed)

def test_axiom_suite_detects_twist_drop():
    # dropping i_X i_Y H yields the untwisted Courant algebroid, which passes
    # C1-C5; only the B-shift conjugation check sees the missing twist term.
    def untwisted(m, a, b):
        bare = LieModel(m.dim, m.structure)
        return dorfman(bare, a, b)
    rep = courant_axiom_suite(KT_TW, samples=30, bracket=untwisted)
    assert not rep.ok
    failed = {n for n, ok, _ in rep.checks if not ok}
    assert any("B-shift" in n for n in failed)
