import random
from fractions import Fraction

import pytest

from affloop.affine import (
    AffineElement,
    GradingError,
    affine_bracket,
    affine_generators,
    nu_degree,
    triangular_part,
)
from affloop.twist import construct_realization


def _real_a2c1():
    return construct_realization("A2", 1)


def test_grading_compatibility_enforced():
    real = _real_a2c1()
    th = real.theta_eig          # class 1: x_theta lives at odd numerators
    AffineElement(real, {(1, th): 1})
    with pytest.raises(GradingError):
        AffineElement(real, {(2, th): 1})


def test_bracket_theta_pair_with_central_term():
    real = _real_a2c1()
    th, nth = real.theta_eig, real.neg_theta_eig
    a = AffineElement(real, {(1, th): 1})        # x_theta(1/2)
    b = AffineElement(real, {(-1, nth): 1})      # x_{-theta}(-1/2)
    out = affine_bracket(a, b)
    # [x_th(1/2), x_{-th}(-1/2)] = h_theta(0) + (1/2)<x_th, x_-th> c
    assert out.c == Fraction(1, 2)
    htheta = real.to_eigen(real.alg.h_of_root(real.rs.theta))
    assert out.terms == {(0, k): v for k, v in htheta.items()}


def test_central_element_is_central():
    real = _real_a2c1()
    gens = affine_generators(real)
    c = AffineElement.central(real)
    for other in gens.e + gens.f + gens.h + [gens.d]:
        assert affine_bracket(c, other).is_zero()


def test_d_action_grades():
    real = _real_a2c1()
    gens = affine_generators(real)
    e0 = gens.e[0]
    out = affine_bracket(gens.d, e0)
    # [d, E_0 (x) t^{s_0/T}] = (s_0/T) E_0 (x) t^{s_0/T}
    assert out == e0.scale(Fraction(real.s[0], real.T))


def test_generator_relations():
    for label, case in [("A2", 1), ("A1", "untwisted"), ("D4", 5)]:
        real = construct_realization(label, case)
        gens = affine_generators(real)
        for j in range(real.ell + 1):
            assert affine_bracket(gens.e[j], gens.f[j]) == gens.h[j]
        for i in range(real.ell + 1):
            for j in range(real.ell + 1):
                lhs = affine_bracket(gens.h[i], gens.e[j])
                assert lhs == gens.e[j].scale(Fraction(real.A[i][j]))
                lhs = affine_bracket(gens.h[i], gens.f[j])
                assert lhs == gens.f[j].scale(Fraction(-real.A[i][j]))


def test_canonical_central_element():
    for label, case in [("A2", 1), ("A3", 2), ("A1", "untwisted")]:
        real = construct_realization(label, case)
        gens = affine_generators(real)
        total = AffineElement(real)
        for j in range(real.ell + 1):
            total = total.add(gens.h[j], Fraction(real.comarks[j]))
        assert total == AffineElement.central(real)


def test_jacobi_sampled_with_central_and_d():
    real = _real_a2c1()
    rng = random.Random(7)
    pool = []
    for q in range(-2, 3):
        for b in range(real.n_eig):
            if real.eig_class[b] == q % real.T:
                pool.append(AffineElement(real, {(q, b): 1}))
    pool.append(AffineElement.central(real))
    pool.append(AffineElement.derivation(real))
    for _ in range(60):
        a, b, c = (rng.choice(pool) for _ in range(3))
        j1 = affine_bracket(affine_bracket(a, b), c)
        j2 = affine_bracket(affine_bracket(b, c), a)
        j3 = affine_bracket(affine_bracket(c, a), b)
        assert j1.add(j2).add(j3).is_zero()
        assert affine_bracket(a, b).add(affine_bracket(b, a)).is_zero()


def test_triangular_decomposition():
    real = _real_a2c1()
    gens = affine_generators(real)
    for j in range(real.ell + 1):
        parts = triangular_part(gens.e[j])
        assert parts["neg"].is_zero() and parts["cartan"].is_zero()
        parts = triangular_part(gens.f[j])
        assert parts["pos"].is_zero() and parts["cartan"].is_zero()
    h = gens.h[0]
    parts = triangular_part(h)
    assert parts["pos"].is_zero() and parts["neg"].is_zero()
    assert parts["cartan"] == h
    # x_{-theta}(1/2) sits in n_+ (positive degree decides)
    nth = real.neg_theta_eig
    el = AffineElement(real, {(1, nth): 1})
    parts = triangular_part(el)
    assert parts["pos"] == el


def test_nu_degree_and_text_form():
    real = _real_a2c1()
    th, nth = real.theta_eig, real.neg_theta_eig
    el = AffineElement(real, {(1, th): 1, (-3, nth): Fraction(2)})
    degs = nu_degree(el)
    assert degs == {Fraction(1, 2): 1, Fraction(-3, 2): 1}
    text = el.text_form()
    assert "@1/2" in text and "@-3/2" in text


def test_degree_zero_piece_closes():
    real = _real_a2c1()
    zero_idx = [b for b in range(real.n_eig) if real.eig_class[b] == 0]
    for b1 in zero_idx:
        for b2 in zero_idx:
            el = affine_bracket(AffineElement(real, {(0, b1): 1}),
                                AffineElement(real, {(0, b2): 1}))
            assert all(q == 0 for (q, _b) in el.terms)
            assert not el.c
