from fractions import Fraction

import pytest

from affloop.modules import HWModule, in_radical_exact
from affloop.fields import (
    DeltaOperator,
    LoopOps,
    RSpace,
    annihilation_report,
    commutator_sweep,
    delta_report,
    f_power_membership,
    irreducibility_probe,
    loop_module_dims,
    maximal_submodule_report,
    nilpotent_field_report,
    nonvanishing_witness,
    path_independence_check,
    power_field_apply,
    prop26_exponent,
    radical_invariance_spot,
    standard_iff_report,
    verify_commutator_26,
)
from affloop.twist import construct_realization


def weyl_dimension(rs, hw_coords):
    """Independent oracle: Weyl dimension formula
    prod_{a > 0} <hw + rho, a> / <rho, a> for a weight given in
    simple-root coordinates."""
    # rho in root coordinates: solve <rho, alpha_i^v> = 1 for all i
    from affloop.linalg import solve_dense
    n = rs.rank
    mat = [[2 * rs.pairing(rs.simple_roots[j], rs.simple_roots[i])
            / rs.norm(rs.simple_roots[i]) for j in range(n)]
           for i in range(n)]
    rho = solve_dense(mat, [Fraction(1)] * n)
    num = den = Fraction(1)
    for al in rs.positive_roots:
        rp = sum(Fraction(r) * rs.pairing(
            tuple(1 if t == j else 0 for t in range(n)), al)
            for j, r in enumerate(rho))
        hp = sum(Fraction(h) * rs.pairing(
            tuple(1 if t == j else 0 for t in range(n)), al)
            for j, h in enumerate(hw_coords))
        num *= hp + rp
        den *= rp
    return num / den


def test_rspace_dimension_weyl_oracle():
    real = construct_realization("A2", 1)
    R = RSpace(real, 1)
    hw2theta = tuple(2 * c for c in real.rs.theta)
    assert weyl_dimension(real.rs, hw2theta) == 27
    assert R.dim == 27
    # untwisted A1, k = 1: V(2 theta) of sl2 is 5-dimensional
    real1 = construct_realization("A1", "untwisted")
    assert weyl_dimension(real1.rs, (2,)) == 5
    assert RSpace(real1, 1).dim == 5


def test_rspace_sigma_homogeneous():
    for label, case in [("A2", 1), ("A1", "untwisted")]:
        real = construct_realization(label, case)
        assert RSpace(real, 1).verify_sigma_homogeneous()


def test_power_field_k0_reduces_to_plain_coefficient():
    real = construct_realization("A1", "untwisted")
    M = HWModule(real, "verma", labels=(1, 0), depth_q=3)
    th = real.theta_eig
    v = M.apply_gen_power("f", 0, 1)
    for nq in range(-3, 3):
        plain = M.act_terms([((nq, th), 1)], v)
        power = power_field_apply(M, th, 1, nq, v)
        assert plain == power


def test_field_coefficients_annihilate_beyond_depth():
    real = construct_realization("A2", 1)
    M = HWModule(real, "verma", labels=(0, 1), depth_q=3)
    v = M.highest_weight_vector()
    # coefficients with positive mode kill the highest-weight vector
    for b in range(real.n_eig):
        for q in range(1, 4):
            if real.eig_class[b] == q % real.T:
                assert M.act_terms([((q, b), 1)], v) == {}


def test_eq26_small_grid_exact_dict_checker():
    real = construct_realization("A1", "untwisted")
    M = HWModule(real, "verma", labels=(1, 0), depth_q=2)
    R = RSpace(real, 1)
    ops = LoopOps(R, M)
    monos = [m for key in M.window_blocks(2, Fraction(6))
             for m in M.block_basis(key)]
    for b in range(real.n_eig):
        for i in (0, R.dim - 1):
            for mq in (-1, 0, 1):
                for nq in (-1, 0, 1):
                    if ops.valid_index(i, nq):
                        assert verify_commutator_26(ops, b, i, mq, nq, monos)


def test_commutator_sweep_matrix_engine():
    real = construct_realization("A1", "untwisted")
    rep = commutator_sweep(real, 1, (1, 0), depth_q=2,
                           psi_cap=Fraction(8), m_bound_q=2)
    assert rep["status"] == "pass" and rep["failures"] == 0
    assert rep["checks"] == 375


def test_path_independence():
    real = construct_realization("A1", "untwisted")
    assert path_independence_check(real, 1, (1, 0), depth_q=2,
                                   psi_cap=Fraction(6),
                                   n_range_q=range(-2, 3))


def test_class_vanishing_rule():
    # r_n = 0 unless n matches the sigma-class of r (Eq 2.5 consequence)
    real = construct_realization("A2", 1)
    M = HWModule(real, "verma", labels=(0, 1), depth_q=3)
    R = RSpace(real, 1)
    ops = LoopOps(R, M)
    v = M.apply_gen_power("f", 1, 1)
    for i in range(R.dim):
        for nq in range(-3, 4):
            if (nq - R.classes[i]) % real.T:
                assert ops.apply(i, nq, v) == {}


def test_annihilation_certificate_untwisted_a1():
    real = construct_realization("A1", "untwisted")
    rep = annihilation_report(real, 1, (1, 0), depth_q=3,
                              psi_cap=Fraction(8), direct_exact_depth=3)
    assert rep["status"] == "pass"
    names = {c["name"]: c["status"] for c in rep["checks"]}
    assert names["seeds_in_radical_exact"] == "pass"
    assert names["columns_in_radical_exact_small_depth"] == "pass"
    assert names["gram_times_operator_modp"] == "pass"


def test_radical_invariance_lemma_spot():
    real = construct_realization("A1", "untwisted")
    assert radical_invariance_spot(real, (1, 0), 3, Fraction(8))
    real2 = construct_realization("A2", 1)
    assert radical_invariance_spot(real2, (0, 1), 3, Fraction(8))


def test_maximal_cross_oracle_small():
    real = construct_realization("A1", "untwisted")
    rep = maximal_submodule_report(real, 1, (1, 0), depth_q=3,
                                   psi_cap=Fraction(8))
    assert rep["status"] == "pass"
    assert rep["all_blocks_match"] and rep["exact_blocks_consistent"]
    agg = rep["per_depth"]
    assert agg["0"]["dim_L"] == 1


def test_nonvanishing_witnesses():
    real = construct_realization("A2", 1)
    wit = nonvanishing_witness(real, 1, (0, 1), 3, on_quotient=False)
    assert wit is not None and wit["vector"]
    bad = nonvanishing_witness(real, 1, (1, -1), 3, on_quotient=True)
    assert bad is not None and bad["pairing_value"]


def test_standard_iff_small():
    real = construct_realization("A1", "untwisted")
    rep = standard_iff_report(real, 1, (1, 0), (2, -1), depth_q=3,
                              psi_cap=Fraction(8))
    assert rep["status"] == "pass"
    assert not rep["nonstandard_integrable"]


def test_nilpotent_field_a1():
    real = construct_realization("A1", "untwisted")
    rep = nilpotent_field_report(real, 1, real.rs.theta, depth_q=3,
                                 psi_cap=Fraction(8))
    assert rep["status"] == "pass" and rep["t"] == 1


def test_prop26_exponents():
    from affloop.finlie import root_system
    rs = root_system("G2")
    short = next(r for r in rs.positive_roots if not rs.is_long(r))
    assert prop26_exponent(rs, short) == 3
    assert prop26_exponent(rs, rs.theta) == 1
    rsb = root_system("B2")
    short_b = next(r for r in rsb.positive_roots if not rsb.is_long(r))
    assert prop26_exponent(rsb, short_b) == 2


def test_f_power_membership_singles():
    real = construct_realization("A2", 1)
    rep = f_power_membership(real, 1, 0)
    assert rep["status"] == "pass" and rep["t"] == 1
    real2 = construct_realization("A3", 2)
    rep2 = f_power_membership(real2, 1, 2)
    assert rep2["status"] == "pass" and rep2["t"] == 1


def test_delta_operator_identities():
    real = construct_realization("A1", "untwisted")
    rep = delta_report(real, 1, 4, {0: Fraction(-1, 4)}, powers=(1, 2))
    assert rep["status"] == "pass"
    # h = 0 gives the identity operator
    vac = HWModule(real, "vacuum", level=1, depth_q=3)
    delta0 = DeltaOperator(vac, {})
    for key in vac.window_blocks(3, Fraction(8)):
        for mono in vac.block_basis(key):
            assert delta0.apply({mono: 1}) == {Fraction(0): {mono: 1}}


def test_delta_eigen_exponent_value():
    # Delta(-h_theta/4) x_theta(-1)^p 1 = z^{-p/2} x_theta(-1)^p 1
    real = construct_realization("A1", "untwisted")
    vac = HWModule(real, "vacuum", level=2, depth_q=4)
    delta = DeltaOperator(vac, {0: Fraction(-1, 4)})
    th = real.theta_eig
    vec = vac.highest_weight_vector()
    for p in (1, 2, 3):
        vec = vac.act_terms([((-1, th), 1)], vec) if p > 1 else \
            vac.act_terms([((-1, th), 1)], vac.highest_weight_vector())
        vec_p = vac.highest_weight_vector()
        for _ in range(p):
            vec_p = vac.act_terms([((-1, th), 1)], vec_p)
        out = delta.apply(vec_p)
        assert out == {Fraction(-p, 2): vec_p}


def test_irreducibility_probe_and_trivial_counterexample():
    real = construct_realization("A1", "untwisted")
    probe = irreducibility_probe(real, 1, (1, 0), 2, Fraction(6),
                                 n_window_q=range(-1, 4))
    assert probe["status"] == "pass" and probe["generation_spans_R"]
    trivial = irreducibility_probe(real, 1, (1, 0), 2, Fraction(6),
                                   n_window_q=range(-2, 3), trivial=True)
    assert trivial["status"] == "fail"
    assert trivial["dim_R"] == 1 and not trivial["generation_spans_R"]


def test_loop_module_dims_shape():
    real = construct_realization("A1", "untwisted")
    rep = loop_module_dims(real, 1, (1, 0), 2, Fraction(6),
                           n_window_q=range(-1, 3))
    spans = rep["operator_span_dims"]
    assert all(0 <= v <= 5 for v in spans.values())
    assert any(v == 5 for v in spans.values())
