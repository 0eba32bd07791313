import random
from fractions import Fraction

import pytest

from affloop.affine import AffineElement, affine_generators
from affloop.linalg import nullspace_dense
from affloop.modules import (
    HWModule,
    TruncationOverflow,
    heisenberg_membership,
    in_radical_exact,
    integrability_check,
    standard_dims_exact,
)
from affloop.twist import construct_realization


def _pbw_counts(dims_per_q, upto):
    """Independent PBW oracle: coefficients of
    prod_m (1 - x^m)^(-dims_per_q[m])."""
    out = [Fraction(1)] + [Fraction(0)] * upto
    for m, d in dims_per_q.items():
        for _ in range(d):
            nxt = list(out)
            for i in range(m, upto + 1):
                nxt[i] += nxt[i - m]
            out = nxt
    return [int(x) for x in out]


def test_verma_basis_counts_match_generating_function():
    real = construct_realization("A2", 1)
    M = HWModule(real, "verma", labels=(0, 1), depth_q=6)
    dims = {q: sum(1 for b in range(real.n_eig)
                   if real.eig_class[b] == q % real.T)
            for q in range(1, 7)}
    oracle = _pbw_counts(dims, 6)
    got = [len(M.verma_basis(q)) for q in range(7)]
    assert got == oracle[:7]
    assert got[:3] == [1, 5, 18]


def test_verma_basis_depth_zero_and_overflow():
    real = construct_realization("A2", 1)
    M = HWModule(real, "verma", labels=(0, 1), depth_q=2)
    assert M.verma_basis(0) == ((),)
    with pytest.raises(TruncationOverflow):
        M.verma_basis(5)


def test_act_highest_weight_rules():
    real = construct_realization("A2", 1)
    M = HWModule(real, "verma", labels=(0, 1), depth_q=3)
    hw = M.highest_weight_vector()
    for j in range(2):
        fv = M.apply_gen_power("f", j, 1)
        ef = M.act_terms(M.gen_terms("e", j), fv)
        want = {(): M.labels[j]} if M.labels[j] else {}
        assert ef == want
    # e_j v = 0
    for j in range(2):
        assert M.act_terms(M.gen_terms("e", j), hw) == {}


def test_vacuum_central_action():
    for k in (1, 2):
        real = construct_realization("A1", "untwisted")
        V = HWModule(real, "vacuum", level=k, depth_q=3)
        one = V.highest_weight_vector()
        th, nth = real.theta_eig, real.neg_theta_eig
        low = V.act_terms([((-1, nth), 1)], one)
        out = V.act_terms([((1, th), 1)], low)
        assert out == {(): k}


def test_representation_property_random():
    real = construct_realization("A2", 1)
    M = HWModule(real, "verma", labels=(0, 1), depth_q=4)
    gens = affine_generators(real)
    pool = list(gens.e) + list(gens.f) + list(gens.h)
    for q in (-2, -1, 1, 2):
        for b in range(real.n_eig):
            if real.eig_class[b] == q % real.T:
                pool.append(AffineElement(real, {(q, b): 1}))
    rng = random.Random(3)
    vecs = [M.highest_weight_vector(),
            M.apply_gen_power("f", 0, 1),
            M.apply_gen_power("f", 1, 2),
            M.act_terms([((-3, real.theta_eig), 1)],
                        M.highest_weight_vector())]
    from affloop.affine import affine_bracket
    for _ in range(50):
        a, b = rng.choice(pool), rng.choice(pool)
        v = rng.choice(vecs)
        lhs = M.act_affine(a, M.act_affine(b, v))
        rhs = M.act_affine(b, M.act_affine(a, v))
        diff = dict(lhs)
        for kk, vv in rhs.items():
            w = diff.get(kk, 0) - vv
            if w:
                diff[kk] = w
            else:
                diff.pop(kk, None)
        want = M.act_affine(affine_bracket(a, b), v)
        assert diff == want


def test_depth_and_weight_grading():
    real = construct_realization("A2", 1)
    M = HWModule(real, "verma", labels=(0, 1), depth_q=4)
    v = M.apply_gen_power("f", 0, 2)
    key = M.vector_block(v)
    out = M.act_terms([((-1, real.theta_eig), 1)], v)
    key2 = M.vector_block(out)
    assert key2[0] == key[0] + 1
    wt_th = real.eig_weight[real.theta_eig]
    assert key2[1] == tuple(a + b for a, b in zip(key[1], wt_th))


def test_gram_depth_zero_and_symmetry():
    real = construct_realization("A2", 1)
    M = HWModule(real, "verma", labels=(0, 1), depth_q=3)
    assert M.gram_block((0, (0,))) == [[Fraction(1)]]
    for key in M.window_blocks(3, Fraction(6)):
        G = M.gram_block(key)
        n = len(G)
        for i in range(n):
            for j in range(n):
                assert G[i][j] == G[j][i]


def test_gram_nondegenerate_for_generic_weight():
    real = construct_realization("A1", "untwisted")
    M = HWModule(real, "verma", labels=(Fraction(1, 3), Fraction(2, 7)),
                 depth_q=2)
    for key in M.window_blocks(2, Fraction(6)):
        n = len(M.block_basis(key))
        assert M.gram_rank_exact(key) == n


def test_maximal_submodule_generators_a2c1():
    real = construct_realization("A2", 1)
    M = HWModule(real, "verma", labels=(0, 1), depth_q=3)
    seeds = M.maximal_submodule_generators()
    assert len(seeds) == 2
    # labels (0,1): f_0^1 v and f_1^2 v
    depths = sorted(key[0] for key, _vec in seeds)
    assert depths == [0, 1]
    for _key, vec in seeds:
        assert M.is_singular(vec)
        assert in_radical_exact(M, vec)
    with pytest.raises(ValueError):
        HWModule(real, "verma", labels=(-1, 1),
                 depth_q=2).maximal_submodule_generators()


def test_closure_of_hw_is_whole_module():
    real = construct_realization("A1", "untwisted")
    M = HWModule(real, "verma", labels=(1, 0), depth_q=3)
    window = M.window_blocks(3, Fraction(8))
    spaces = M.closure_exact([((0, (0,)), M.highest_weight_vector())],
                             window)
    for key in window:
        assert spaces[key].rank == len(M.block_basis(key))
    empty = M.closure_exact([], window)
    assert all(sp.rank == 0 for sp in empty.values())


def test_closure_matches_gram_nullity_small():
    real = construct_realization("A1", "untwisted")
    M = HWModule(real, "verma", labels=(1, 0), depth_q=3)
    window = M.window_blocks(3, Fraction(8))
    seeds = M.maximal_submodule_generators()
    spaces = M.closure_exact(seeds, window)
    for key in window:
        n = len(M.block_basis(key))
        assert spaces[key].rank == n - M.gram_rank_exact(key)


def test_standard_dims_match_basic_module_character():
    # level-1 A_1 basic module: depth dims are theta-series times partitions
    real = construct_realization("A1", "untwisted")
    M = HWModule(real, "verma", labels=(1, 0), depth_q=4)
    window = M.window_blocks(4, Fraction(12))
    dims = standard_dims_exact(M, window)
    per_depth = {}
    for (d, w), r in dims.items():
        per_depth[d] = per_depth.get(d, 0) + r
    assert [per_depth[d] for d in range(5)] == [1, 3, 4, 7, 13]


def test_integrability_check():
    real = construct_realization("A2", 1)
    assert integrability_check(HWModule(real, "verma", labels=(0, 1),
                                        depth_q=2))
    assert not integrability_check(HWModule(real, "verma", labels=(1, -1),
                                            depth_q=2))
    vac = HWModule(real.untwisted_companion(), "vacuum", level=1, depth_q=2)
    assert not integrability_check(vac)


def test_vacuum_singular_vector():
    for k in (1, 2):
        real = construct_realization("A2", 1)
        V = HWModule(real.untwisted_companion(), "vacuum", level=k,
                     depth_q=k + 1)
        th = real.untwisted_companion().theta_eig
        vec = V.highest_weight_vector()
        for _ in range(k + 1):
            vec = V.act_terms([((-1, th), 1)], vec)
        assert V.is_singular(vec)
        lower = V.act_terms([((-1, th), 1)], V.highest_weight_vector())
        if k > 1:
            assert not V.is_singular(lower)


def test_radical_is_submodule_small_scale():
    # the contravariance lemma behind the closure certificates
    real = construct_realization("A1", "untwisted")
    M = HWModule(real, "verma", labels=(1, 0), depth_q=3)
    for key in M.window_blocks(2, Fraction(8)):
        basis = M.block_basis(key)
        if not basis:
            continue
        G = M.gram_block(key)
        for coeffs in nullspace_dense(G, len(basis)):
            vec = {m: c for m, c in zip(basis, coeffs) if c}
            for sym in M.symbols:
                img = M.act_terms([(sym, 1)], vec)
                if img and M.vector_block(img)[0] <= 3:
                    assert in_radical_exact(M, img)


def test_adjoint_identity_exhaustive_small():
    # <x u, w> = <u, tau(x) w> over a small exhaustive grid
    real = construct_realization("A2", 1)
    M = HWModule(real, "verma", labels=(0, 1), depth_q=2)
    window = M.window_blocks(2, Fraction(5))
    pos = {}
    for key in window:
        basis = M.block_basis(key)
        G = M.gram_block(key)
        pos[key] = ({m: i for i, m in enumerate(basis)}, G)
    for sym in M.symbols:
        tau = M._tau_terms(sym)
        for key in window:
            basis = M.block_basis(key)
            for u in basis:
                xu = M.act_terms([(sym, 1)], {u: 1})
                if not xu:
                    continue
                ku = M.vector_block(xu)
                if ku not in pos:
                    continue
                posu, Gu = pos[ku]
                for w in M.block_basis(ku):
                    lhs = sum((Gu[posu[w]][posu[m]] * c
                               for m, c in xu.items()), Fraction(0))
                    tw = M.act_terms(tau, {w: 1})
                    posk, Gk = pos[key]
                    rhs = sum((Gk[posk[u]][posk[m]] * c
                               for m, c in tw.items()), Fraction(0))
                    assert lhs == rhs


def test_heisenberg_membership_spec_examples():
    ok, wit = heisenberg_membership(0)
    assert ok and list(wit) == [("x", 0, 0, 0)]
    ok, wit = heisenberg_membership(2)
    assert ok
    # (x+y)^2 = x^2 + 2xy - z + y^2: witness over {xy, y^2, z} u {x^2}
    kinds = {(k[0], k[1], k[2], k[3]) for k in wit}
    assert ("x", 1, 1, 0) in kinds or ("y", 1, 1, 0) in kinds
    for m in range(9):
        ok, _ = heisenberg_membership(m)
        assert ok
    with pytest.raises(ValueError):
        heisenberg_membership(11)


def test_act_affine_rejects_d_and_overflow():
    real = construct_realization("A2", 1)
    M = HWModule(real, "verma", labels=(0, 1), depth_q=2)
    d = AffineElement.derivation(real)
    with pytest.raises(ValueError):
        M.act_affine(d, M.highest_weight_vector())
