import itertools
import random
from fractions import Fraction

import pytest

from affloop.finlie import (
    ChevalleyAlgebra,
    chevalley_algebra,
    element_add,
    root_system,
)


def test_a2_roots_and_theta():
    rs = root_system("A2")
    assert len(rs.roots) == 6
    assert rs.theta == (1, 1)


def test_d4_roots_and_theta():
    rs = root_system("D4")
    assert len(rs.roots) == 24
    assert rs.theta == (1, 2, 1, 1)


def test_e6_theta():
    rs = root_system("E6")
    assert rs.theta == (1, 2, 3, 2, 1, 2)


def test_unsupported_labels():
    for bad in ("H4", "B1", "C2", "E9", "X3", "A0"):
        with pytest.raises(ValueError):
            root_system(bad)


def test_classical_dimensions():
    assert chevalley_algebra(root_system("A2")).dim == 8
    assert chevalley_algebra(root_system("D4")).dim == 28
    assert chevalley_algebra(root_system("G2")).dim == 14


def test_a1_sl2_relations():
    alg = chevalley_algebra(root_system("A1"))
    a = (1,)
    assert alg.bracket(alg.x(a), alg.x((-1,))) == alg.h_of_root(a)
    assert alg.bracket(alg.h(0), alg.x(a)) == {alg.x_index(a): 2}


def test_a2_chevalley_integrality():
    alg = chevalley_algebra(root_system("A2"))
    out = alg.bracket(alg.x((1, 0)), alg.x((0, 1)))
    assert list(out) == [alg.x_index((1, 1))]
    assert abs(next(iter(out.values()))) == 1


def test_cartan_action_in_a2():
    alg = chevalley_algebra(root_system("A2"))
    out = alg.bracket(alg.h(0), alg.x((0, 1)))
    assert out == {alg.x_index((0, 1)): -1}


def test_bracket_antisymmetry_on_random_elements():
    alg = chevalley_algebra(root_system("B2"))
    rng = random.Random(1)
    for _ in range(10):
        a = {rng.randrange(alg.dim): Fraction(rng.randint(-3, 3))
             for _ in range(3)}
        b = {rng.randrange(alg.dim): Fraction(rng.randint(-3, 3))
             for _ in range(3)}
        assert alg.bracket(a, a) == {}
        lhs = alg.bracket(a, b)
        rhs = {k: -v for k, v in alg.bracket(b, a).items()}
        assert lhs == rhs


def test_form_normalization():
    for label in ("A2", "D4", "G2", "B3"):
        alg = chevalley_algebra(root_system(label))
        rs = alg.rs
        th = rs.theta
        assert alg.form(alg.x(th), alg.x(rs._neg(th))) == 1
        assert rs.norm(th) == 2
    alg = chevalley_algebra(root_system("A2"))
    assert alg.form(alg.x((1, 0)), alg.x((0, 1))) == 0


def test_alpha_of_h_alpha_is_two():
    for label in ("A3", "B3", "C3", "G2", "F4"):
        rs = root_system(label)
        for root in rs.roots:
            assert rs.coroot_eval(root, root) == 2


def _jacobi_ok(alg, i, j, k):
    t1 = alg.bracket(alg.bracket({i: 1}, {j: 1}), {k: 1})
    t2 = alg.bracket(alg.bracket({j: 1}, {k: 1}), {i: 1})
    t3 = alg.bracket(alg.bracket({k: 1}, {i: 1}), {j: 1})
    return element_add(element_add(t1, t2), t3) == {}


JACOBI_LABELS = ["A1", "A2", "A3", "A4", "B2", "B3", "C3", "D4", "G2"]


@pytest.mark.parametrize("label", JACOBI_LABELS)
def test_jacobi_exhaustive_small(label):
    alg = chevalley_algebra(root_system(label))
    for i, j, k in itertools.combinations(range(alg.dim), 3):
        assert _jacobi_ok(alg, i, j, k), (label, i, j, k)


@pytest.mark.slow
@pytest.mark.parametrize("label", ["A5", "A6", "B4", "C4", "D5", "D6", "F4",
                                   "B5", "B6", "C5", "C6", "E6"])
def test_jacobi_exhaustive_rank_up_to_six(label):
    alg = chevalley_algebra(root_system(label))
    for i, j, k in itertools.combinations(range(alg.dim), 3):
        assert _jacobi_ok(alg, i, j, k), (label, i, j, k)


@pytest.mark.parametrize("label", ["A2", "B2", "D4", "G2"])
def test_form_invariance_exhaustive(label):
    alg = chevalley_algebra(root_system(label))
    dim = alg.dim
    for i in range(dim):
        for j in range(dim):
            bij = alg.bracket({i: 1}, {j: 1})
            for k in range(dim):
                lhs = alg.form(bij, {k: 1})
                rhs = alg.form({i: 1}, alg.bracket({j: 1}, {k: 1}))
                assert lhs == rhs, (label, i, j, k)


def test_weyl_reflection_preserves_constants_up_to_sign():
    alg = chevalley_algebra(root_system("A2"))
    rs = alg.rs

    def reflect(root, i):
        c = sum(rs.cartan[i][j] * root[j] for j in range(rs.rank))
        out = list(root)
        out[i] -= c
        return tuple(out)

    for i in range(rs.rank):
        for al in rs.roots:
            for be in rs.roots:
                ga = rs._add(al, be)
                if ga in rs.root_set:
                    a, b = reflect(al, i), reflect(be, i)
                    assert abs(alg.n_const(al, be)) == abs(alg.n_const(a, b))


def test_rescaled_algebra_still_chevalley():
    alg = chevalley_algebra(root_system("A2"))
    rs = alg.rs
    flips = {}
    for r in rs.roots:
        flips[r] = -1 if abs(r[0]) == 1 and r[1] == 0 else 1
    alg2 = alg.rescaled(flips)
    for al in rs.roots:
        for be in rs.roots:
            if rs._add(al, be) in rs.root_set:
                assert abs(alg2.n_const(al, be)) == abs(alg.n_const(al, be))
        assert alg2.bracket(alg2.x(al), alg2.x(rs._neg(al))) == \
            alg2.h_of_root(al)


def test_json_dump_shape():
    alg = chevalley_algebra(root_system("A1"))
    blob = alg.to_json()
    assert blob["type"] == "A1" and blob["dim"] == 3
    assert {"basis", "brackets", "form"} <= set(blob)
