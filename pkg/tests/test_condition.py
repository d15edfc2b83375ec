import math
import warnings

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest
from scipy.optimize import linprog
from sklearn.exceptions import ConvergenceWarning

from prodfw.condition import (affine_pyramidal_width, condition_report,
                              dist_affine_to_polytope, dist_polytope_to_polytope,
                              min_norm_point, product_pw_formula, product_pw_lower_bound,
                              product_vf, pyramidal_width, vertex_facet_distance)
from prodfw.polytope import VPolytope, affine_hull, cartesian_product
from prodfw.verify import random_convex_polytope

SQRT1_2 = 1 / math.sqrt(2)

seeds = st.integers(0, 2 ** 32 - 1)


def simplex_width(d):
    # pyramidal width of the probability simplex with d vertices
    return 2 / math.sqrt(d) if d % 2 == 0 else 2 / math.sqrt(d - 1 / d)


def hull_residual(V, z):
    m, d = V.shape
    cost = np.concatenate([np.zeros(m), np.ones(2 * d)])
    A_eq = np.block([[V.T, np.eye(d), -np.eye(d)],
                     [np.ones((1, m)), np.zeros((1, 2 * d))]])
    res = linprog(cost, A_eq=A_eq, b_eq=np.concatenate([z, [1.0]]), bounds=(0, None),
                  method="highs")
    assert res.status == 0
    return res.fun


def test_dist_affine_examples():
    origin = affine_hull([[0.0, 0.0]])
    assert dist_affine_to_polytope(origin, [[1, 0], [0, 1]]) == pytest.approx(SQRT1_2, abs=1e-12)
    x_axis = affine_hull([[0.0, 0.0], [1.0, 0.0]])
    assert dist_affine_to_polytope(x_axis, [[3, 2]]) == pytest.approx(2.0, abs=1e-12)
    assert dist_affine_to_polytope(x_axis, [[0, 1], [1, 2], [2, 1]]) == pytest.approx(1.0, abs=1e-12)


def test_dist_affine_dimension_mismatch():
    with pytest.raises(ValueError):
        dist_affine_to_polytope(affine_hull([[0.0, 0.0]]), [[1.0, 2.0, 3.0]])


def test_dist_polytope_examples():
    assert dist_polytope_to_polytope([[0, 0]], [[1, 0], [0, 1]]) == pytest.approx(SQRT1_2)
    assert dist_polytope_to_polytope([[0], [2]], [[1], [3]]) == pytest.approx(0.0, abs=1e-12)
    assert dist_polytope_to_polytope([[0.0]], [[1.0]]) == pytest.approx(1.0)


def test_min_norm_point_examples():
    z, r = min_norm_point([[1, 0], [0, 1]])
    assert np.allclose(z, [0.5, 0.5]) and r == pytest.approx(SQRT1_2)
    z, r = min_norm_point([[2, 0]])
    assert np.allclose(z, [2, 0]) and r == pytest.approx(2.0)
    z, r = min_norm_point([[-1, 0], [1, 0]])
    assert np.allclose(z, [0, 0], atol=1e-12) and r == pytest.approx(0.0, abs=1e-12)


def test_min_norm_point_unknown_method():
    with pytest.raises(ValueError):
        min_norm_point([[1.0]], method="simplex")


def test_min_norm_point_cap_warns_and_returns_iterate():
    V = np.random.default_rng(0).standard_normal((30, 5)) + 3.0
    with pytest.warns(ConvergenceWarning):
        z, r = min_norm_point(V, method="afw", max_iter=2)
    assert z.shape == (5,) and r == pytest.approx(np.linalg.norm(z))


@given(seeds, st.integers(1, 6), st.integers(1, 25))
def test_min_norm_point_kkt(seed, dim, m):
    rng = np.random.default_rng(seed)
    V = rng.standard_normal((m, dim)) * rng.uniform(0.1, 5) + rng.standard_normal(dim)
    z, r = min_norm_point(V)
    # optimality: no vertex lies strictly on the origin side of the plane through z
    assert (V @ z).min() >= z @ z - 1e-9 * max(1.0, np.abs(V).max() ** 2)
    # z is in the hull: minimize the L1 residual of a convex combination reproducing z
    assert hull_residual(V, z) <= 1e-9 * max(1.0, np.abs(V).max())


@given(seeds, st.integers(1, 4), st.integers(1, 12))
@settings(max_examples=25)
def test_min_norm_point_routes_agree(seed, dim, m):
    V = np.random.default_rng(seed).uniform(-1, 3, size=(m, dim))
    with warnings.catch_warnings():
        warnings.simplefilter("error", ConvergenceWarning)
        r_w = min_norm_point(V)[1]
        r_a = min_norm_point(V, method="afw")[1]
    # both stop at Frank-Wolfe gap 1e-12 of ||z||^2/2, so norms agree to ~sqrt(1e-12)
    assert abs(r_w - r_a) <= 2e-6


@given(seeds)
def test_min_norm_point_segment_closed_form(seed):
    a, b = np.random.default_rng(seed).standard_normal((2, 3))
    t = np.clip(-a @ (b - a) / ((b - a) @ (b - a)), 0, 1)
    assert min_norm_point([a, b])[1] == pytest.approx(np.linalg.norm(a + t * (b - a)), abs=1e-10)


def test_widths_canonical(segment, square, triangle, cube):
    assert pyramidal_width(segment) == pytest.approx(1.0)
    assert pyramidal_width(square) == pytest.approx(SQRT1_2)
    assert pyramidal_width(triangle) == pytest.approx(SQRT1_2)
    assert pyramidal_width(cube) == pytest.approx(1 / math.sqrt(3))
    assert affine_pyramidal_width(segment) == pytest.approx(1.0)
    assert affine_pyramidal_width(square) == pytest.approx(SQRT1_2)
    assert affine_pyramidal_width(triangle) == pytest.approx(SQRT1_2)
    assert vertex_facet_distance(segment) == pytest.approx(1.0)
    assert vertex_facet_distance(triangle) == pytest.approx(SQRT1_2)
    assert vertex_facet_distance(square) == pytest.approx(1.0)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_pyramidal_width_of_probability_simplex(d):
    P = VPolytope(np.eye(d))
    assert pyramidal_width(P) == pytest.approx(simplex_width(d), rel=1e-10)
    assert affine_pyramidal_width(P) == pytest.approx(simplex_width(d), rel=1e-10)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_pyramidal_width_of_unit_cube(d):
    P = VPolytope([list(v) for v in np.ndindex(*(2,) * d)])
    assert pyramidal_width(P) == pytest.approx(1 / math.sqrt(d), rel=1e-10)


def test_width_argmin_face(square):
    pw, face = pyramidal_width(square, return_face=True)
    assert len(face) == 1
    vf, facet = vertex_facet_distance(square, return_facet=True)
    assert len(facet) == 2


def test_widths_need_convex_position():
    with pytest.raises(ValueError):
        pyramidal_width([[0, 0], [2, 0], [0, 2], [0.5, 0.5]])
    with pytest.raises(ValueError):
        pyramidal_width([[1.0, 1.0]])


def test_condition_report(square):
    rep = condition_report(square)
    assert rep.pw == pytest.approx(SQRT1_2) and rep.apw == pytest.approx(SQRT1_2)
    assert rep.vf == pytest.approx(1.0)
    d = rep.to_dict()
    assert set(d) == {"pw", "apw", "vf", "argmin_face_pw", "argmin_facet_vf"}


@given(seeds, st.integers(2, 3), st.integers(3, 8))
@settings(max_examples=25)
def test_width_relations(seed, dim, m):
    P = random_convex_polytope(np.random.default_rng(seed), dim, m)
    rep = condition_report(P)
    assert rep.pw > 0
    assert abs(rep.pw - rep.apw) <= 1e-7
    assert rep.vf >= rep.pw - 1e-12


@given(seeds, st.floats(0.1, 10))
@settings(max_examples=20)
def test_width_scales_and_is_rigid_invariant(seed, c):
    rng = np.random.default_rng(seed)
    P = random_convex_polytope(rng, 3, 5)
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    moved = VPolytope(c * P.vertices @ Q.T + rng.standard_normal(3))
    assert pyramidal_width(moved) == pytest.approx(c * pyramidal_width(P), rel=1e-8)
    assert vertex_facet_distance(moved) == pytest.approx(c * vertex_facet_distance(P), rel=1e-8)


@given(seeds)
@settings(max_examples=10)
def test_width_routes_agree(seed):
    P = random_convex_polytope(np.random.default_rng(seed), 2, 5)
    assert pyramidal_width(P, method="afw") == pytest.approx(pyramidal_width(P), abs=1e-5)


def test_rectangle_width():
    a, b = 2.0, 3.0
    R = cartesian_product([[0.0], [a]], [[0.0], [b]])
    assert pyramidal_width(R) == pytest.approx(product_pw_formula(a, b))


def test_product_pw_formula_examples():
    assert product_pw_formula(1, 1) == pytest.approx(SQRT1_2)
    assert product_pw_formula(3, 4) == pytest.approx(2.4)
    assert product_pw_formula(0.7, math.inf) == 0.7
    assert product_pw_formula(0.7, 1e12) == pytest.approx(0.7)
    with pytest.raises(ValueError):
        product_pw_formula(0, 1)
    with pytest.raises(ValueError):
        product_pw_formula(1, -2)


@given(st.floats(0.01, 100), st.floats(0.01, 100), st.floats(1.0, 10))
def test_product_pw_formula_monotone_and_symmetric(a, b, s):
    assert product_pw_formula(a, b) == pytest.approx(product_pw_formula(b, a))
    assert product_pw_formula(a * s, b) >= product_pw_formula(a, b) * (1 - 1e-12)
    assert product_pw_formula(a, b) <= min(a, b)


def test_product_pw_lower_bound_examples():
    assert product_pw_lower_bound([1, 1, 1]) == pytest.approx(0.5)
    assert product_pw_lower_bound([0.7]) == pytest.approx(0.7 / math.sqrt(2))
    assert product_pw_lower_bound([3, 4]) == pytest.approx(1.5)
    assert product_pw_lower_bound([3, 4]) <= product_pw_formula(3, 4)
    with pytest.raises(ValueError):
        product_pw_lower_bound([])


@pytest.mark.parametrize("k", range(1, 40))
def test_lower_bound_exponent(k):
    assert product_pw_lower_bound([1.0] * k) == pytest.approx(
        math.sqrt(2) ** -math.ceil(math.log2(k + 1)))


def test_product_vf_examples():
    assert product_vf([1, 0.5]) == 0.5
    assert product_vf([1]) == 1
    assert product_vf([0.7071, 1, 1]) == 0.7071
    with pytest.raises(ValueError):
        product_vf([])
