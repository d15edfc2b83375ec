import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from prodfw.experiment import reference_optimum
from prodfw.feasibility import Status, decide_feasibility
from prodfw.instances import Instance, generate
from prodfw.polytope import ProductPolytope
from prodfw.solvers import SolverConfig


def test_disjoint_singletons_infeasible():
    inst = Instance(2, 1, [[[0.0]], [[1.0]]])
    v = decide_feasibility(inst, 1e-3)
    assert v.status is Status.INFEASIBLE
    assert v.lower_bound == pytest.approx(0.25) and v.final_gap == 0.0


def test_identical_segments_feasible():
    inst = Instance(2, 1, [[[0.0], [1.0]], [[0.0], [1.0]]])
    eps = 1e-4
    v = decide_feasibility(inst, eps, x0=(1, 0))
    assert v.status is Status.APPROX_FEASIBLE
    assert 0.0 <= v.witness[0] <= 1.0 and v.final_f <= eps / 4


def test_zero_iterations_undecided():
    inst = Instance(2, 1, [[[0.0]], [[1.0]]])
    v = decide_feasibility(inst, 1e-3, SolverConfig(max_iters=0))
    assert v.status is Status.UNDECIDED and v.witness is None and v.lower_bound is None


def test_accepts_product_polytope(segment):
    v = decide_feasibility(ProductPolytope([segment, segment]), 0.1)
    assert v.status is Status.APPROX_FEASIBLE


def test_eps_must_be_positive():
    with pytest.raises(ValueError):
        decide_feasibility(Instance(2, 1, [[[0.0]], [[1.0]]]), 0.0)


def test_to_dict():
    d = decide_feasibility(Instance(2, 1, [[[0.0]], [[1.0]]]), 1e-3).to_dict()
    assert d["status"] == "Infeasible" and set(d) == {"status", "witness", "lower_bound",
                                                       "iterations", "final_f", "final_gap"}


@given(st.integers(0, 2 ** 32), st.sampled_from([2, 3, 5]), st.integers(1, 10),
       st.sampled_from([1e-1, 1e-2, 1e-3]))
@settings(max_examples=30)
def test_sound_against_ground_truth(seed, k, n, eps):
    for intersecting in (False, True):
        inst = generate(k, n, seed, intersecting)
        v = decide_feasibility(inst, eps, SolverConfig(max_iters=3000))
        if intersecting:
            assert v.status is not Status.INFEASIBLE
        else:
            assert v.status is not Status.APPROX_FEASIBLE
        if v.status is Status.APPROX_FEASIBLE:
            X = v.final_x.reshape(k, n)
            d2 = ((X[:, None] - X[None]) ** 2).sum(-1).max()
            assert d2 <= 2 * k * v.final_f + 1e-12
            assert v.final_f <= eps / (2 * k)
        if v.status is Status.INFEASIBLE:
            assert v.lower_bound > 0


@given(st.integers(0, 2 ** 32), st.sampled_from([2, 3]))
@settings(max_examples=15)
def test_dual_bound_below_optimum(seed, k):
    inst = generate(k, 3, seed)
    f_star = reference_optimum(inst)
    v = decide_feasibility(inst, 1e-3)
    assert v.lower_bound <= f_star + 1e-9
    assert v.final_f - v.final_gap <= f_star + 1e-9
