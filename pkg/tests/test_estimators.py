import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from prodfw.estimators import (AlternatingLinearMinimization, AwayFrankWolfe,
                               BlockCoordinateFrankWolfe, ConditionNumbers, FeasibilitySolver,
                               FrankWolfe)
from prodfw.feasibility import Status
from prodfw.instances import generate
from prodfw.objective import QuadraticObjective

SOLVERS = [FrankWolfe, AwayFrankWolfe, BlockCoordinateFrankWolfe, AlternatingLinearMinimization]


@pytest.mark.parametrize("cls", SOLVERS)
def test_fit_on_instance(cls):
    inst = generate(2, 5, 3, intersecting=True)
    est = cls(max_iters=3000).fit(inst)
    assert est.f_ <= 1e-6 and est.x_.shape == (10,)
    assert est.solution_blocks().shape == (2, 5)
    assert est.n_iter_ == len(est.trace_)


@pytest.mark.parametrize("cls", SOLVERS)
def test_params_roundtrip(cls):
    est = cls(max_iters=7, step_rule="short_step")
    assert est.get_params()["max_iters"] == 7
    twin = clone(est).set_params(gap_tol=1e-3)
    assert twin.gap_tol == 1e-3 and twin.step_rule == "short_step"


def test_not_fitted():
    with pytest.raises(NotFittedError):
        AwayFrankWolfe().solution_blocks()


def test_custom_objective(square):
    obj = QuadraticObjective(np.eye(2), -np.array([0.25, 2.0]))
    est = AwayFrankWolfe(objective=obj).fit([square.vertices])
    assert np.allclose(est.x_, [0.25, 1.0], atol=1e-6)
    assert sum(est.active_set_.values()) == pytest.approx(1.0)


def test_feasibility_solver():
    assert FeasibilitySolver().fit_predict(generate(3, 4, 1)) is Status.INFEASIBLE
    est = FeasibilitySolver(eps=1e-2).fit(generate(3, 4, 1, intersecting=True))
    assert est.status_ is Status.APPROX_FEASIBLE and est.witness_.shape == (4,)


def test_condition_numbers_reduce_interior_points():
    pts = [[0, 0], [1, 0], [0, 1], [1, 1], [0.5, 0.5]]
    est = ConditionNumbers().fit(pts)
    assert est.vertex_indices_ == [0, 1, 2, 3]
    assert est.pw_ == pytest.approx(2 ** -0.5) and est.vf_ == pytest.approx(1.0)
    with pytest.raises(ValueError):
        ConditionNumbers(reduce=False).fit(pts)
