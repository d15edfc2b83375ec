from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays
import numpy as np
import pytest

from prodfw.objective import IntersectionObjective, LinearObjective, QuadraticObjective

sizes = st.tuples(st.integers(1, 8), st.integers(1, 6))
vals = st.floats(-1e3, 1e3, allow_nan=False)


def pairwise_value(X):
    k = len(X)
    return sum(np.sum((X[i] - X[j]) ** 2) for i in range(k) for j in range(i + 1, k)) / (2 * k)


def test_value_examples():
    assert IntersectionObjective(2, 1).value([1.0, 0.0]) == pytest.approx(0.25)
    assert IntersectionObjective(3, 1).value([0.0, 1.0, 2.0]) == pytest.approx(1.0)
    assert IntersectionObjective(4, 2).value(np.tile([3.0, -1.0], 4)) == 0.0


def test_gradient_examples():
    assert np.allclose(IntersectionObjective(3, 1).gradient([0.0, 1.0, 2.0]), [-1, 0, 1])
    assert np.allclose(IntersectionObjective(2, 1).gradient([1.0, 0.0]), [0.5, -0.5])
    assert np.all(IntersectionObjective(3, 2).gradient(np.tile([1.0, 2.0], 3)) == 0)


def test_apply_mk_examples():
    obj = IntersectionObjective(2, 1)
    assert np.allclose(obj.apply_Mk([1.0, 0.0]), [1, -1])
    assert np.allclose(obj.apply_Mk(obj.apply_Mk([1.0, 0.0])), [2, -2])
    assert np.allclose(IntersectionObjective(3, 2).apply_Mk(np.tile([5.0, 1.0], 3)), 0)


def test_feasibility_threshold():
    assert IntersectionObjective(2, 3).feasibility_threshold(0.1) == pytest.approx(0.025)
    assert IntersectionObjective(10, 1).feasibility_threshold(1.0) == pytest.approx(0.05)
    th = [IntersectionObjective(3, 1).feasibility_threshold(e) for e in (1, 1e-3, 1e-9)]
    assert th == sorted(th, reverse=True)
    with pytest.raises(ValueError):
        IntersectionObjective(2, 1).feasibility_threshold(0.0)


@pytest.mark.parametrize("method", ["value", "gradient", "apply_Mk"])
def test_dimension_mismatch(method):
    with pytest.raises(ValueError):
        getattr(IntersectionObjective(2, 3), method)(np.zeros(5))


def test_constructor_validation():
    with pytest.raises(ValueError):
        IntersectionObjective(0, 2)


def test_constants():
    obj = IntersectionObjective(5, 3)
    assert obj.L == 1.0 and obj.mu == 1.0 and obj.is_quadratic


@given(sizes.flatmap(lambda s: st.tuples(st.just(s), arrays(np.float64, s[0] * s[1], elements=vals))))
def test_value_matches_pairwise_definition(args):
    (k, n), x = args
    obj = IntersectionObjective(k, n)
    ref = pairwise_value(x.reshape(k, n))
    assert obj.value(x) == pytest.approx(ref, rel=1e-9, abs=1e-9)
    assert obj.value(x) >= 0
    # f = <M_k x, x> / 2k
    assert obj.value(x) == pytest.approx(obj.apply_Mk(x) @ x / (2 * k), rel=1e-9, abs=1e-6)


@given(sizes, st.integers(0, 2 ** 32 - 1))
def test_gradient_identities(size, seed):
    k, n = size
    obj = IntersectionObjective(k, n)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(k * n)
    g = obj.gradient(x)
    assert g @ g == pytest.approx(2 * obj.value(x), rel=1e-12, abs=1e-300)
    assert np.allclose(g, obj.apply_Mk(x) / k)
    # hessian is an orthogonal projector: eigenvalues 0 and 1
    H = np.column_stack([obj.hvp(e) for e in np.eye(k * n)])
    assert np.allclose(H, H.T) and np.allclose(H @ H, H)
    d = rng.standard_normal(k * n)
    assert obj.value(x + d) == pytest.approx(obj.value(x) + g @ d + 0.5 * d @ obj.hvp(d))


def test_quadratic_objective():
    H = np.array([[2.0, 0.5], [0.5, 1.0]])
    b = np.array([1.0, -1.0])
    obj = QuadraticObjective(H, b)
    x = np.array([0.3, -0.2])
    assert obj.value(x) == pytest.approx(0.5 * x @ H @ x + b @ x)
    assert np.allclose(obj.gradient(x), H @ x + b)
    assert obj.L == pytest.approx(np.linalg.eigvalsh(H).max())
    with pytest.raises(ValueError):
        QuadraticObjective(np.array([[1.0, 0.0], [0.0, -1.0]]))


def test_linear_objective():
    obj = LinearObjective([1.0, 2.0])
    assert obj.value([3.0, 4.0]) == pytest.approx(11.0)
    assert np.allclose(obj.gradient([0.0, 0.0]), [1.0, 2.0])
    assert obj.L == 0.0
