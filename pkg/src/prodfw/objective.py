"""Smooth objectives consumed by the solvers."""

import numpy as np

from ._validation import check_positive, check_vector


class SmoothObjective:
    """Contract: ``value``, ``gradient``, smoothness ``L`` and PL constant ``mu``.

    Quadratic objectives also provide ``hvp`` (Hessian-vector product), which
    enables exact line search.
    """

    L = np.inf
    mu = 0.0
    is_quadratic = False

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def hvp(self, d):
        raise NotImplementedError(f"{type(self).__name__} has no Hessian-vector product")

    def __call__(self, x):
        return self.value(x)


class QuadraticObjective(SmoothObjective):
    """``<Hx, x> / 2 + <b, x>`` for a symmetric positive semidefinite ``H``."""

    is_quadratic = True

    def __init__(self, H, b=None, mu=0.0):
        H = np.atleast_2d(np.asarray(H, dtype=np.float64))
        if H.shape[0] != H.shape[1]:
            raise ValueError("H must be square")
        self.H = 0.5 * (H + H.T)
        self.b = np.zeros(H.shape[0]) if b is None else check_vector(b, H.shape[0], "b")
        eig = np.linalg.eigvalsh(self.H)
        if eig[0] < -1e-10 * max(1.0, abs(eig[-1])):
            raise ValueError("H must be positive semidefinite")
        self.L = float(max(eig[-1], 0.0))
        self.mu = float(mu)

    def value(self, x):
        x = check_vector(x, self.b.size, "x")
        return float(0.5 * x @ (self.H @ x) + self.b @ x)

    def gradient(self, x):
        return self.H @ check_vector(x, self.b.size, "x") + self.b

    def hvp(self, d):
        return self.H @ d


class LinearObjective(QuadraticObjective):
    def __init__(self, c):
        c = check_vector(c, name="c")
        super().__init__(np.zeros((c.size, c.size)), c)


class IntersectionObjective(SmoothObjective):
    """Mean pairwise squared distance between ``k`` block variables.

    ``f(x) = (1 / 2k) * sum_{i<j} ||x^i - x^j||^2 = <M_k x, x> / 2k`` with
    ``M_k = (k I - 1 1^T) kron I_n``. The Hessian ``M_k / k`` is an orthogonal
    projector, so ``L = 1``, and ``||grad f||^2 = 2 f`` gives the PL constant
    ``mu = 1``. Every operation is matrix-free in O(n k).
    """

    is_quadratic = True
    L = 1.0
    mu = 1.0

    def __init__(self, k, n):
        if int(k) != k or k < 1 or int(n) != n or n < 1:
            raise ValueError(f"k and n must be positive integers, got k={k}, n={n}")
        self.k = int(k)
        self.n = int(n)

    def __repr__(self):
        return f"IntersectionObjective(k={self.k}, n={self.n})"

    def _blocks(self, x):
        return check_vector(x, self.k * self.n, "x").reshape(self.k, self.n)

    def _deviation(self, x):
        X = self._blocks(x)
        dev = X - X.mean(axis=0)
        # second centring pass removes the O(eps * |x|) mean left by the first
        return dev - dev.mean(axis=0)

    def value(self, x):
        # sum_{i<j} ||x^i - x^j||^2 = k * sum_i ||x^i - mean||^2
        dev = self._deviation(x)
        return float(np.einsum("ij,ij->", dev, dev) / 2.0)

    def gradient(self, x):
        return self._deviation(x).reshape(-1)

    def apply_Mk(self, x):
        return (self.k * self._deviation(x)).reshape(-1)

    def hvp(self, d):
        return self.gradient(d)

    def block_mean(self, x):
        return self._blocks(x).mean(axis=0)

    def feasibility_threshold(self, eps):
        """Objective level below which every block is an ``eps``-feasible point."""
        return check_positive(eps, "eps") / (2 * self.k)
