"""scikit-learn style wrappers around the solvers, the feasibility driver and the condition numbers.

``fit`` takes the feasible region rather than a data matrix: a
ProductPolytope, an Instance, or a list of per-block vertex arrays.
"""

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_blocks
from .condition import condition_report
from .faces import DEFAULT_CAP, extreme_indices
from .feasibility import decide_feasibility
from .objective import IntersectionObjective
from .polytope import VPolytope
from .solvers import ActiveIterate, SolverConfig, run_afw, run_alm, run_cbc_fw, run_fw


class _FrankWolfeBase(BaseEstimator):
    _algo = None

    def __init__(self, objective=None, max_iters=1000, gap_tol=1e-7, step_rule=None,
                 smoothness_L=None, record_trace=True, check_invariants=True):
        self.objective = objective
        self.max_iters = max_iters
        self.gap_tol = gap_tol
        self.step_rule = step_rule
        self.smoothness_L = smoothness_L
        self.record_trace = record_trace
        self.check_invariants = check_invariants

    def _config(self):
        return SolverConfig(max_iters=self.max_iters, gap_tol=self.gap_tol,
                            step_rule=self.step_rule, smoothness_L=self.smoothness_L,
                            record_trace=self.record_trace,
                            check_invariants=self.check_invariants)

    def _objective(self, PP):
        if self.objective is None:
            return IntersectionObjective(PP.k, PP.n)
        return self.objective

    def _run(self, obj, PP, x0, config):
        raise NotImplementedError

    def fit(self, X, y=None, x0=None):
        """Minimize the objective over the product of the blocks in ``X``."""
        PP = check_blocks(X)
        obj = self._objective(PP)
        result, trace = self._run(obj, PP, x0, self._config())
        self.product_ = PP
        self.objective_ = obj
        self.trace_ = trace
        self.x_ = trace.final_x
        self.active_set_ = result.active if isinstance(result, ActiveIterate) else None
        self.n_iter_ = trace.n_iter
        self.converged_ = trace.converged
        self.f_ = trace.final_f
        self.gap_ = trace.final_gap
        return self

    def solution_blocks(self):
        check_is_fitted(self, "x_")
        return self.product_.split(self.x_)


class FrankWolfe(_FrankWolfeBase):
    """Vanilla Frank-Wolfe."""

    def _run(self, obj, PP, x0, config):
        return run_fw(obj, PP, x0, config)


class AwayFrankWolfe(_FrankWolfeBase):
    """Away-step Frank-Wolfe; ``active_set_`` maps vertex-index tuples to weights."""

    def _run(self, obj, PP, x0, config):
        return run_afw(obj, PP, x0, config)


class BlockCoordinateFrankWolfe(_FrankWolfeBase):
    """Cyclic block-coordinate Frank-Wolfe; ``n_iter_`` counts block updates."""

    def _run(self, obj, PP, x0, config):
        x, trace = run_cbc_fw(obj, PP, x0, config)
        return x, trace


class AlternatingLinearMinimization(_FrankWolfeBase):
    """Two-block alternating linear minimization; ``n_iter_`` counts sweeps."""

    def _run(self, obj, PP, x0, config):
        x0, y0 = (None, None) if x0 is None else x0
        trace = run_alm(obj, PP, x0, y0, config)
        return trace.final_x, trace


class FeasibilitySolver(BaseEstimator):
    """Decide whether the blocks intersect up to ``eps``."""

    def __init__(self, eps=1e-3, max_iters=5000, step_rule=None):
        self.eps = eps
        self.max_iters = max_iters
        self.step_rule = step_rule

    def fit(self, X, y=None):
        PP = check_blocks(X)
        verdict = decide_feasibility(PP, self.eps, SolverConfig(max_iters=self.max_iters,
                                                               step_rule=self.step_rule))
        self.verdict_ = verdict
        self.status_ = verdict.status
        self.witness_ = verdict.witness
        self.lower_bound_ = verdict.lower_bound
        self.n_iter_ = verdict.iterations
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).status_


class ConditionNumbers(BaseEstimator):
    """Pyramidal width, affine pyramidal width and vertex-facet distance of one polytope.

    With ``reduce=True`` stored points that are not vertices are discarded
    first; ``vertex_indices_`` maps back to the input rows.
    """

    def __init__(self, cap=DEFAULT_CAP, method="wolfe", reduce=True):
        self.cap = cap
        self.method = method
        self.reduce = reduce

    def fit(self, X, y=None):
        P = X if isinstance(X, VPolytope) else VPolytope(X)
        idx = extreme_indices(P) if self.reduce else list(range(P.n_vertices))
        report = condition_report(P.subset(idx), cap=self.cap, method=self.method)
        self.vertex_indices_ = idx
        self.report_ = report
        self.pw_ = report.pw
        self.apw_ = report.apw
        self.vf_ = report.vf
        return self
