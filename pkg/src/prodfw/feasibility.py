"""Deciding whether the blocks of an instance intersect, via AFW on the intersection objective."""

from dataclasses import dataclass
import enum

import numpy as np

from ._validation import check_positive
from .objective import IntersectionObjective
from .solvers import SolverConfig, run_afw

INFEASIBILITY_MARGIN = 1e-12


class Status(str, enum.Enum):
    APPROX_FEASIBLE = "ApproxFeasible"
    INFEASIBLE = "Infeasible"
    UNDECIDED = "Undecided"

    def __str__(self):
        return self.value


EXIT_CODES = {Status.APPROX_FEASIBLE: 0, Status.INFEASIBLE: 1, Status.UNDECIDED: 2}


@dataclass
class FeasibilityVerdict:
    status: Status
    witness: np.ndarray = None
    lower_bound: float = None
    iterations: int = 0
    final_f: float = None
    final_gap: float = None
    final_x: np.ndarray = None

    def to_dict(self):
        return {
            "status": str(self.status),
            "witness": None if self.witness is None else self.witness.tolist(),
            "lower_bound": self.lower_bound,
            "iterations": self.iterations,
            "final_f": self.final_f,
            "final_gap": self.final_gap,
        }


def decide_feasibility(inst, eps, config=None, x0=None, margin=INFEASIBILITY_MARGIN):
    """Run AFW until the iterate is ``eps``-feasible or the dual bound is positive.

    At each iterate ``x_t`` (before the step) the running bound
    ``l_t = max_{s <= t} f(x_s) - gap(x_s)`` is updated. The run stops with
    ``ApproxFeasible`` when ``f(x_t) <= eps / (2k)``, with ``Infeasible`` when
    ``l_t > margin``, and ``Undecided`` after ``config.max_iters`` iterates.
    The gap tolerance of ``config`` is ignored.
    """
    eps = check_positive(eps, "eps")
    base = config or SolverConfig(max_iters=5000)
    cfg = SolverConfig(max_iters=base.max_iters, gap_tol=np.finfo(float).tiny,
                       step_rule=base.step_rule, smoothness_L=base.smoothness_L,
                       record_trace=base.record_trace, check_invariants=base.check_invariants)
    PP = inst.product() if hasattr(inst, "product") else inst
    obj = IntersectionObjective(PP.k, PP.n)
    threshold = obj.feasibility_threshold(eps)
    state = {"bound": -np.inf, "status": Status.UNDECIDED}

    def watch(t, x, f, gap):
        state["bound"] = max(state["bound"], f - gap)
        if f <= threshold:
            state["status"] = Status.APPROX_FEASIBLE
            return True
        if state["bound"] > margin:
            state["status"] = Status.INFEASIBLE
            return True
        return False

    it, trace = run_afw(obj, PP, x0, cfg, callback=watch)
    status = state["status"]
    x = it.x
    return FeasibilityVerdict(
        status=status,
        witness=obj.block_mean(x) if status is Status.APPROX_FEASIBLE else None,
        lower_bound=float(state["bound"]) if status is Status.INFEASIBLE else None,
        iterations=trace.n_iter,
        final_f=float(trace.final_f),
        final_gap=float(trace.final_gap),
        final_x=x,
    )
