"""Frank-Wolfe variants over product polytopes.

All solvers move along ``x_{t+1} = x_t - lambda_t * d_t`` where ``d_t`` has
``<grad f(x_t), d_t> >= 0``: ``d_t = x_t - w_t`` for a Frank-Wolfe step
towards the LMO vertex ``w_t`` and ``d_t = a_t - x_t`` for an away step from
the active vertex ``a_t``. Product vertices are identified by tuples of
per-block vertex indices.
"""

from dataclasses import dataclass, field
import time

import numpy as np

from ._validation import check_vector
from .polytope import ProductPolytope, _product_scores
from .trace import StepRecord, Trace

WEIGHT_FLOOR = 1e-14
WEIGHT_SUM_TOL = 1e-9
RECONSTRUCTION_TOL = 1e-7
STEP_RULES = ("short_step", "line_search")


class ActiveSetError(RuntimeError):
    """Active-set bookkeeping broke an invariant. Always a bug."""


@dataclass
class SolverConfig:
    max_iters: int = 1000
    gap_tol: float = 1e-7
    step_rule: str = None  # None: line search for quadratics, short step otherwise
    smoothness_L: float = None  # None: take the objective's L
    record_trace: bool = True
    check_invariants: bool = True

    def __post_init__(self):
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")
        if not self.gap_tol > 0:
            raise ValueError("gap_tol must be > 0")
        if self.step_rule is not None and self.step_rule not in STEP_RULES:
            raise ValueError(f"step_rule must be one of {STEP_RULES}, got {self.step_rule!r}")

    def resolve(self, obj):
        rule = self.step_rule or ("line_search" if obj.is_quadratic else "short_step")
        L = obj.L if self.smoothness_L is None else float(self.smoothness_L)
        if rule == "short_step" and not np.isfinite(L):
            raise ValueError("short step needs a finite smoothness constant")
        if rule == "line_search" and not obj.is_quadratic:
            raise ValueError("exact line search is only available for quadratic objectives")
        return rule, L


@dataclass
class ActiveIterate:
    """Point of a product polytope with its convex-combination weights."""

    x: np.ndarray
    active: dict = field(default_factory=dict)

    @classmethod
    def from_vertex(cls, PP, index_tuple):
        index_tuple = tuple(int(i) for i in index_tuple)
        if len(index_tuple) != PP.k:
            raise ValueError(f"vertex id needs {PP.k} indices, got {len(index_tuple)}")
        for b, i in zip(PP.blocks, index_tuple):
            if not 0 <= i < b.n_vertices:
                raise IndexError(f"vertex index {i} out of range")
        return cls(PP.vertex(index_tuple), {index_tuple: 1.0})

    def reconstruct(self, PP):
        keys = list(self.active)
        w = np.fromiter((self.active[k] for k in keys), float, len(keys))
        return w @ PP.vertex_matrix(keys)

    def check(self, PP, sum_tol=WEIGHT_SUM_TOL, recon_tol=RECONSTRUCTION_TOL):
        w = np.fromiter(self.active.values(), float, len(self.active))
        if len(w) == 0 or np.any(w < 0):
            raise ActiveSetError("active weights must be non-empty and non-negative")
        if abs(w.sum() - 1.0) > sum_tol:
            raise ActiveSetError(f"active weights sum to {w.sum()!r}")
        err = float(np.linalg.norm(self.reconstruct(PP) - self.x))
        if err > recon_tol:
            raise ActiveSetError(f"iterate differs from its active-set combination by {err:.3e}")
        return err


def _start(PP, x0):
    if x0 is None:
        return ActiveIterate.from_vertex(PP, (0,) * PP.k)
    if isinstance(x0, ActiveIterate):
        return ActiveIterate(np.array(x0.x, dtype=float), dict(x0.active))
    return ActiveIterate.from_vertex(PP, x0)


def fw_gap(obj, PP, x):
    """``max_{v in PP} <grad f(x), x - v>``."""
    x = check_vector(x, PP.dim_ambient, "x")
    g = obj.gradient(x)
    scores, w = _product_scores(PP, g)
    return float(g @ x - sum(s[i] for s, i in zip(scores, w)))


def short_step(g, d, cap, L):
    """``min(cap, <g, d> / (L ||d||^2))``."""
    dd = float(np.dot(d, d))
    if dd == 0.0:
        raise ValueError("zero direction")
    gd = max(float(np.dot(g, d)), 0.0)
    if gd == 0.0:
        return 0.0
    if L == 0.0:
        return float(cap)
    return min(float(cap), gd / (L * dd))


def exact_line_search_quadratic(obj, x, d, cap, g=None):
    """Exact minimizer of ``f(x - lambda d)`` over ``[0, cap]`` for a quadratic ``f``."""
    g = obj.gradient(x) if g is None else g
    curv = float(d @ obj.hvp(d))
    if curv <= 1e-15 * float(d @ d):
        return float(cap)
    return float(np.clip(float(g @ d) / curv, 0.0, cap))


def _step(obj, rule, L, x, g, d, cap):
    if rule == "short_step":
        return short_step(g, d, cap, L)
    return exact_line_search_quadratic(obj, x, d, cap, g=g)


def _floor_weights(active):
    dead = [v for v, w in active.items() if w < WEIGHT_FLOOR]
    for v in dead:
        del active[v]
    total = sum(active.values())
    for v in active:
        active[v] /= total


class _Clock:
    def __init__(self):
        self.t0 = time.perf_counter()

    def __call__(self):
        return time.perf_counter() - self.t0


def _finish(trace, obj, PP, x, converged, n_iter, gap=None):
    trace.final_x = x
    trace.final_f = obj.value(x)
    trace.final_gap = fw_gap(obj, PP, x) if gap is None else gap
    trace.converged = converged
    trace.n_iter = n_iter
    return trace


def run_fw(obj, PP, x0=None, config=None, callback=None):
    """Vanilla Frank-Wolfe. Returns ``(ActiveIterate, Trace)``.

    ``callback(t, x, f, gap)`` is called before each step; returning True stops.
    """
    config = config or SolverConfig()
    rule, L = config.resolve(obj)
    it = _start(PP, x0)
    x, active = it.x, it.active
    trace = Trace("fw", step_rule=rule)
    clock = _Clock()
    converged = False
    t = 0
    for t in range(config.max_iters):
        g = obj.gradient(x)
        scores, w = _product_scores(PP, g)
        gx = float(g @ x)
        gap = gx - sum(s[i] for s, i in zip(scores, w))
        f = obj.value(x)
        if callback is not None and callback(t, x, f, gap):
            return ActiveIterate(x, active), _finish(trace, obj, PP, x, False, t, gap)
        if gap <= config.gap_tol:
            converged = True
            break
        d = x - PP.vertex(w)
        lam = _step(obj, rule, L, x, g, d, 1.0)
        x = x - lam * d
        if lam >= 1.0:
            active = {w: 1.0}
        else:
            for v in active:
                active[v] *= 1.0 - lam
            active[w] = active.get(w, 0.0) + lam
            _floor_weights(active)
        if config.check_invariants:
            ActiveIterate(x, active).check(PP)
        if config.record_trace:
            trace.append(StepRecord(t, "fw", lam, 1.0, w, None, gap, f, gap, obj.value(x),
                                    len(active), clock()))
    else:
        t = config.max_iters
    return ActiveIterate(x, active), _finish(trace, obj, PP, x, converged, t,
                                             gap if converged else None)


def run_afw(obj, PP, x0=None, config=None, callback=None):
    """Away-step Frank-Wolfe with active-set refinement. Returns ``(ActiveIterate, Trace)``.

    ``x0`` is a product vertex id (tuple of block indices) or an
    :class:`ActiveIterate`. Away-vertex ties go to the lexicographically
    smallest id; a singleton active set always takes a Frank-Wolfe step.
    """
    config = config or SolverConfig()
    rule, L = config.resolve(obj)
    it = _start(PP, x0)
    x, active = it.x, it.active
    trace = Trace("afw", step_rule=rule)
    clock = _Clock()
    converged = False
    t = 0
    gap = None
    for t in range(config.max_iters):
        g = obj.gradient(x)
        scores, w = _product_scores(PP, g)
        gx = float(g @ x)
        gap = gx - sum(s[i] for s, i in zip(scores, w))
        f = obj.value(x)
        if callback is not None and callback(t, x, f, gap):
            return ActiveIterate(x, active), _finish(trace, obj, PP, x, False, t, gap)
        if gap <= config.gap_tol:
            converged = True
            break

        keys = sorted(active)
        a_scores = [sum(s[i] for s, i in zip(scores, v)) for v in keys]
        a = keys[int(np.argmax(a_scores))]
        away_gain = max(a_scores) - gx

        if len(active) == 1 or gap >= away_gain:
            step_type, cap = "fw", 1.0
            d = x - PP.vertex(w)
            align = gap
        else:
            gamma_a = active[a]
            step_type, cap = "away", gamma_a / (1.0 - gamma_a)
            d = PP.vertex(a) - x
            align = away_gain
        lam = _step(obj, rule, L, x, g, d, cap)
        x = x - lam * d

        if step_type == "fw":
            if lam >= 1.0:
                active = {w: 1.0}
            else:
                for v in active:
                    active[v] *= 1.0 - lam
                active[w] = active.get(w, 0.0) + lam
        else:
            for v in active:
                active[v] *= 1.0 + lam
            active[a] -= lam
            if lam >= cap:
                step_type = "drop"
                del active[a]
        _floor_weights(active)

        if config.check_invariants:
            ActiveIterate(x, active).check(PP)
        if config.record_trace:
            trace.append(StepRecord(t, step_type, lam, cap, w, a, align, f, gap, obj.value(x),
                                    len(active), clock()))
    else:
        t = config.max_iters
        gap = None
    return ActiveIterate(x, active), _finish(trace, obj, PP, x, converged, t,
                                             gap if converged else None)


def run_cbc_fw(obj, PP, x0=None, config=None, callback=None, blocks=None):
    """Cyclic block-coordinate Frank-Wolfe. Returns ``(x, Trace)``.

    Iteration ``t`` updates only block ``t mod k`` (or the blocks listed in
    ``blocks``, cycled), so one row of the trace is one block update. The
    full-product FW gap is still evaluated every iteration for stopping.
    """
    config = config or SolverConfig()
    rule, L = config.resolve(obj)
    it = _start(PP, x0)
    x = it.x.copy()
    block_active = [dict() for _ in range(PP.k)]
    for v, wt in it.active.items():
        for i, vi in enumerate(v):
            block_active[i][vi] = block_active[i].get(vi, 0.0) + wt
    order = list(range(PP.k)) if blocks is None else list(blocks)
    trace = Trace("cbcfw", step_rule=rule)
    clock = _Clock()
    converged = False
    t = 0
    for t in range(config.max_iters):
        g = obj.gradient(x)
        scores, w = _product_scores(PP, g)
        gx = float(g @ x)
        gap = gx - sum(s[i] for s, i in zip(scores, w))
        f = obj.value(x)
        if callback is not None and callback(t, x, f, gap):
            return x, _finish(trace, obj, PP, x, False, t, gap)
        if gap <= config.gap_tol:
            converged = True
            break
        i = order[t % len(order)]
        x, lam, align, block_active[i] = _block_fw_update(obj, rule, L, PP, x, g, i, w[i],
                                                          block_active[i])
        if config.check_invariants:
            _check_blocks(PP, x, block_active)
        if config.record_trace:
            trace.append(StepRecord(t, "fw", lam, 1.0, w, None, align, f, gap, obj.value(x),
                                    sum(len(a) for a in block_active), clock(), block=i))
    else:
        t = config.max_iters
    trace.block_active = block_active
    return x, _finish(trace, obj, PP, x, converged, t, gap if converged else None)


def _check_blocks(PP, x, block_active):
    n = PP.n
    for i, (b, act) in enumerate(zip(PP.blocks, block_active)):
        keys = list(act)
        single = ProductPolytope([b])
        ActiveIterate(x[i * n:(i + 1) * n], {(k,): act[k] for k in keys}).check(single)


def _block_fw_update(obj, rule, L, PP, x, g, i, w_i, act):
    """One Frank-Wolfe step restricted to block ``i``; returns (x, lam, align, act)."""
    n = PP.n
    sl = slice(i * n, (i + 1) * n)
    d = np.zeros_like(x)
    d[sl] = x[sl] - PP.blocks[i].vertices[w_i]
    align = float(g[sl] @ d[sl])
    lam = _step(obj, rule, L, x, g, d, 1.0) if align > 0.0 else 0.0
    x = x - lam * d
    if lam >= 1.0:
        act = {w_i: 1.0}
    elif lam > 0.0:
        for v in act:
            act[v] *= 1.0 - lam
        act[w_i] = act.get(w_i, 0.0) + lam
        _floor_weights(act)
    return x, lam, align, act


def run_alm(obj, PP, x0=None, y0=None, config=None, callback=None):
    """Alternating linear minimization over a two-block product. Returns the Trace.

    Iteration t updates block 0 with the gradient at ``(x_t, y_t)`` and then
    block 1 with the gradient at ``(x_{t+1}, y_t)``. One trace row is one
    such sweep; ``lambda`` holds the block-0 step and ``rec.lam_y`` the
    block-1 step. The final point is ``trace.final_x``.
    """
    if PP.k != 2:
        raise ValueError(f"alternating linear minimization needs exactly 2 blocks, got {PP.k}")
    config = config or SolverConfig()
    rule, L = config.resolve(obj)
    start = (0 if x0 is None else int(x0), 0 if y0 is None else int(y0))
    x = ActiveIterate.from_vertex(PP, start).x
    acts = [{start[0]: 1.0}, {start[1]: 1.0}]
    trace = Trace("alm", step_rule=rule)
    clock = _Clock()
    converged = False
    t = 0
    gap = None
    for t in range(config.max_iters):
        g = obj.gradient(x)
        scores, w = _product_scores(PP, g)
        gap = float(g @ x) - sum(s[i] for s, i in zip(scores, w))
        f = obj.value(x)
        if callback is not None and callback(t, x, f, gap):
            trace.block_active = acts
            return _finish(trace, obj, PP, x, False, t, gap)
        if gap <= config.gap_tol:
            converged = True
            break
        x, lam_x, align, acts[0] = _block_fw_update(obj, rule, L, PP, x, g, 0, w[0], acts[0])
        g = obj.gradient(x)
        z = int(np.argmin(PP.blocks[1].vertices @ g[PP.n:]))
        x, lam_y, _, acts[1] = _block_fw_update(obj, rule, L, PP, x, g, 1, z, acts[1])
        if config.check_invariants:
            _check_blocks(PP, x, acts)
        if config.record_trace:
            rec = StepRecord(t, "fw", lam_x, 1.0, (w[0], z), None, align, f, gap, obj.value(x),
                             len(acts[0]) + len(acts[1]), clock())
            rec.lam_y = lam_y
            trace.append(rec)
    else:
        t = config.max_iters
        gap = None
    trace.block_active = acts
    return _finish(trace, obj, PP, x, converged, t, gap if converged else None)
