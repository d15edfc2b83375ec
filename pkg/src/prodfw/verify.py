"""Property checks behind ``prodfw verify`` and the acceptance tests.

Each ``check_*`` function returns a :class:`CheckResult`; sizes are
parameters so the CLI can run a quick version of the same checks.
"""

from dataclasses import dataclass, field
import math
import time

import numpy as np

from .condition import (affine_pyramidal_width, product_pw_formula, product_pw_lower_bound,
                        product_vf, pyramidal_width, vertex_facet_distance)
from .experiment import run_solver
from .faces import extreme_indices
from .feasibility import Status, decide_feasibility
from .instances import generate, generate_disjoint
from .objective import IntersectionObjective
from .polytope import ProductPolytope, VPolytope, cartesian_product, diameter
from .solvers import SolverConfig, run_afw

PRODUCT_CAP = 36
ROUNDOFF = 1e-12


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        info = ", ".join(f"{k}={_short(v)}" for k, v in self.detail.items())
        return f"[{mark}] {self.name} ({self.seconds:.1f}s) {info}"


def _short(v):
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


def _timed(name, fn):
    t0 = time.perf_counter()
    passed, detail = fn()
    return CheckResult(name, bool(passed), detail, time.perf_counter() - t0)


# -- random small polytopes ---------------------------------------------------

def random_convex_polytope(rng, dim, m, min_sep=0.3):
    """``m`` points on a random ellipse/ellipsoid in ``R^dim`` (always in convex position).

    Point sets with two points closer than ``min_sep`` are resampled so the
    widths stay well away from zero.
    """
    while True:
        U = rng.standard_normal((m, dim))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        axes = rng.uniform(0.6, 1.6, size=dim)
        Q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
        V = (U * axes) @ Q.T + rng.uniform(-1, 1, size=dim)
        d = np.linalg.norm(V[:, None] - V[None], axis=2)
        if d[np.triu_indices(m, 1)].min() >= min_sep:
            return VPolytope(V)


def random_pairs(seed, count):
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(count):
        pair = []
        for _ in range(2):
            dim = int(rng.integers(2, 4))
            m = int(rng.integers(3, 7))
            pair.append(random_convex_polytope(rng, dim, m))
        pairs.append(tuple(pair))
    return pairs


def canonical_polytopes():
    return {
        "segment": VPolytope([[0.0], [1.0]]),
        "triangle": VPolytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        "square": VPolytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]),
        "cube": VPolytope([[i, j, l] for i in (0.0, 1.0) for j in (0.0, 1.0) for l in (0.0, 1.0)]),
    }


def random_tuples(seed, count):
    """Triples and quadruples of small polytopes whose product has at most 36 vertices."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        r = int(rng.choice([3, 4]))
        sizes = [int(rng.integers(2, 5)) for _ in range(r)]
        if math.prod(sizes) > PRODUCT_CAP:
            continue
        polys = []
        for m in sizes:
            dim = 1 if m == 2 else int(rng.integers(2, 4))
            if m == 2:
                a = rng.uniform(-1, 1)
                polys.append(VPolytope([[a], [a + rng.uniform(0.5, 2.0)]]))
            else:
                polys.append(random_convex_polytope(rng, dim, m))
        out.append(polys)
    return out


# -- criteria 1-4: composition rules -----------------------------------------

def check_product_pw(pairs, rtol=1e-6):
    def run():
        worst = 0.0
        for P, Q in pairs:
            lhs = pyramidal_width(cartesian_product(P, Q), cap=PRODUCT_CAP)
            rhs = product_pw_formula(pyramidal_width(P), pyramidal_width(Q))
            worst = max(worst, abs(lhs - rhs) / rhs)
        return worst <= rtol, {"pairs": len(pairs), "max_rel_err": worst}
    return _timed("product pyramidal width formula", run)


def _width_set(pairs):
    polys = list(canonical_polytopes().values())
    for P, Q in pairs:
        polys += [P, Q, cartesian_product(P, Q)]
    return polys


def check_pw_equals_apw(pairs, atol=1e-7):
    def run():
        worst = 0.0
        polys = _width_set(pairs)
        for P in polys:
            worst = max(worst, abs(pyramidal_width(P, cap=PRODUCT_CAP)
                                   - affine_pyramidal_width(P, cap=PRODUCT_CAP)))
        return worst <= atol, {"polytopes": len(polys), "max_abs_diff": worst}
    return _timed("pyramidal width equals affine pyramidal width", run)


def check_product_vf(pairs, atol=1e-9):
    def run():
        worst, slack = 0.0, math.inf
        for P, Q in pairs:
            PQ = cartesian_product(P, Q)
            vf_pq = vertex_facet_distance(PQ, cap=PRODUCT_CAP)
            worst = max(worst, abs(vf_pq - product_vf([vertex_facet_distance(P),
                                                       vertex_facet_distance(Q)])))
        for P in _width_set(pairs):
            slack = min(slack, vertex_facet_distance(P, cap=PRODUCT_CAP)
                        - pyramidal_width(P, cap=PRODUCT_CAP))
        # vf == pw exactly on simplices and segments, so allow round-off
        return worst <= atol and slack >= -ROUNDOFF, {"max_abs_err": worst, "min_vf_minus_pw": slack}
    return _timed("vertex-facet distance of products", run)


def check_kfold_bound(tuples, atol=1e-7):
    def run():
        ok = True
        worst_low, worst_high = math.inf, math.inf
        for polys in tuples:
            widths = [pyramidal_width(P) for P in polys]
            pw = pyramidal_width(cartesian_product(*polys), cap=PRODUCT_CAP)
            low = pw - product_pw_lower_bound(widths)
            high = min(widths) - pw
            worst_low, worst_high = min(worst_low, low), min(worst_high, high)
            ok &= low >= -atol and high >= -atol
        return ok, {"tuples": len(tuples), "min_pw_minus_lb": worst_low,
                    "min_minpw_minus_pw": worst_high}
    return _timed("k-fold product width bounds", run)


# -- criterion 5: objective identities ---------------------------------------

def check_objective_identities(seed, n_points=1000, ks=(2, 3, 5, 10), ns=(1, 2, 50)):
    def run():
        rng = np.random.default_rng(seed)
        combos = [(k, n) for k in ks for n in ns]
        err = {"grad_norm": 0.0, "mk_square": 0.0, "rayleigh": 0.0, "finite_diff": 0.0}
        for p in range(n_points):
            k, n = combos[p % len(combos)]
            obj = IntersectionObjective(k, n)
            x = rng.standard_normal(k * n) * rng.uniform(0.1, 10)
            f, g = obj.value(x), obj.gradient(x)
            err["grad_norm"] = max(err["grad_norm"], abs(g @ g - 2 * f) / max(2 * f, 1e-300))
            Mx = obj.apply_Mk(x)
            MMx = obj.apply_Mk(Mx)
            err["mk_square"] = max(err["mk_square"],
                                   np.linalg.norm(MMx - k * Mx) / max(np.linalg.norm(k * Mx), 1e-300))
            d = rng.standard_normal(k * n)
            err["rayleigh"] = max(err["rayleigh"], (d @ obj.hvp(d)) / (d @ d))
            h = 1e-6 * max(1.0, np.linalg.norm(x))
            fd = (obj.value(x + h * d) - obj.value(x - h * d)) / (2 * h)
            exact = g @ d
            err["finite_diff"] = max(err["finite_diff"],
                                     abs(fd - exact) / max(abs(exact), np.linalg.norm(g) * np.linalg.norm(d)))
        ok = (err["grad_norm"] <= 1e-12 and err["mk_square"] <= 1e-12
              and err["rayleigh"] <= 1 + 1e-9 and err["finite_diff"] <= 1e-5)
        return ok, {"points": n_points, **err}
    return _timed("intersection objective identities", run)


# -- criteria 6, 7, 11: AFW contraction and drop budget ----------------------

def contraction_instance(seed):
    """Disjoint k=2 instance in R^3 reduced to hull vertices, with delta, D and f*."""
    inst = generate_disjoint(2, 3, seed, (3, 6))
    blocks = [VPolytope(b).subset(extreme_indices(b)) for b in inst.blocks]
    PP = ProductPolytope(blocks)
    delta = pyramidal_width(cartesian_product(*blocks), cap=PRODUCT_CAP)
    D = PP.diameter()
    obj = IntersectionObjective(2, 3)
    ref_cfg = SolverConfig(max_iters=100_000, gap_tol=1e-12, step_rule="line_search",
                           record_trace=False)
    _, ref = run_afw(obj, PP, None, ref_cfg)
    return PP, obj, delta, D, float(ref.final_f)


def afw_contraction_run(seed, max_iters=1000, gap_tol=1e-10):
    PP, obj, delta, D, f_star = contraction_instance(seed)
    cfg = SolverConfig(max_iters=max_iters, gap_tol=gap_tol, step_rule="short_step",
                       check_invariants=True)
    it, trace = run_afw(obj, PP, None, cfg)
    return {"PP": PP, "delta": delta, "D": D, "f_star": f_star, "trace": trace, "iterate": it}


def contraction_violations(run):
    """Per-iteration and aggregate bound violations (lists of iteration indices)."""
    rho = run["delta"] ** 2 / (16.0 * run["D"] ** 2)
    f_star = run["f_star"]
    recs = run["trace"].records
    h = [r.f - f_star for r in recs]
    if recs:
        h.append(recs[-1].f_next - f_star)
    per_iter, aggregate = [], []
    for t, r in enumerate(recs):
        if h[t + 1] > (1 - min(r.big_lambda / 2, rho)) * h[t] + 1e-12:
            per_iter.append(t)
    for t in range(len(h)):
        if h[t] > h[0] * (1 - rho) ** math.ceil((t - 1) / 2) + 1e-12:
            aggregate.append(t)
    return per_iter, aggregate, rho


def check_afw_contraction(runs):
    def run():
        bad_step, bad_agg = 0, 0
        iters = 0
        for r in runs:
            p, a, _ = contraction_violations(r)
            bad_step += len(p)
            bad_agg += len(a)
            iters += len(r["trace"])
        return bad_step == 0 and bad_agg == 0, {"instances": len(runs), "iterations": iters,
                                                "per_step_violations": bad_step,
                                                "aggregate_violations": bad_agg}
    return _timed("AFW per-iteration contraction", run)


def check_drop_budget(runs):
    def run():
        worst = 0
        for r in runs:
            tr = r["trace"]
            drops = sum(rec.step_type == "drop" for rec in tr)
            worst = max(worst, drops - math.ceil(len(tr) / 2))
        return worst <= 0, {"instances": len(runs), "max_drops_over_budget": worst}
    return _timed("drop steps at most half of all iterations", run)


# -- criterion 8: feasibility soundness --------------------------------------

def feasibility_instances(seed, count=50, ks=(2, 3, 5), ns=(5, 20)):
    combos = [(k, n) for k in ks for n in ns]
    out = []
    for j in range(count):
        k, n = combos[(j // 2) % len(combos)]
        out.append(generate(k, n, seed + j, intersecting=bool(j % 2)))
    return out


def check_feasibility(instances, eps=1e-3, max_iters=5000):
    def run():
        wrong, worst_dist, iters = 0, 0.0, 0
        for inst in instances:
            v = decide_feasibility(inst, eps, SolverConfig(max_iters=max_iters))
            iters = max(iters, v.iterations)
            want = Status.APPROX_FEASIBLE if inst.intersecting else Status.INFEASIBLE
            if v.status is not want:
                wrong += 1
                continue
            if v.status is Status.APPROX_FEASIBLE:
                X = v.final_x.reshape(inst.k, inst.n)
                d = np.linalg.norm(X[:, None] - X[None], axis=2).max()
                worst_dist = max(worst_dist, float(d))
        ok = wrong == 0 and worst_dist <= math.sqrt(eps)
        return ok, {"instances": len(instances), "wrong_verdicts": wrong,
                    "max_pairwise_dist": worst_dist, "sqrt_eps": math.sqrt(eps),
                    "max_iterations": iters}
    return _timed("feasibility verdicts match ground truth", run)


# -- criterion 9: solver race ------------------------------------------------

def race(seed, n=200, max_iters=1000, gap_tol=1e-7):
    inst = generate_disjoint(2, n, seed)
    PP = inst.product()
    obj = IntersectionObjective(2, n)
    cfg = SolverConfig(max_iters=max_iters, gap_tol=gap_tol)
    out = {}
    for algo in ("fw", "afw", "cbcfw"):
        tr = run_solver(algo, obj, PP, cfg)
        hit = tr.iterations_to(gap_tol)
        out[algo] = math.inf if hit is None else hit
    out["vertices"] = [len(b) for b in inst.blocks]
    return out


def check_race(seeds, need=None, **kw):
    def run():
        rows = [race(s, **kw) for s in seeds]
        wins = sum(r["afw"] < math.inf and r["afw"] <= r["fw"] and r["afw"] <= r["cbcfw"]
                   for r in rows)
        required = need if need is not None else math.ceil(0.9 * len(rows))
        return wins >= required, {"instances": len(rows), "afw_wins": wins,
                                  "required": required,
                                  "afw_iters": [r["afw"] for r in rows]}
    return _timed("AFW needs no more iterations than FW and CBC-FW", run)


def run_suite(seed=0, quick=True):
    """Run every check at reduced (``quick``) or full acceptance size."""
    scale = {"pairs": 5, "tuples": 3, "points": 200, "contraction": 3, "feas": 12,
             "race": 2} if quick else {"pairs": 25, "tuples": 10, "points": 1000,
                                        "contraction": 10, "feas": 50, "race": 10}
    pairs = random_pairs(seed, scale["pairs"])
    runs = [afw_contraction_run(seed + j) for j in range(scale["contraction"])]
    results = [
        check_product_pw(pairs),
        check_pw_equals_apw(pairs),
        check_product_vf(pairs),
        check_kfold_bound(random_tuples(seed, scale["tuples"])),
        check_objective_identities(seed, scale["points"]),
        check_afw_contraction(runs),
        check_drop_budget(runs),
        check_feasibility(feasibility_instances(seed, scale["feas"])),
        check_race(range(seed, seed + scale["race"]), need=scale["race"] if quick else None,
                   n=50 if quick else 200),
    ]
    return results
