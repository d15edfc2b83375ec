"""Brute-force polytope condition numbers and their product composition rules.

Distances between convex hulls reduce to a minimum-norm-point problem over a
finite point set, solved here either by Wolfe's active-set method or by the
package's own away-step Frank-Wolfe.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np
from sklearn.exceptions import ConvergenceWarning

from ._validation import check_points, check_positive
from .faces import DEFAULT_CAP, Face, enumerate_proper_faces, facets
from .polytope import VPolytope, affine_hull

MNP_TOL = 1e-12


def _affine_min_weights(Q):
    """Weights of the minimum-norm point of ``aff(Q)`` (they sum to one)."""
    if Q.shape[0] == 1:
        return np.ones(1)
    B = (Q[1:] - Q[0]).T
    beta = np.linalg.lstsq(B, -Q[0], rcond=None)[0]
    return np.concatenate([[1.0 - beta.sum()], beta])


def _wolfe(points, tol, max_iter):
    """Wolfe's minimum-norm-point algorithm. Returns (z, gap, converged)."""
    norms2 = np.einsum("ij,ij->i", points, points)
    S = [int(np.argmin(norms2))]
    lam = np.array([1.0])
    z = points[S[0]].copy()
    gap = np.inf
    for _ in range(max_iter):
        scores = points @ z
        j = int(np.argmin(scores))
        gap = float(z @ z - scores[j])
        if gap <= tol:
            return z, gap, True
        if j in S:
            # no admissible improving point: z is optimal up to round-off
            return z, gap, True
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            alpha = _affine_min_weights(points[S])
            if np.all(alpha > 1e-15):
                lam = alpha
                break
            neg = alpha <= 1e-15
            denom = lam - alpha
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(neg, np.where(denom > 0, lam / denom, 0.0), np.inf)
            theta = float(np.clip(np.min(ratios), 0.0, 1.0))
            lam = lam + theta * (alpha - lam)
            keep = lam > 1e-15
            keep[int(np.argmin(ratios))] = False
            if not keep.any():
                keep[int(np.argmax(lam))] = True
            S = [s for s, kp in zip(S, keep) if kp]
            lam = lam[keep]
            lam = lam / lam.sum()
        z = lam @ points[S]
    return z, gap, False


def min_norm_point(V, method="wolfe", tol=MNP_TOL, max_iter=100_000):
    """Point of ``conv(V)`` closest to the origin.

    Returns ``(z, ||z||)``. ``method`` is ``"wolfe"`` (finite active-set
    method) or ``"afw"`` (away-step Frank-Wolfe on ``||z||^2 / 2`` with exact
    line search). Stops once the Frank-Wolfe gap of ``||z||^2 / 2`` is at most
    ``tol``; hitting ``max_iter`` first emits a :class:`ConvergenceWarning`
    and returns the last iterate.
    """
    V = check_points(V, name="V")
    if method == "wolfe":
        z, gap, ok = _wolfe(V, tol, max_iter)
    elif method == "afw":
        from .objective import QuadraticObjective
        from .polytope import ProductPolytope
        from .solvers import SolverConfig, run_afw

        PP = ProductPolytope([VPolytope(V)])
        obj = QuadraticObjective(np.eye(V.shape[1]), np.zeros(V.shape[1]))
        start = (int(np.argmin(np.einsum("ij,ij->i", PP.blocks[0].vertices,
                                         PP.blocks[0].vertices))),)
        it, trace = run_afw(obj, PP, start, SolverConfig(max_iters=max_iter, gap_tol=tol,
                                                         step_rule="line_search",
                                                         record_trace=False))
        z, gap, ok = it.x, trace.final_gap, trace.converged
    else:
        raise ValueError(f"unknown method {method!r}")
    if not ok:
        warnings.warn(f"min_norm_point stopped after {max_iter} iterations with gap {gap:.3e}",
                      ConvergenceWarning, stacklevel=2)
    return z, float(np.linalg.norm(z))


def dist_polytope_to_polytope(V1, V2, method="wolfe"):
    """``min ||x - y||`` over ``x in conv(V1)``, ``y in conv(V2)``."""
    V1 = check_points(V1, name="V1")
    V2 = check_points(V2, name="V2")
    if V1.shape[1] != V2.shape[1]:
        raise ValueError("point sets live in different dimensions")
    diff = (V1[:, None, :] - V2[None, :, :]).reshape(-1, V1.shape[1])
    return min_norm_point(diff, method=method)[1]


def dist_affine_to_polytope(A, V, method="wolfe"):
    """Distance between the affine subspace ``A`` and ``conv(V)``."""
    V = check_points(V, name="V")
    if V.shape[1] != A.dim_ambient:
        raise ValueError(f"V has dimension {V.shape[1]}, subspace lives in {A.dim_ambient}")
    return min_norm_point(A.residual(V), method=method)[1]


def dist_affine_to_points(A, V):
    """Distance between ``A`` and the nearest point of a finite set."""
    V = check_points(V, name="V")
    return float(A.distance(V).min())


@dataclass(frozen=True)
class ConditionReport:
    pw: float
    apw: float
    vf: float
    argmin_face_pw: Face
    argmin_facet_vf: Face

    def to_dict(self):
        return {
            "pw": self.pw,
            "apw": self.apw,
            "vf": self.vf,
            "argmin_face_pw": list(self.argmin_face_pw.vertex_indices),
            "argmin_facet_vf": list(self.argmin_facet_vf.vertex_indices),
        }


def _polytope(P):
    P = P if isinstance(P, VPolytope) else VPolytope(P)
    if P.n_vertices < 2:
        raise ValueError("condition numbers need at least two vertices")
    return P


def _faces(P, faces, cap):
    if faces is None:
        faces = enumerate_proper_faces(P, cap=cap)
        n_vert = sum(1 for f in faces if len(f) == 1)
        if n_vert != P.n_vertices:
            raise ValueError(f"only {n_vert} of {P.n_vertices} stored points are vertices; "
                             "condition numbers need points in convex position")
    return faces


def _complement(P, face):
    mask = np.ones(P.n_vertices, dtype=bool)
    mask[list(face.vertex_indices)] = False
    return P.vertices[mask]


def _pw_terms(P, faces, affine, method):
    V = P.vertices
    for f in faces:
        rest = _complement(P, f)
        if affine:
            d = dist_affine_to_polytope(affine_hull(V[list(f.vertex_indices)]), rest, method)
        else:
            d = dist_polytope_to_polytope(V[list(f.vertex_indices)], rest, method)
        yield d, f


def pyramidal_width(P, faces=None, cap=DEFAULT_CAP, method="wolfe", return_face=False):
    """Minimum over proper faces ``f`` of ``dist(f, conv(vert(P) minus vert(f)))``."""
    P = _polytope(P)
    best, face = min(_pw_terms(P, _faces(P, faces, cap), False, method), key=lambda t: t[0])
    return (best, face) if return_face else best


def affine_pyramidal_width(P, faces=None, cap=DEFAULT_CAP, method="wolfe", return_face=False):
    """Same minimization as :func:`pyramidal_width` with each face replaced by its affine hull."""
    P = _polytope(P)
    best, face = min(_pw_terms(P, _faces(P, faces, cap), True, method), key=lambda t: t[0])
    return (best, face) if return_face else best


def vertex_facet_distance(P, facet_list=None, cap=DEFAULT_CAP, return_facet=False):
    """Minimum over facets of the distance from the facet's affine hull to the outside vertices."""
    P = _polytope(P)
    if facet_list is None:
        facet_list = facets(P, cap=cap)
    V = P.vertices
    terms = [(dist_affine_to_points(affine_hull(V[list(F.vertex_indices)]), _complement(P, F)), F)
             for F in facet_list]
    best, facet = min(terms, key=lambda t: t[0])
    return (best, facet) if return_facet else best


def condition_report(P, cap=DEFAULT_CAP, method="wolfe"):
    P = _polytope(P)
    faces = _faces(P, None, cap)
    pw, f_pw = pyramidal_width(P, faces, method=method, return_face=True)
    apw = affine_pyramidal_width(P, faces, method=method)
    d = affine_hull(P.vertices).dim
    vf, f_vf = vertex_facet_distance(P, [f for f in faces if f.dim == d - 1], return_facet=True)
    return ConditionReport(pw, apw, vf, f_pw, f_vf)


def product_pw_formula(a, b):
    """Pyramidal width of ``P x Q`` from the widths ``a`` of ``P`` and ``b`` of ``Q``."""
    a = check_positive(a, "a") if not (isinstance(a, float) and math.isinf(a)) else a
    b = check_positive(b, "b") if not (isinstance(b, float) and math.isinf(b)) else b
    if math.isinf(a):
        return float(b)
    if math.isinf(b):
        return float(a)
    return a * b / math.hypot(a, b)


def product_pw_lower_bound(deltas):
    """``min(deltas) / sqrt(2) ** ceil(log2(k + 1))`` for a k-fold product."""
    deltas = [check_positive(d, "delta") for d in deltas]
    if not deltas:
        raise ValueError("need at least one block width")
    levels = len(deltas).bit_length()  # == ceil(log2(k + 1))
    return min(deltas) / math.sqrt(2.0) ** levels


def product_vf(vfs):
    """Vertex-facet distance of a product: the smallest factor value."""
    vfs = [check_positive(v, "vf") for v in vfs]
    if not vfs:
        raise ValueError("need at least one block value")
    return min(vfs)
