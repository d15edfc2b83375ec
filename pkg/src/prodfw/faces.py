"""Face enumeration for small V-polytopes.

Two enumeration routes are provided and cross-checked in the tests:

* ``"exhaustive"`` runs a supporting-hyperplane certificate LP on every
  non-empty proper vertex subset (hard cap on the vertex count).
* ``"recursive"`` computes facets in the affine hull of the current face and
  descends into them; a face of a face is a face.

Both require the stored vertex list to be in convex position.
"""

from dataclasses import dataclass
import itertools

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from .polytope import VPolytope, affine_hull

MARGIN_TOL = 1e-8
DEFAULT_CAP = 16
_PLANE_TOL = 1e-9


class FaceEnumerationError(ValueError):
    """Raised when a polytope is too large for brute-force face enumeration."""


@dataclass(frozen=True, order=True)
class Face:
    vertex_indices: tuple
    dim: int

    def __len__(self):
        return len(self.vertex_indices)


def _as_polytope(P):
    return P if isinstance(P, VPolytope) else VPolytope(P)


def face_certificate(P, S):
    """Solve the separation LP for vertex subset ``S``.

    Maximizes ``t`` subject to ``<w, v> = c`` on ``S``, ``<w, u> + t <= c``
    off ``S``, ``|w|_inf <= 1`` and ``t <= 1``. Returns ``(w, c, t)``.
    """
    P = _as_polytope(P)
    V = P.vertices
    m, n = V.shape
    S = sorted(set(int(i) for i in S))
    if not S:
        raise ValueError("vertex subset must be non-empty")
    if S[0] < 0 or S[-1] >= m:
        raise IndexError(f"vertex index out of range for a polytope with {m} vertices")
    inside = np.zeros(m, dtype=bool)
    inside[S] = True
    if inside.all():
        return np.zeros(n), 0.0, 1.0

    # variables: w (n), c, t ; minimize -t
    cost = np.zeros(n + 2)
    cost[-1] = -1.0
    A_eq = np.hstack([V[inside], -np.ones((inside.sum(), 1)), np.zeros((inside.sum(), 1))])
    b_eq = np.zeros(inside.sum())
    out = ~inside
    A_ub = np.hstack([V[out], -np.ones((out.sum(), 1)), np.ones((out.sum(), 1))])
    b_ub = np.zeros(out.sum())
    bounds = [(-1.0, 1.0)] * n + [(None, None), (None, 1.0)]
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds,
                  method="highs")
    if res.status != 0:
        raise RuntimeError(f"face certificate LP failed: {res.message}")
    z = res.x
    return z[:n], float(z[n]), float(z[n + 1])


def is_face(P, S, tol=MARGIN_TOL):
    """True iff vertex subset ``S`` is exactly the vertex set of a face of ``P``."""
    return face_certificate(P, S)[2] > tol


def extreme_indices(P, tol=MARGIN_TOL):
    """Indices of stored points that are vertices of the convex hull."""
    P = _as_polytope(P)
    if P.n_vertices == 1:
        return [0]
    return [i for i in range(P.n_vertices) if is_face(P, [i], tol)]


def _facet_sets(V, idx):
    """Facets of ``conv(V[idx])`` as tuples of global vertex indices."""
    pts = V[list(idx)]
    hull = affine_hull(pts)
    d = hull.dim
    if d == 0:
        return []
    coords = (pts - hull.base_point) @ hull.basis.T
    if d == 1:
        c = coords[:, 0]
        return [(idx[int(np.argmin(c))],), (idx[int(np.argmax(c))],)]
    scale = max(1.0, float(np.abs(coords).max()))
    qhull = ConvexHull(coords)
    out = set()
    for eq in np.unique(np.round(qhull.equations, 12), axis=0):
        normal, offset = eq[:-1], eq[-1]
        dist = coords @ normal + offset
        members = tuple(idx[j] for j in np.flatnonzero(np.abs(dist) <= _PLANE_TOL * scale))
        if len(members) >= d:
            out.add(members)
    return sorted(out)


def _recursive_faces(P):
    V = P.vertices
    top = tuple(range(P.n_vertices))
    seen = {}
    stack = [(top, affine_hull(V).dim)]
    while stack:
        idx, d = stack.pop()
        for facet in _facet_sets(V, idx):
            if facet not in seen:
                seen[facet] = d - 1
                stack.append((facet, d - 1))
    return [Face(s, dim) for s, dim in seen.items()]


def _exhaustive_faces(P, tol):
    V = P.vertices
    m = P.n_vertices
    faces = []
    for size in range(1, m):
        for S in itertools.combinations(range(m), size):
            if is_face(P, S, tol):
                faces.append(Face(S, affine_hull(V[list(S)]).dim))
    return faces


def enumerate_proper_faces(P, cap=DEFAULT_CAP, method="recursive", certify=False,
                           tol=MARGIN_TOL):
    """All non-empty faces of ``P`` other than ``P`` itself, sorted by vertex set.

    ``cap`` bounds the number of stored vertices; exceeding it raises
    :class:`FaceEnumerationError` rather than truncating. With
    ``certify=True`` every face found by the recursive route is re-checked
    with the certificate LP.
    """
    P = _as_polytope(P)
    if P.n_vertices > cap:
        raise FaceEnumerationError(
            f"polytope has {P.n_vertices} vertices, above the enumeration cap {cap}")
    if method == "exhaustive":
        faces = _exhaustive_faces(P, tol)
    elif method == "recursive":
        faces = _recursive_faces(P)
        if certify:
            bad = [f for f in faces if not is_face(P, f.vertex_indices, tol)]
            if bad:
                raise RuntimeError(f"recursive enumeration produced non-faces: {bad[:3]}")
    else:
        raise ValueError(f"unknown method {method!r}")
    return sorted(faces)


def facets(P, cap=DEFAULT_CAP, method="recursive", tol=MARGIN_TOL):
    """Proper faces of dimension ``dim(P) - 1``."""
    P = _as_polytope(P)
    if P.n_vertices > cap:
        raise FaceEnumerationError(
            f"polytope has {P.n_vertices} vertices, above the enumeration cap {cap}")
    d = affine_hull(P.vertices).dim
    if method == "recursive":
        return sorted(Face(s, d - 1) for s in _facet_sets(P.vertices, tuple(range(P.n_vertices))))
    return [f for f in enumerate_proper_faces(P, cap, method, tol=tol) if f.dim == d - 1]


def face_lattice(P, cap=DEFAULT_CAP, method="recursive"):
    """Proper faces plus the improper face ``P`` (listed last)."""
    P = _as_polytope(P)
    full = Face(tuple(range(P.n_vertices)), affine_hull(P.vertices).dim)
    return enumerate_proper_faces(P, cap, method) + [full]


def product_faces(faces_P, faces_Q):
    """Proper faces of ``P x Q`` built as products of faces of the factors.

    Both inputs must contain the improper full face. Vertex ``(i, j)`` of the
    product has index ``i * |vert(Q)| + j``, matching
    :func:`prodfw.polytope.cartesian_product`.
    """
    full_P = max(faces_P, key=len)
    full_Q = max(faces_Q, key=len)
    m_Q = len(full_Q)
    out = []
    for f1 in faces_P:
        for f2 in faces_Q:
            if f1 is full_P and f2 is full_Q:
                continue
            idx = tuple(sorted(i * m_Q + j for i in f1.vertex_indices for j in f2.vertex_indices))
            out.append(Face(idx, f1.dim + f2.dim))
    return sorted(out)
