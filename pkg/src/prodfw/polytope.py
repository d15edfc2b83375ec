"""V-represented polytopes, their Cartesian products, and linear minimization oracles."""

from dataclasses import dataclass
import itertools

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from ._validation import check_points, check_vector

DEDUP_TOL = 1e-12
RANK_TOL = 1e-10


class VPolytope:
    """Convex hull of an explicit, immutable list of points.

    Points closer than ``DEDUP_TOL`` in every coordinate to an earlier point
    are dropped at construction. The stored list is not required to be in
    convex position; routines that need true vertices say so.
    """

    __slots__ = ("_vertices",)

    def __init__(self, vertices):
        V = check_points(vertices, name="vertices")
        if V.shape[0] > 1:
            pairs = cKDTree(V).query_pairs(r=DEDUP_TOL, p=np.inf, output_type="ndarray")
            if len(pairs):
                drop = np.unique(pairs.max(axis=1))
                V = np.delete(V, drop, axis=0)
        V = np.ascontiguousarray(V)
        V.setflags(write=False)
        self._vertices = V

    @property
    def vertices(self):
        return self._vertices

    @property
    def dim_ambient(self):
        return self._vertices.shape[1]

    @property
    def n_vertices(self):
        return self._vertices.shape[0]

    def __len__(self):
        return self._vertices.shape[0]

    def __repr__(self):
        return f"VPolytope(n_vertices={self.n_vertices}, dim_ambient={self.dim_ambient})"

    def subset(self, indices):
        return VPolytope(self._vertices[np.asarray(sorted(indices), dtype=int)])


class ProductPolytope:
    """Ordered product of ``k`` blocks sharing one ambient dimension ``n``.

    Points of the product are flat vectors of length ``n * k`` whose i-th
    length-``n`` slice lies in block i.
    """

    __slots__ = ("_blocks",)

    def __init__(self, blocks):
        blocks = tuple(b if isinstance(b, VPolytope) else VPolytope(b) for b in blocks)
        if not blocks:
            raise ValueError("a product polytope needs at least one block")
        dims = {b.dim_ambient for b in blocks}
        if len(dims) != 1:
            raise ValueError(f"all blocks must share one ambient dimension, got {sorted(dims)}")
        self._blocks = blocks

    @property
    def blocks(self):
        return self._blocks

    @property
    def k(self):
        return len(self._blocks)

    @property
    def n(self):
        return self._blocks[0].dim_ambient

    @property
    def dim_ambient(self):
        return self.n * self.k

    def __repr__(self):
        sizes = [b.n_vertices for b in self._blocks]
        return f"ProductPolytope(k={self.k}, n={self.n}, vertices_per_block={sizes})"

    def split(self, x):
        """View a flat product point as a (k, n) array of block variables."""
        return np.asarray(x, dtype=np.float64).reshape(self.k, self.n)

    def vertex(self, index_tuple):
        """Coordinates of the product vertex identified by per-block indices."""
        return np.concatenate([b.vertices[i] for b, i in zip(self._blocks, index_tuple)])

    def vertex_matrix(self, index_tuples):
        """Stack several product vertices into an array of shape (len, n * k)."""
        index_tuples = list(index_tuples)
        out = np.empty((len(index_tuples), self.dim_ambient))
        n = self.n
        for i, block in enumerate(self._blocks):
            idx = [t[i] for t in index_tuples]
            out[:, i * n:(i + 1) * n] = block.vertices[idx]
        return out

    def diameter(self):
        return float(np.sqrt(sum(diameter(b) ** 2 for b in self._blocks)))


@dataclass(frozen=True)
class AffineSubspace:
    """``base_point + span(basis)`` with an orthonormal basis stored row-wise."""

    base_point: np.ndarray
    basis: np.ndarray

    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def dim_ambient(self):
        return self.base_point.shape[0]

    def residual(self, points):
        """Component of ``points - base_point`` orthogonal to the direction space."""
        P = np.atleast_2d(np.asarray(points, dtype=np.float64)) - self.base_point
        if self.dim:
            P = P - (P @ self.basis.T) @ self.basis
        return P

    def distance(self, points):
        return np.linalg.norm(self.residual(points), axis=1)

    def contains(self, points, tol=1e-9):
        return self.distance(points) <= tol


def lmo(P, g):
    """Linear minimization oracle over the stored vertex list.

    Returns ``(index, vertex)`` of the vertex minimizing ``<g, v>``; ties go to
    the lowest index.
    """
    g = check_vector(g, P.dim_ambient, name="g")
    i = int(np.argmin(P.vertices @ g))
    return i, P.vertices[i]


def product_lmo(PP, g):
    """Blockwise LMO: block i of the answer is ``lmo(PP.blocks[i], g[i])``."""
    g = check_vector(g, PP.dim_ambient, name="g")
    G = g.reshape(PP.k, PP.n)
    return [lmo(b, gi) for b, gi in zip(PP.blocks, G)]


def _product_scores(PP, g):
    """Per-block score vectors ``V_i @ g^i`` and their argmin indices."""
    G = np.asarray(g).reshape(PP.k, PP.n)
    scores = [b.vertices @ gi for b, gi in zip(PP.blocks, G)]
    return scores, tuple(int(np.argmin(s)) for s in scores)


def diameter(P):
    """Largest pairwise Euclidean distance between stored vertices."""
    V = P.vertices if isinstance(P, VPolytope) else check_points(P)
    if V.shape[0] < 2:
        return 0.0
    return float(pdist(V).max())


def affine_hull(points):
    """Affine hull of a non-empty point set, anchored at its first point."""
    P = check_points(points)
    base = P[0].copy()
    diffs = P[1:] - base
    if diffs.shape[0] == 0:
        return AffineSubspace(base, np.zeros((0, P.shape[1])))
    _, s, Vt = np.linalg.svd(diffs, full_matrices=False)
    rank = int(np.sum(s > RANK_TOL * max(1.0, s[0])))
    return AffineSubspace(base, Vt[:rank].copy())


def affine_dim(points):
    return affine_hull(points).dim


def cartesian_product(*polytopes):
    """Explicit vertex list of ``P_1 x ... x P_m`` (blocks may differ in dimension).

    Vertex ``(i_1, ..., i_m)`` lands at the row-major position of the index
    tuple, i.e. the order of :func:`itertools.product`.
    """
    polys = [p if isinstance(p, VPolytope) else VPolytope(p) for p in polytopes]
    rows = [np.concatenate([p.vertices[i] for p, i in zip(polys, idx)])
            for idx in itertools.product(*(range(p.n_vertices) for p in polys))]
    return VPolytope(np.array(rows))
