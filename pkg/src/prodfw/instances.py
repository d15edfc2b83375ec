"""Seeded random instances: k disjoint point clouds, optionally translated to intersect."""

from dataclasses import dataclass, field
import json
import os

import numpy as np

from .polytope import ProductPolytope, VPolytope

GENERATOR_VERSION = "prodfw-instances/1 numpy-PCG64-SeedSequence"
SHIFT_FRACTION = 0.5

# spawn keys separating the random streams used by each generation stage
_STREAM_DISJOINT = 0
_STREAM_INTERSECT = 1


def _rng(seed, stream):
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


@dataclass
class Instance:
    """A feasibility instance: ``k`` point lists in ``R^n`` plus generation metadata."""

    k: int
    n: int
    blocks: list
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.k = int(self.k)
        self.n = int(self.n)
        self.blocks = [np.asarray(b, dtype=np.float64).reshape(-1, self.n) for b in self.blocks]
        if len(self.blocks) != self.k:
            raise ValueError(f"expected {self.k} blocks, got {len(self.blocks)}")
        counts = self.meta.get("vertices_per_block")
        if counts is not None and list(counts) != [len(b) for b in self.blocks]:
            raise ValueError("meta.vertices_per_block does not match the stored blocks")

    @property
    def intersecting(self):
        return bool(self.meta.get("intersecting", False))

    def polytopes(self):
        return [VPolytope(b) for b in self.blocks]

    def product(self):
        return ProductPolytope(self.polytopes())

    def to_dict(self):
        return {"k": self.k, "n": self.n, "blocks": [b.tolist() for b in self.blocks],
                "meta": self.meta}

    def to_json(self):
        """Serialize with one point per line; floats use the shortest round-trip repr."""
        head = {"k": self.k, "n": self.n}
        lines = ["{", f'  "k": {json.dumps(head["k"])},', f'  "n": {json.dumps(head["n"])},',
                 '  "blocks": [']
        for bi, b in enumerate(self.blocks):
            lines.append("    [")
            rows = [f"      {json.dumps(p)}" for p in b.tolist()]
            lines.append(",\n".join(rows))
            lines.append("    ]" + ("," if bi < self.k - 1 else ""))
        lines.append("  ],")
        lines.append(f'  "meta": {json.dumps(self.meta, sort_keys=True)}')
        lines.append("}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(d["k"], d["n"], d["blocks"], dict(d.get("meta", {})))
        except KeyError as exc:
            raise ValueError(f"instance is missing field {exc}") from None

    def save(self, path):
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def disjoint_interval(i):
    """Coordinate range of block ``i`` (0-based): ``[2i, 2i + 1]``."""
    return 2.0 * i, 2.0 * i + 1.0


def generate_disjoint(k, n, seed, vertex_count_range=None):
    """``k`` blocks whose coordinates are uniform on pairwise disjoint intervals.

    Block ``i`` draws its point count uniformly from ``vertex_count_range``
    (inclusive, default ``[n, 2n]``) and every coordinate from
    :func:`disjoint_interval`, so any two blocks are at distance at least 1.
    """
    if int(k) != k or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k}")
    if int(n) != n or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n}")
    k, n = int(k), int(n)
    lo, hi = (n, 2 * n) if vertex_count_range is None else map(int, vertex_count_range)
    if lo < 1 or hi < lo:
        raise ValueError(f"invalid vertex count range [{lo}, {hi}]")
    rng = _rng(seed, _STREAM_DISJOINT)
    counts = rng.integers(lo, hi, endpoint=True, size=k)
    blocks = []
    for i, m in enumerate(counts):
        a, b = disjoint_interval(i)
        blocks.append(rng.uniform(a, b, size=(int(m), n)))
    meta = {
        "seed": int(seed),
        "intersecting": False,
        "vertices_per_block": [int(m) for m in counts],
        "generator_version": GENERATOR_VERSION,
        "vertex_count_range": [lo, hi],
        "intervals": "block i in [2i, 2i+1]^n",
    }
    return Instance(k, n, blocks, meta)


def make_intersecting(inst, seed):
    """Translate the blocks of ``inst`` so they share a common point.

    A random vertex of block 1 is moved onto a random vertex ``v`` of block 0,
    then block 1 is moved by ``SHIFT_FRACTION * (barycentre(block 0) - v)``;
    the common point ``c = v + SHIFT_FRACTION * (barycentre - v)`` lies in
    both. Every further block is translated so one of its random vertices
    sits at ``c``. ``c`` is recorded in ``meta["common_point"]``.
    """
    rng = _rng(seed, _STREAM_INTERSECT)
    B = [b.copy() for b in inst.blocks]
    i0 = int(rng.integers(len(B[0])))
    v = B[0][i0]
    i1 = int(rng.integers(len(B[1])))
    B[1] = B[1] - B[1][i1] + v
    bary = B[0].mean(axis=0)
    step = SHIFT_FRACTION * (bary - v)
    B[1] = B[1] + step
    c = v + step
    anchors = [i0, i1]
    for j in range(2, inst.k):
        ij = int(rng.integers(len(B[j])))
        B[j] = B[j] - B[j][ij] + c
        anchors.append(ij)
    meta = dict(inst.meta)
    meta.update({
        "intersecting": True,
        "intersect_seed": int(seed),
        "shift_fraction": SHIFT_FRACTION,
        "anchor_vertices": anchors,
        "common_point": c.tolist(),
    })
    return Instance(inst.k, inst.n, B, meta)


def generate(k, n, seed, intersecting=False, vertex_count_range=None):
    inst = generate_disjoint(k, n, seed, vertex_count_range)
    return make_intersecting(inst, seed) if intersecting else inst


def load_instance(path):
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    return Instance.load(path)
