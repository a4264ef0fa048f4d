"""Filtered simplicial complexes: Vietoris-Rips and Cech from point clouds,
lower-star filtrations from vertex values."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .geometry import PointCloud, smallest_enclosing_ball_radius

Simplex = tuple[int, ...]


def faces(s: Simplex) -> list[Simplex]:
    """Codimension-one faces, in the order of the omitted vertex."""
    return [s[:i] + s[i + 1:] for i in range(len(s))]


DEFAULT_FULL_LIMIT = 64


@dataclass(frozen=True)
class FilteredComplex:
    """Simplices with filtration values, sorted by (value, dimension, vertices).

    Use :meth:`from_simplices` to build one; the constructor assumes the
    input is already in canonical order.
    """

    simplices: tuple[Simplex, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (len(self.simplices),):
            raise ValueError("one filtration value per simplex")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_simplices(cls, items: Iterable[tuple[Sequence[int], float]]) -> "FilteredComplex":
        rows = []
        for s, v in items:
            s = tuple(int(i) for i in s)
            if not s or any(a >= b for a, b in zip(s, s[1:])):
                raise ValueError(f"simplex {s} must have strictly increasing vertices")
            rows.append((float(v), len(s), s))
        rows.sort()
        return cls(tuple(r[2] for r in rows), np.array([r[0] for r in rows]))

    def __len__(self) -> int:
        return len(self.simplices)

    def __iter__(self):
        return zip(self.simplices, self.values.tolist())

    @property
    def dim(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def count(self, k: int) -> int:
        return sum(1 for s in self.simplices if len(s) == k + 1)

    def index(self) -> dict[Simplex, int]:
        return {s: i for i, s in enumerate(self.simplices)}

    def validate(self) -> None:
        """Raise ``ValueError`` unless face-closed and monotone."""
        idx = self.index()
        for j, s in enumerate(self.simplices):
            if len(s) == 1:
                continue
            for f in faces(s):
                i = idx.get(f)
                if i is None:
                    raise ValueError(f"face {f} of {s} is missing")
                if self.values[i] > self.values[j] or i > j:
                    raise ValueError(f"face {f} enters after its coface {s}")

    def at(self, r: float) -> "FilteredComplex":
        """Subcomplex of simplices with value <= r."""
        keep = self.values <= r
        return FilteredComplex(
            tuple(s for s, k in zip(self.simplices, keep) if k), self.values[keep]
        )

    def dump(self) -> str:
        """One line ``value dim v0 ... vk`` per simplex."""
        return "".join(
            f"{v!r} {len(s) - 1} {' '.join(map(str, s))}\n"
            for s, v in zip(self.simplices, self.values.tolist())
        )

    @classmethod
    def load(cls, text: str) -> "FilteredComplex":
        items = []
        for line in text.splitlines():
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            v, k, verts = float(parts[0]), int(parts[1]), tuple(map(int, parts[2:]))
            if len(verts) != k + 1:
                raise ValueError(f"bad complex line: {line!r}")
            items.append((verts, v))
        return cls.from_simplices(items)


def _resolve_rmax(n: int, r_max: float | None) -> float:
    if r_max is None:
        if n > DEFAULT_FULL_LIMIT:
            raise ValueError(f"r_max is required for more than {DEFAULT_FULL_LIMIT} points")
        return math.inf
    return float(r_max)


def _expand(n: int, D: np.ndarray, dim_max: int, r_max: float, value_of=None):
    """Clique expansion over the edge graph ``D <= r_max``.

    By default a simplex gets its largest edge length; ``value_of(simplex)``
    overrides that. Simplices valued above ``r_max`` are dropped and not
    expanded further.
    """
    adj = D <= r_max
    out: list[tuple[Simplex, float]] = [((i,), 0.0) for i in range(n)]
    if dim_max == 0 or n < 2:
        return out
    nbrs = [set(np.nonzero(adj[i, i + 1:])[0] + i + 1) for i in range(n)]
    frontier: list[tuple[Simplex, float]] = []
    for i in range(n):
        for j in sorted(nbrs[i]):
            s = (i, j)
            v = D[i, j] if value_of is None else value_of(s)
            if v <= r_max:
                frontier.append((s, float(v)))
    out.extend(frontier)
    for _ in range(2, dim_max + 1):
        nxt = []
        for s, val in frontier:
            common = set.intersection(*(nbrs[i] for i in s)) if len(s) > 1 else nbrs[s[0]]
            for w in sorted(c for c in common if c > s[-1]):
                t = s + (w,)
                if value_of is None:
                    v = max(val, max(D[i, w] for i in s))
                else:
                    v = value_of(t)
                if v <= r_max:
                    nxt.append((t, float(v)))
        out.extend(nxt)
        frontier = nxt
        if not frontier:
            break
    return out


def rips_filtration(X: PointCloud, dim_max: int = 2, r_max: float | None = None) -> FilteredComplex:
    """Vietoris-Rips filtration: a simplex enters at its largest edge length."""
    if dim_max < 0:
        raise ValueError("dim_max must be nonnegative")
    n = len(X)
    if n < 1:
        raise ValueError("need at least one point")
    r_max = _resolve_rmax(n, r_max)
    D = X.distance_matrix()
    return FilteredComplex.from_simplices(_expand(n, D, dim_max, r_max))


def cech_filtration(X: PointCloud, dim_max: int = 2, r_max: float | None = None) -> FilteredComplex:
    """Cech filtration: a simplex enters at the radius of its smallest
    Euclidean enclosing ball (circle points embedded in the plane)."""
    if dim_max < 0:
        raise ValueError("dim_max must be nonnegative")
    if X.space == "so3":
        raise ValueError("Cech filtration is only supported on the circle and spheres")
    n = len(X)
    if n < 1:
        raise ValueError("need at least one point")
    r_max = _resolve_rmax(n, r_max)
    E = X.embedded()
    diff = E[:, None, :] - E[None, :, :]
    D = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))

    seen: dict[Simplex, float] = {}

    def value_of(s):
        if len(s) == 2:
            v = D[s[0], s[1]] / 2.0
        else:
            # the max over faces only absorbs rounding in the ball solver
            v = max(smallest_enclosing_ball_radius(E[list(s)]),
                    max(seen.get(f, math.inf) for f in faces(s)))
        seen[s] = v
        return v

    # candidate cliques use half-distances: a ball of radius r has diameter <= 2r
    return FilteredComplex.from_simplices(_expand(n, D / 2.0, dim_max, r_max, value_of))


def lower_star_filtration(vertex_values, simplices: Iterable[Sequence[int]]) -> FilteredComplex:
    """Each simplex enters at the largest value among its vertices."""
    f = np.asarray(vertex_values, dtype=float)
    items = [((i,), f[i]) for i in range(len(f))]
    for s in simplices:
        s = tuple(sorted(int(i) for i in s))
        if len(s) > 1:
            items.append((s, max(f[i] for i in s)))
    return FilteredComplex.from_simplices(items)
