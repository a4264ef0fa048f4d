"""Boundary-matrix reduction over F_2, and level-set persistence of densities
sampled on a circle mesh or an icosphere."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .complexes import FilteredComplex, faces, lower_star_filtration
from .core import INF, Barcode, FieldSpec, PersistenceInterval


def boundary_columns(K: FilteredComplex) -> list[list[int]]:
    """Facet indices of every simplex, in the global filtration order.

    Raises ``ValueError`` when a facet is missing or enters after its coface.
    """
    idx = K.index()
    cols: list[list[int]] = []
    vals = K.values
    for j, s in enumerate(K.simplices):
        if len(s) == 1:
            cols.append([])
            continue
        col = []
        for f in faces(s):
            i = idx.get(f)
            if i is None:
                raise ValueError(f"face {f} of {s} is missing from the complex")
            if i > j or vals[i] > vals[j]:
                raise ValueError(f"non-monotone filtration: {f} enters after {s}")
            col.append(i)
        col.sort()
        cols.append(col)
    return cols


@dataclass(frozen=True)
class PersistencePairs:
    """Output of the column reduction: index pairs and unpaired creators."""

    complex: FilteredComplex
    pairs: tuple[tuple[int, int], ...]
    essential: tuple[int, ...]

    def barcode(self) -> Barcode:
        K = self.complex
        out = []
        for i, j in self.pairs:
            out.append(PersistenceInterval(len(K.simplices[i]) - 1, K.values[i], K.values[j]))
        for i in self.essential:
            out.append(PersistenceInterval(len(K.simplices[i]) - 1, K.values[i], INF))
        return Barcode(tuple(out))


def persistence_pairs(K: FilteredComplex, field: FieldSpec | int = 2) -> PersistencePairs:
    """Standard column reduction with clearing.

    Columns are F_2 vectors stored as Python integers (bit i set when simplex
    i is in the chain), so column addition is an XOR and the pivot is the
    highest set bit.
    """
    if FieldSpec.of(field).characteristic != 2:
        raise ValueError("the reduction engine works over F_2 only")
    cols = boundary_columns(K)
    n = len(cols)
    by_dim: dict[int, list[int]] = {}
    for j, s in enumerate(K.simplices):
        by_dim.setdefault(len(s) - 1, []).append(j)

    pivot_owner: dict[int, int] = {}
    reduced: dict[int, int] = {}
    cleared = bytearray(n)
    pairs = []
    for d in sorted(by_dim, reverse=True):
        if d == 0:
            continue
        for j in by_dim[d]:
            if cleared[j]:
                continue
            col = 0
            for i in cols[j]:
                col |= 1 << i
            while col:
                piv = col.bit_length() - 1
                owner = pivot_owner.get(piv)
                if owner is None:
                    break
                col ^= reduced[owner]
            if col:
                piv = col.bit_length() - 1
                pivot_owner[piv] = j
                reduced[j] = col
                cleared[piv] = 1
                pairs.append((piv, j))
    deaths = {j for _, j in pairs}
    births = {i for i, _ in pairs}
    essential = tuple(j for j in range(n) if j not in deaths and j not in births)
    pairs.sort()
    return PersistencePairs(K, tuple(pairs), essential)


def reduce(K: FilteredComplex, field: FieldSpec | int = 2) -> Barcode:
    """Barcode of a filtered complex; zero-length intervals are dropped."""
    return persistence_pairs(K, field).barcode()


# meshes


@dataclass(frozen=True)
class Mesh:
    """Closed triangulation of S^1 (edges) or S^2 (triangles)."""

    vertices: np.ndarray
    cells: np.ndarray
    kind: str

    def __post_init__(self):
        V = np.asarray(self.vertices, dtype=float)
        C = np.asarray(self.cells, dtype=np.int64)
        if V.shape[0] == 0:
            raise ValueError("empty mesh")
        V.flags.writeable = False
        C.flags.writeable = False
        object.__setattr__(self, "vertices", V)
        object.__setattr__(self, "cells", C)

    @property
    def edges(self) -> np.ndarray:
        if self.kind == "circle":
            return self.cells
        e = np.concatenate([self.cells[:, [0, 1]], self.cells[:, [1, 2]], self.cells[:, [0, 2]]])
        e.sort(axis=1)
        return np.unique(e, axis=0)

    def simplices(self) -> list[tuple[int, ...]]:
        if self.kind == "circle":
            return [tuple(e) for e in self.cells.tolist()]
        return [tuple(e) for e in self.edges.tolist()] + [tuple(t) for t in self.cells.tolist()]

    def is_closed_manifold(self) -> bool:
        if self.kind == "circle":
            deg = np.bincount(self.cells.ravel(), minlength=len(self.vertices))
            return bool(np.all(deg == 2))
        e = np.concatenate([self.cells[:, [0, 1]], self.cells[:, [1, 2]], self.cells[:, [0, 2]]])
        e.sort(axis=1)
        _, counts = np.unique(e, axis=0, return_counts=True)
        return bool(np.all(counts == 2))


def circle_mesh(m: int = 10_000) -> Mesh:
    """Cycle graph on ``m`` equally spaced angles starting at -pi."""
    if m < 3:
        raise ValueError("a circle mesh needs at least 3 vertices")
    theta = -np.pi + 2 * np.pi * np.arange(m) / m
    edges = np.column_stack([np.arange(m), (np.arange(m) + 1) % m])
    edges.sort(axis=1)
    return Mesh(theta, edges, "circle")


def icosphere(level: int = 5) -> Mesh:
    """Subdivided icosahedron with ``10 * 4**level + 2`` vertices.

    Antipodal pairs of vertices are preserved at every level, and vertex 0
    is the original icosahedron vertex (0, 1, phi)/|.|.
    """
    phi = (1 + math.sqrt(5)) / 2
    V = [(0, 1, phi), (0, -1, phi), (0, 1, -phi), (0, -1, -phi),
         (1, phi, 0), (-1, phi, 0), (1, -phi, 0), (-1, -phi, 0),
         (phi, 0, 1), (-phi, 0, 1), (phi, 0, -1), (-phi, 0, -1)]
    verts = [np.array(v, dtype=float) / np.linalg.norm(v) for v in V]
    P = np.array(verts)
    # faces of the icosahedron: triples of mutually adjacent vertices
    d = np.linalg.norm(P[:, None] - P[None], axis=2)
    edge_len = np.min(d[d > 1e-9])
    adj = np.abs(d - edge_len) < 1e-9
    faces_ = [(i, j, k) for i in range(12) for j in range(i + 1, 12) for k in range(j + 1, 12)
              if adj[i, j] and adj[j, k] and adj[i, k]]
    for _ in range(level):
        cache: dict[tuple[int, int], int] = {}

        def mid(a, b):
            key = (a, b) if a < b else (b, a)
            if key not in cache:
                v = verts[a] + verts[b]
                verts.append(v / np.linalg.norm(v))
                cache[key] = len(verts) - 1
            return cache[key]

        new = []
        for a, b, c in faces_:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces_ = new
    cells = np.sort(np.array(faces_, dtype=np.int64), axis=1)
    return Mesh(np.array(verts), cells, "sphere")


@dataclass(frozen=True)
class DiscretizedDensity:
    """A density sampled at the vertices of a closed mesh."""

    mesh: Mesh
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (len(self.mesh.vertices),):
            raise ValueError("one density value per mesh vertex")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, f: Callable[[np.ndarray], np.ndarray], mesh: Mesh) -> "DiscretizedDensity":
        return cls(mesh, np.asarray(f(mesh.vertices), dtype=float))

    @property
    def modulus(self) -> float:
        """Largest variation of the sampled values across a single cell."""
        cv = self.values[self.mesh.cells]
        return float(np.max(cv.max(axis=1) - cv.min(axis=1)))


def sublevel_persistence(density: DiscretizedDensity) -> Barcode:
    """Lower-star barcode of the sampled density (sublevel sets f <= r)."""
    if len(density.values) == 0:
        raise ValueError("empty mesh")
    K = lower_star_filtration(density.values, density.mesh.simplices())
    return reduce(K)


def superlevel_cech_persistence(density: DiscretizedDensity) -> Barcode:
    """Barcode in dimensions >= 1 of the superlevel sets f >= 1/r.

    A simplex is present once all its vertices satisfy f >= 1/r, i.e. at
    r = max(1/f) over its vertices: a lower-star filtration of 1/f.
    """
    if np.any(density.values <= 0):
        raise ValueError("superlevel filtration needs a strictly positive density")
    K = lower_star_filtration(1.0 / density.values, density.mesh.simplices())
    bc = reduce(K)
    return Barcode(tuple(J for J in bc if J.dim >= 1))


# brute-force oracle


def _rank_f2(M: np.ndarray) -> int:
    """Rank over F_2 by dense Gaussian elimination."""
    A = (np.asarray(M, dtype=np.uint8) & 1).copy()
    rows, cols = A.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        hits = np.nonzero(A[rank:, c])[0]
        if len(hits) == 0:
            continue
        piv = rank + hits[0]
        if piv != rank:
            A[[rank, piv]] = A[[piv, rank]]
        below = np.nonzero(A[:, c])[0]
        below = below[below != rank]
        A[below] ^= A[rank]
        rank += 1
    return rank


def betti_numbers_bruteforce(K: FilteredComplex, r: float, max_dim: int | None = None) -> list[int]:
    """F_2 Betti numbers of the subcomplex with values <= r, from matrix ranks.

    Independent of the reduction engine: builds each boundary matrix of the
    subcomplex and uses ``b_k = n_k - rank d_k - rank d_{k+1}``.
    """
    sub = [s for s, v in zip(K.simplices, K.values) if v <= r]
    top = max((len(s) - 1 for s in sub), default=-1)
    if max_dim is None:
        max_dim = top
    by_dim = [[s for s in sub if len(s) == k + 1] for k in range(top + 2)]
    index = [{s: i for i, s in enumerate(ss)} for ss in by_dim]
    ranks = [0] * (top + 2)
    for k in range(1, top + 1):
        M = np.zeros((len(by_dim[k - 1]), len(by_dim[k])), dtype=np.uint8)
        for j, s in enumerate(by_dim[k]):
            for f in faces(s):
                M[index[k - 1][f], j] = 1
        ranks[k] = _rank_f2(M) if M.size else 0
    return [
        (len(by_dim[k]) - ranks[k] - ranks[k + 1]) if k <= top else 0
        for k in range(max_dim + 1)
    ]
