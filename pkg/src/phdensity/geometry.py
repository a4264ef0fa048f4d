"""Point clouds and metrics on the circle, spheres and SO(3)."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

CIRCLE = "circle"
SPHERE = "sphere"
SO3 = "so3"

SPACES = (CIRCLE, SPHERE, SO3)

# metric kinds
ARC = "arc"
GEODESIC = "geodesic"
EUCLIDEAN = "euclidean"
FROBENIUS = "frobenius"

_DEFAULT_METRIC = {CIRCLE: ARC, SPHERE: GEODESIC, SO3: FROBENIUS}
_ALLOWED_METRICS = {
    CIRCLE: (ARC,),
    SPHERE: (GEODESIC, EUCLIDEAN),
    # both SO(3) metrics are experimental: nothing downstream depends on them
    SO3: (FROBENIUS, GEODESIC),
}

SPHERE_TOL = 1e-12
SO3_TOL = 1e-10


def circle_positions(angles) -> np.ndarray:
    """Map angles to normalized positions in [0, 1)."""
    u = (np.asarray(angles, dtype=float) + np.pi) / (2 * np.pi)
    u = np.mod(u, 1.0)
    return np.where(u >= 1.0, 0.0, u)


def arc_distance(u, v):
    """Normalized arc length between positions in [0, 1); circumference 1."""
    d = np.abs(np.asarray(u, dtype=float) - np.asarray(v, dtype=float))
    return np.minimum(d, 1.0 - d)


def _check_point(space: str, x, p: int | None = None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if space == CIRCLE:
        if x.ndim != 0 or not np.isfinite(x):
            raise ValueError("circle points are finite angles")
        return x
    if space == SPHERE:
        if x.ndim != 1 or (p is not None and x.shape[0] != p):
            raise ValueError("sphere point has the wrong shape")
        if abs(np.linalg.norm(x) - 1.0) > SPHERE_TOL:
            raise ValueError("sphere point is not unit norm")
        return x
    if space == SO3:
        if x.shape != (3, 3):
            raise ValueError("SO(3) points are 3x3 matrices")
        if not is_rotation(x):
            raise ValueError("matrix is not in SO(3)")
        return x
    raise ValueError(f"unknown space {space!r}")


def is_rotation(X, tol: float = SO3_TOL) -> bool:
    X = np.asarray(X, dtype=float)
    return (
        X.shape == (3, 3)
        and np.max(np.abs(X.T @ X - np.eye(3))) <= tol
        and abs(np.linalg.det(X) - 1.0) <= tol
    )


def distance(space: str, x, y, metric: str | None = None) -> float:
    metric = metric or _DEFAULT_METRIC.get(space)
    if space not in _ALLOWED_METRICS or metric not in _ALLOWED_METRICS[space]:
        raise ValueError(f"metric {metric!r} not available on {space!r}")
    x = _check_point(space, x)
    y = _check_point(space, y, None if space != SPHERE else x.shape[0])
    if space == CIRCLE:
        return float(arc_distance(circle_positions(x), circle_positions(y)))
    if space == SPHERE:
        if metric == EUCLIDEAN:
            return float(np.linalg.norm(x - y))
        return float(np.arccos(np.clip(x @ y, -1.0, 1.0)))
    if metric == FROBENIUS:
        return float(np.linalg.norm(x - y))
    c = (np.trace(x.T @ y) - 1.0) / 2.0
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


@dataclass(frozen=True)
class PointCloud:
    """Points on S^1 (angles), S^{p-1} (unit rows) or SO(3) (3x3 stack)."""

    space: str
    points: np.ndarray
    metric: str | None = None

    def __post_init__(self):
        if self.space not in SPACES:
            raise ValueError(f"unknown space {self.space!r}")
        metric = self.metric or _DEFAULT_METRIC[self.space]
        if metric not in _ALLOWED_METRICS[self.space]:
            raise ValueError(f"metric {metric!r} not available on {self.space!r}")
        pts = np.array(self.points, dtype=float)
        if self.space == CIRCLE:
            pts = pts.reshape(-1)
            if not np.all(np.isfinite(pts)):
                raise ValueError("circle angles must be finite")
        elif self.space == SPHERE:
            if pts.ndim != 2 or pts.shape[1] < 2:
                raise ValueError("sphere points must be an (n, p) array with p >= 2")
            if pts.shape[0] and np.max(np.abs(np.linalg.norm(pts, axis=1) - 1)) > SPHERE_TOL:
                raise ValueError("sphere points must be unit norm")
        else:
            if pts.ndim != 3 or pts.shape[1:] != (3, 3):
                raise ValueError("SO(3) points must be an (n, 3, 3) array")
            for X in pts:
                if not is_rotation(X):
                    raise ValueError("matrix is not in SO(3)")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "metric", metric)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def p(self) -> int:
        """Ambient dimension: 2 for the circle, p for S^{p-1}, 3 for SO(3)."""
        if self.space == CIRCLE:
            return 2
        if self.space == SPHERE:
            return self.points.shape[1]
        return 3

    def positions(self) -> np.ndarray:
        if self.space != CIRCLE:
            raise ValueError("normalized positions exist only on the circle")
        return circle_positions(self.points)

    def embedded(self) -> np.ndarray:
        """Coordinates in Euclidean space (circle -> R^2, SO(3) -> R^9)."""
        if self.space == CIRCLE:
            return np.column_stack([np.cos(self.points), np.sin(self.points)])
        if self.space == SPHERE:
            return np.asarray(self.points)
        return self.points.reshape(-1, 9)

    def distance_matrix(self) -> np.ndarray:
        if self.space == CIRCLE:
            u = self.positions()
            return arc_distance(u[:, None], u[None, :])
        if self.space == SPHERE:
            X = self.points
            if self.metric == EUCLIDEAN:
                return _euclidean_matrix(X)
            D = np.arccos(np.clip(X @ X.T, -1.0, 1.0))
            np.fill_diagonal(D, 0.0)
            return D
        E = self.embedded()
        if self.metric == FROBENIUS:
            return _euclidean_matrix(E)
        c = (np.einsum("iab,jab->ij", self.points, self.points) - 1.0) / 2.0
        D = np.arccos(np.clip(c, -1.0, 1.0))
        np.fill_diagonal(D, 0.0)
        return D

    # file format: first line "<space>,<p>", then one row per point

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.space, self.p])
        if self.space == CIRCLE:
            for a in self.points.tolist():
                w.writerow([repr(a)])
        else:
            for row in self.points.reshape(len(self), -1).tolist():
                w.writerow([repr(v) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, metric: str | None = None) -> "PointCloud":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if not rows:
            raise ValueError("empty point-cloud file")
        head = [h.strip().lower() for h in rows[0]]
        if head == ["space", "p"]:
            rows = rows[1:]
            head = [h.strip().lower() for h in rows[0]]
        space, p = head[0], int(head[1])
        data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
        if space == CIRCLE:
            pts = data.reshape(-1)
        elif space == SPHERE:
            pts = data.reshape(-1, p)
        elif space == SO3:
            pts = data.reshape(-1, 3, 3)
        else:
            raise ValueError(f"unknown space {space!r}")
        return cls(space, pts, metric)


def _euclidean_matrix(X: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - X[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


# quaternions and the double cover S^3 -> SO(3)


def _skew(v) -> np.ndarray:
    a, b, c = v
    return np.array([[0.0, -c, b], [c, 0.0, -a], [-b, a, 0.0]])


def cayley_klein(q) -> np.ndarray:
    """Rotation ``I + 2 q1 B + 2 B^2`` where ``B`` is the skew matrix of q[1:]."""
    q = np.asarray(q, dtype=float)
    if q.shape != (4,):
        raise ValueError("quaternion must have 4 components")
    if abs(np.linalg.norm(q) - 1.0) > SPHERE_TOL:
        raise ValueError("quaternion must be unit norm")
    B = _skew(q[1:])
    return np.eye(3) + 2.0 * q[0] * B + 2.0 * B @ B


def cayley_klein_batch(Q: np.ndarray) -> np.ndarray:
    """Vectorized :func:`cayley_klein` over rows of ``Q`` (no validation)."""
    Q = np.asarray(Q, dtype=float)
    w, a, b, c = Q.T
    B = np.zeros((len(Q), 3, 3))
    B[:, 0, 1], B[:, 0, 2] = -c, b
    B[:, 1, 0], B[:, 1, 2] = c, -a
    B[:, 2, 0], B[:, 2, 1] = -b, a
    return np.eye(3)[None] + 2.0 * w[:, None, None] * B + 2.0 * B @ B


def quaternion_from_rotation(A) -> np.ndarray:
    """One of the two unit quaternions mapped to ``A`` by :func:`cayley_klein`."""
    A = np.asarray(A, dtype=float)
    if not is_rotation(A):
        raise ValueError("matrix is not in SO(3)")
    tr = np.trace(A)
    # pick the largest pivot for stability
    cands = np.array([tr, A[0, 0], A[1, 1], A[2, 2]])
    i = int(np.argmax(cands))
    if i == 0:
        w = math.sqrt(max(0.0, 1.0 + tr)) / 2.0
        q = np.array([w, (A[2, 1] - A[1, 2]) / (4 * w), (A[0, 2] - A[2, 0]) / (4 * w),
                      (A[1, 0] - A[0, 1]) / (4 * w)])
    elif i == 1:
        x = math.sqrt(max(0.0, 1.0 + A[0, 0] - A[1, 1] - A[2, 2])) / 2.0
        q = np.array([(A[2, 1] - A[1, 2]) / (4 * x), x, (A[0, 1] + A[1, 0]) / (4 * x),
                      (A[0, 2] + A[2, 0]) / (4 * x)])
    elif i == 2:
        y = math.sqrt(max(0.0, 1.0 - A[0, 0] + A[1, 1] - A[2, 2])) / 2.0
        q = np.array([(A[0, 2] - A[2, 0]) / (4 * y), (A[0, 1] + A[1, 0]) / (4 * y), y,
                      (A[1, 2] + A[2, 1]) / (4 * y)])
    else:
        z = math.sqrt(max(0.0, 1.0 - A[0, 0] - A[1, 1] + A[2, 2])) / 2.0
        q = np.array([(A[1, 0] - A[0, 1]) / (4 * z), (A[0, 2] + A[2, 0]) / (4 * z),
                      (A[1, 2] + A[2, 1]) / (4 * z), z])
    return q / np.linalg.norm(q)


# smallest enclosing ball


def _circumball(R: np.ndarray) -> tuple[np.ndarray, float]:
    """Smallest ball with every point of ``R`` on its boundary."""
    if len(R) == 1:
        return R[0].copy(), 0.0
    U = R[1:] - R[0]
    G = U @ U.T
    rhs = 0.5 * np.einsum("ij,ij->i", U, U)
    lam = np.linalg.lstsq(G, rhs, rcond=None)[0]
    c = R[0] + lam @ U
    return c, float(np.max(np.linalg.norm(R - c, axis=1)))


def _welzl(R: list[int], idx: list[int], pts: np.ndarray, eps: float):
    if not idx or len(R) == pts.shape[1] + 1:
        if not R:
            return np.zeros(pts.shape[1]), -1.0
        return _circumball(pts[R])
    i, rest = idx[-1], idx[:-1]
    c, r = _welzl(R, rest, pts, eps)
    if r >= 0 and np.linalg.norm(pts[i] - c) <= r + eps:
        return c, r
    return _welzl(R + [i], rest, pts, eps)


def smallest_enclosing_ball(points) -> tuple[np.ndarray, float]:
    """Center and radius of the minimal Euclidean ball containing ``points``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        raise ValueError("smallest enclosing ball of an empty set")
    scale = max(1.0, float(np.max(np.abs(pts))))
    return _welzl([], list(range(len(pts))), pts, 1e-12 * scale)


def smallest_enclosing_ball_radius(points) -> float:
    return smallest_enclosing_ball(points)[1]
