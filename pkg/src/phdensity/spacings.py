"""Spacings of uniform samples on the circle of circumference one.

Covers the gaps between consecutive sample points, their expected order
statistics, the tail of the largest gap, the expected Betti-0/Betti-1
barcodes and the empirical Betti-0 function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .complexes import rips_filtration
from .core import INF, Barcode, PersistenceInterval
from .distributions import uniform_circle
from .geometry import CIRCLE, PointCloud, circle_positions
from .persistence import reduce


@dataclass(frozen=True)
class SpacingSet:
    """Circular gaps ``S_1..S_n`` (anchored at the first point) and their order statistics."""

    gaps: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gaps, dtype=float)
        if g.ndim != 1 or len(g) < 2:
            raise ValueError("need at least two spacings")
        if np.any(g < 0):
            raise ValueError("spacings must be nonnegative")
        g.flags.writeable = False
        object.__setattr__(self, "gaps", g)

    @property
    def n(self) -> int:
        return len(self.gaps)

    @property
    def ordered(self) -> np.ndarray:
        """``S_{n:1} <= ... <= S_{n:n}``."""
        return np.sort(self.gaps, kind="stable")

    @property
    def largest(self) -> float:
        return float(self.gaps.max())


def spacings(X: PointCloud) -> SpacingSet:
    """Gaps between circularly consecutive points, starting from the first point.

    Gaps are computed from the normalized positions with the same arithmetic
    as the circle distance, so they compare equal to Rips edge values.
    """
    if X.space != CIRCLE:
        raise ValueError("spacings are defined for circle point clouds")
    if len(X) < 2:
        raise ValueError("need at least two points")
    u = X.positions()
    order = np.argsort(u, kind="stable")
    s = u[order]
    # the true gaps; whenever one is at most 1/2 it is bit-identical to the
    # circle distance min(d, 1 - d) of its two endpoints
    gaps = np.append(np.diff(s), 1.0 - (s[-1] - s[0]))
    # rotate so the sequence starts at the first sample point
    start = int(np.nonzero(order == 0)[0][0])
    gaps = np.roll(gaps, -start)
    return SpacingSet(gaps)


def sample_ordered_spacings(n: int, trials: int, seed=None) -> np.ndarray:
    """Sorted spacings of ``trials`` independent uniform samples of size ``n``.

    Row ``t`` holds ``S_{n:1} <= ... <= S_{n:n}`` for trial ``t``; positions
    are drawn as in :func:`uniform_circle`.
    """
    if n < 2 or trials < 1:
        raise ValueError("need n >= 2 and at least one trial")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    theta = 2 * np.pi * rng.random((trials, n)) - np.pi
    u = np.sort(circle_positions(theta), axis=1)
    gaps = np.concatenate([np.diff(u, axis=1), 1.0 - (u[:, -1:] - u[:, :1])], axis=1)
    return np.sort(gaps, axis=1)


def expected_spacing(n: int, i: int) -> float:
    """``E S_{n:i} = (1/n) sum_{j=n+1-i}^{n} 1/j``, evaluated exactly."""
    if n < 1 or not 1 <= i <= n:
        raise ValueError("need 1 <= i <= n")
    return float(_expected_spacing_exact(n, i))


def _expected_spacing_exact(n: int, i: int) -> Fraction:
    return sum((Fraction(1, j) for j in range(n + 1 - i, n + 1)), Fraction(0)) / n


def expected_spacings(n: int) -> np.ndarray:
    """``E S_{n:1}, ..., E S_{n:n}``."""
    return np.array([expected_spacing(n, i) for i in range(1, n + 1)])


def whitworth_tail(n: int, x: float) -> float:
    """``P(S_{n:n} > x) = sum_{k >= 1, kx < 1} (-1)^{k+1} C(n,k) (1 - kx)^{n-1}``."""
    if n < 1:
        raise ValueError("n must be positive")
    if x <= 0:
        return 1.0
    if x >= 1:
        return 0.0
    if n == 1:
        return 0.0
    # exact arithmetic: with x = a/q the k-th term is C(n,k) (q - k a)^{n-1} / q^{n-1},
    # so the heavily cancelling alternating sum runs over integers
    a, q = Fraction(x).as_integer_ratio()
    total = 0
    k = 1
    while k <= n and k * a < q:
        term = math.comb(n, k) * (q - k * a) ** (n - 1)
        total += term if k % 2 else -term
        k += 1
    return float(min(max(Fraction(total, q ** (n - 1)), Fraction(0)), Fraction(1)))


def expected_betti0_barcode(n: int) -> Barcode:
    if n < 2:
        raise ValueError("need n >= 2")
    out = [PersistenceInterval(0, 0.0, expected_spacing(n, i)) for i in range(1, n)]
    out.append(PersistenceInterval(0, 0.0, INF))
    return Barcode(tuple(out))


def expected_betti1_barcode(n: int) -> Barcode:
    if n < 2:
        raise ValueError("need n >= 2")
    return Barcode((PersistenceInterval(1, expected_spacing(n, n), INF),))


def normalizing_constant(n: int) -> float:
    """``c_n = (n - 1) / (1 - E S_{n:n})``."""
    return (n - 1) / (1.0 - expected_spacing(n, n))


def empirical_betti0_function(n: int, x):
    """``(c_n / n) sum_{j=1}^{ceil((n-1) x)} 1/(n+1-j)`` for ``x`` in (0, 1]."""
    if n < 2:
        raise ValueError("need n >= 2")
    x = np.asarray(x, dtype=float)
    if np.any((x <= 0) | (x > 1)):
        raise ValueError("x must lie in (0, 1]")
    partial = _partial_sums(n)
    m = np.ceil((n - 1) * x - 1e-12).astype(int)
    out = normalizing_constant(n) / n * partial[m]
    return out if out.ndim else float(out)


def _partial_sums(n: int) -> np.ndarray:
    # partial[m] = sum_{j=1}^{m} 1/(n+1-j), m = 0..n-1
    terms = 1.0 / (n + 1 - np.arange(1, n))
    return np.concatenate([[0.0], np.cumsum(terms)])


def limit_sup_error(n: int, lo: float = 0.05, hi: float = 0.9) -> float:
    """``sup_{x in [lo, hi]} |nbeta_0(x) + ln(1 - x)|``, computed exactly.

    The empirical function is a step function; on each step the limit
    ``-ln(1 - x)`` is monotone, so the supremum is attained at step ends.
    """
    partial = _partial_sums(n)
    scale = normalizing_constant(n) / n
    best = 0.0
    m_lo = int(math.ceil((n - 1) * lo - 1e-12))
    m_hi = int(math.ceil((n - 1) * hi - 1e-12))
    for m in range(max(m_lo, 1), m_hi + 1):
        # step m covers x in ((m-1)/(n-1), m/(n-1)]
        a = max((m - 1) / (n - 1), lo)
        b = min(m / (n - 1), hi)
        v = scale * partial[m]
        for x in (a, b):
            best = max(best, abs(v + math.log1p(-x)))
    return best


@dataclass(frozen=True)
class CircleCheck:
    """Outcome of comparing Rips persistence with the spacings of one sample."""

    n: int
    seed: int
    spacings: tuple[float, ...]
    betti0_ok: bool
    betti1_ok: bool
    betti1: tuple[tuple[float, float], ...]

    @property
    def passed(self) -> bool:
        return self.betti0_ok and self.betti1_ok

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "max_spacing": max(self.spacings),
            "betti0_ok": self.betti0_ok,
            "betti1_ok": self.betti1_ok,
            "betti1": [[b, "inf" if d == INF else d] for b, d in self.betti1],
            "passed": self.passed,
        }


def check_circle_barcode(X: PointCloud, seed: int = -1, r_max: float = 0.6) -> CircleCheck:
    """Rips barcode of a circle sample against its spacings.

    Betti-0 finite deaths must equal the n-1 smallest spacings exactly.
    When the largest spacing is at most 1/3 there must be exactly one
    Betti-1 interval, born at the largest spacing and dying in [1/3, 1/2].
    """
    S = spacings(X)
    bc = reduce(rips_filtration(X, dim_max=2, r_max=r_max))
    deaths = sorted(J.death for J in bc.in_dim(0) if J.death != INF)
    expected = S.ordered[:-1].tolist()
    # intervals of zero length are pruned, so zero spacings drop out on both sides
    betti0_ok = deaths == [s for s in expected if s > 0]
    b1 = bc.in_dim(1)
    if S.largest <= 1 / 3:
        betti1_ok = (
            len(b1) == 1
            and b1[0].birth == S.largest
            and 1 / 3 <= b1[0].death <= 1 / 2
        )
    else:
        betti1_ok = True
    return CircleCheck(len(X), seed, tuple(S.gaps.tolist()), betti0_ok, betti1_ok,
                       tuple((J.birth, J.death) for J in b1))


def uniform_circle_persistence_check(n: int, seed: int) -> CircleCheck:
    """Sample ``n`` uniform circle points and run :func:`check_circle_barcode`."""
    if n < 3:
        raise ValueError("need n >= 3")
    return check_circle_barcode(uniform_circle(n, seed), seed)
