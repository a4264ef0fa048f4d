"""Barcode quasi-metric: optimal partial matching of intervals.

Matched intervals cost their symmetric difference, unmatched ones their
length. Essential intervals (infinite death) can only be matched among
themselves at finite cost, so they are handled in a separate phase and a
mismatch in their counts makes the distance infinite.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import INF, Barcode, PersistenceInterval, interval_length, symmetric_difference

BRUTE_FORCE_CAP = 6


@dataclass(frozen=True)
class Matching:
    """Distance plus the matched pairs and unmatched intervals of each side."""

    distance: float
    pairs: tuple[tuple[PersistenceInterval, PersistenceInterval], ...]
    unmatched_left: tuple[PersistenceInterval, ...]
    unmatched_right: tuple[PersistenceInterval, ...]

    def to_dict(self) -> dict:
        return {
            "distance": "inf" if self.distance == INF else self.distance,
            "pairs": [[a.to_dict(), b.to_dict()] for a, b in self.pairs],
            "unmatched_left": [J.to_dict() for J in self.unmatched_left],
            "unmatched_right": [J.to_dict() for J in self.unmatched_right],
        }


def _split(bc: Barcode, k: int):
    Js = bc.in_dim(k)
    fin = [J for J in Js if J.death != INF]
    ess = [J for J in Js if J.death == INF]
    return fin, ess


def _match_finite(A: list[PersistenceInterval], B: list[PersistenceInterval]):
    n, m = len(A), len(B)
    if n == 0 and m == 0:
        return [], [], []
    size = n + m
    cost = np.zeros((size, size))
    big = 0.0
    # rows: A then deletion slots for B; columns: B then deletion slots for A
    for i, a in enumerate(A):
        for j, b in enumerate(B):
            cost[i, j] = symmetric_difference(a, b)
        big += a.length
    for b in B:
        big += b.length
    forbidden = 2.0 * big + 1.0
    for i, a in enumerate(A):
        cost[i, m:] = forbidden
        cost[i, m + i] = a.length
    for j, b in enumerate(B):
        cost[n:, j] = forbidden
        cost[n + j, j] = b.length
    rows, cols = linear_sum_assignment(cost)
    pairs, left, right = [], [], []
    for i, j in zip(rows, cols):
        if i < n and j < m:
            pairs.append((A[i], B[j]))
        elif i < n:
            left.append(A[i])
        elif j < m:
            right.append(B[j])
    return pairs, left, right


def _exact_length(J: PersistenceInterval):
    if not (math.isfinite(J.birth) and math.isfinite(J.death)):
        return interval_length(J)
    return Fraction(J.death) - Fraction(J.birth)


def _exact_cost(a: PersistenceInterval, b: PersistenceInterval):
    """Symmetric difference in exact rational arithmetic.

    Different matchings with equal real cost (e.g. a disjoint pair matched
    or left unmatched) then total to the same float.
    """
    ends = (a.birth, a.death, b.birth, b.death)
    if not all(math.isfinite(v) for v in ends):
        if a.death == INF and b.death == INF and math.isfinite(a.birth) and math.isfinite(b.birth):
            return abs(Fraction(a.birth) - Fraction(b.birth))
        return symmetric_difference(a, b)
    overlap = max(Fraction(0), min(Fraction(a.death), Fraction(b.death)) - max(Fraction(a.birth), Fraction(b.birth)))
    return _exact_length(a) + _exact_length(b) - 2 * overlap


def _exact_sum(terms) -> float:
    if any(t == INF for t in terms):
        return INF
    return float(sum(terms, Fraction(0)))


def _total(pairs, left, right) -> float:
    terms = [_exact_cost(a, b) for a, b in pairs]
    terms += [_exact_length(J) for J in left]
    terms += [_exact_length(J) for J in right]
    return _exact_sum(terms)


def optimal_matching(B1: Barcode, B2: Barcode) -> Matching:
    """Optimal partial matching, dimension by dimension."""
    pairs, left, right = [], [], []
    unbalanced = False
    for k in sorted(set(B1.dims) | set(B2.dims)):
        f1, e1 = _split(B1, k)
        f2, e2 = _split(B2, k)
        if len(e1) != len(e2):
            # an unmatched or finite-paired essential interval costs infinity
            unbalanced = True
            left += e1
            right += e2
        else:
            # sorted births pair optimally for the cost |a - b|
            pairs += list(zip(sorted(e1, key=lambda J: J.birth), sorted(e2, key=lambda J: J.birth)))
        p, l, r = _match_finite(f1, f2)
        pairs += p
        left += l
        right += r
    total = INF if unbalanced else _total(pairs, left, right)
    return Matching(total, tuple(pairs), tuple(left), tuple(right))


def distance(B1: Barcode, B2: Barcode) -> float:
    """Quasi-metric between barcodes; ``inf`` when essential counts differ."""
    return optimal_matching(B1, B2).distance


def _partial_matchings(n: int, m: int):
    # every injective partial map from range(n) into range(m)
    for r in range(min(n, m) + 1):
        for rows in itertools.combinations(range(n), r):
            for cols in itertools.permutations(range(m), r):
                yield list(zip(rows, cols))


def brute_force_distance(B1: Barcode, B2: Barcode, cap: int = BRUTE_FORCE_CAP) -> float:
    """Exhaustive minimum over all partial matchings (small barcodes only)."""
    total: list[Fraction] = []
    for k in sorted(set(B1.dims) | set(B2.dims)):
        A, B = list(B1.in_dim(k)), list(B2.in_dim(k))
        if len(A) > cap or len(B) > cap:
            raise ValueError(f"brute force is capped at {cap} intervals per side per dimension")
        best = None
        for M in _partial_matchings(len(A), len(B)):
            used_a = {i for i, _ in M}
            used_b = {j for _, j in M}
            terms = [_exact_cost(A[i], B[j]) for i, j in M]
            terms += [_exact_length(A[i]) for i in range(len(A)) if i not in used_a]
            terms += [_exact_length(B[j]) for j in range(len(B)) if j not in used_b]
            if any(t == INF for t in terms):
                continue
            value = sum(terms, Fraction(0))
            if best is None or value < best:
                best = value
        if best is None:
            return INF
        total.append(best)
    return _exact_sum(total)
