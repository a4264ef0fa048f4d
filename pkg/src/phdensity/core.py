"""Extended reals, persistence intervals, barcodes and coefficient fields.

Extended reals are plain Python floats; ``math.inf`` and ``-math.inf`` play
the role of the two infinite points, which already gives the right total
order. The only arithmetic that needs guarding is ``inf - inf``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

INF = math.inf


def ext_sub(a: float, b: float) -> float:
    """``a - b`` on the extended reals; ``inf - inf`` is undefined."""
    if math.isinf(a) and math.isinf(b) and (a > 0) == (b > 0):
        raise ArithmeticError(f"undefined extended-real difference {a} - {b}")
    return a - b


def _gap(a: float, b: float) -> float:
    # |a - b| where equal infinities contribute nothing
    if a == b:
        return 0.0
    return abs(ext_sub(a, b))


@dataclass(frozen=True)
class FieldSpec:
    """Coefficient field, identified by its characteristic."""

    characteristic: int = 2

    def __post_init__(self):
        c = self.characteristic
        if c < 0 or (c != 0 and not _is_prime(c)):
            raise ValueError(f"characteristic must be 0 or prime, got {c}")

    @classmethod
    def of(cls, value: "FieldSpec | int") -> "FieldSpec":
        return value if isinstance(value, FieldSpec) else cls(int(value))


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % q for q in range(2, math.isqrt(n) + 1))


F2 = FieldSpec(2)
QQ = FieldSpec(0)


@dataclass(frozen=True, order=True)
class PersistenceInterval:
    """A homology class living on ``[birth, death)`` in dimension ``dim``.

    The openness flags only matter for :meth:`contains`; every measure
    (length, symmetric difference, barcode distance) ignores them.
    """

    dim: int
    birth: float
    death: float
    birth_closed: bool = True
    death_closed: bool | None = None

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError("dimension must be nonnegative")
        birth, death = float(self.birth), float(self.death)
        if math.isnan(birth) or math.isnan(death):
            raise ValueError("interval endpoints must not be NaN")
        if birth > death:
            raise ValueError(f"birth {birth} exceeds death {death}")
        object.__setattr__(self, "birth", birth)
        object.__setattr__(self, "death", death)
        if self.death_closed is None:
            # essential classes are written [b, inf], finite ones [b, d)
            object.__setattr__(self, "death_closed", death == INF)

    @property
    def length(self) -> float:
        return interval_length(self)

    @property
    def is_essential(self) -> bool:
        return self.death == INF

    def contains(self, r: float) -> bool:
        lo = r >= self.birth if self.birth_closed else r > self.birth
        hi = r <= self.death if self.death_closed else r < self.death
        return lo and hi

    def __contains__(self, r: float) -> bool:
        return self.contains(r)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "birth": _enc(self.birth),
            "death": _enc(self.death),
            "birth_closed": self.birth_closed,
            "death_closed": self.death_closed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PersistenceInterval":
        return cls(
            int(d["dim"]),
            _dec(d["birth"]),
            _dec(d["death"]),
            bool(d.get("birth_closed", True)),
            d.get("death_closed"),
        )


def interval_length(J: PersistenceInterval) -> float:
    if J.birth == J.death:
        return 0.0
    return ext_sub(J.death, J.birth)


def symmetric_difference(J: PersistenceInterval, K: PersistenceInterval) -> float:
    """Lebesgue measure of ``(J | K) - (J & K)``."""
    if min(J.death, K.death) <= max(J.birth, K.birth):
        return interval_length(J) + interval_length(K)
    return _gap(J.birth, K.birth) + _gap(J.death, K.death)


def _enc(v: float):
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    return v


def _dec(v) -> float:
    if isinstance(v, str):
        s = v.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return INF
        if s in ("-inf", "-infinity"):
            return -INF
        return float(s)
    return float(v)


def _sort_key(J: PersistenceInterval):
    return (J.dim, J.birth, J.death, not J.birth_closed, J.death_closed)


@dataclass(frozen=True)
class Barcode:
    """Multiset of persistence intervals, kept in canonical order.

    Zero-length intervals are dropped on construction.
    """

    intervals: tuple[PersistenceInterval, ...] = ()

    def __post_init__(self):
        kept = [J for J in self.intervals if interval_length(J) > 0]
        object.__setattr__(self, "intervals", tuple(sorted(kept, key=_sort_key)))

    @classmethod
    def from_pairs(cls, dim: int, pairs: Iterable[tuple[float, float]]) -> "Barcode":
        return cls(tuple(PersistenceInterval(dim, b, d) for b, d in pairs))

    def __iter__(self) -> Iterator[PersistenceInterval]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __or__(self, other: "Barcode") -> "Barcode":
        return Barcode(self.intervals + other.intervals)

    @property
    def dims(self) -> list[int]:
        return sorted({J.dim for J in self.intervals})

    def in_dim(self, k: int) -> tuple[PersistenceInterval, ...]:
        return tuple(J for J in self.intervals if J.dim == k)

    def restrict(self, dims: Iterable[int]) -> "Barcode":
        keep = set(dims)
        return Barcode(tuple(J for J in self.intervals if J.dim in keep))

    def betti(self, k: int, r: float) -> int:
        return sum(1 for J in self.in_dim(k) if J.contains(r))

    def without_short(self, min_length: float) -> "Barcode":
        """Drop intervals of length ``<= min_length``."""
        return Barcode(tuple(J for J in self.intervals if J.length > min_length))

    def pairs(self, k: int) -> list[tuple[float, float]]:
        return [(J.birth, J.death) for J in self.in_dim(k)]

    # serialization

    def to_json(self, **kwargs) -> str:
        return json.dumps([J.to_dict() for J in self.intervals], **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "Barcode":
        data = json.loads(text)
        if isinstance(data, dict):
            data = data["intervals"]
        return cls(tuple(PersistenceInterval.from_dict(d) for d in data))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["dim", "birth", "death"])
        for J in self.intervals:
            w.writerow([J.dim, _enc(J.birth), _enc(J.death)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Barcode":
        rows = csv.DictReader(io.StringIO(text))
        return cls(
            tuple(
                PersistenceInterval(int(r["dim"]), _dec(r["birth"]), _dec(r["death"]))
                for r in rows
            )
        )


@dataclass(frozen=True)
class BettiZeroCurve:
    """Sampled Betti-0 function: nondecreasing ``r`` over ``x`` in (0, 1].

    ``label`` records what produced the table (family and parameters).
    """

    xs: np.ndarray
    rs: np.ndarray
    label: dict = field(default_factory=dict)

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        rs = np.asarray(self.rs, dtype=float)
        if xs.shape != rs.shape or xs.ndim != 1:
            raise ValueError("xs and rs must be 1-D arrays of equal length")
        if np.any(xs <= 0) or np.any(xs > 1):
            raise ValueError("Betti-0 curve is defined on (0, 1] only")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("xs must be strictly increasing")
        if np.any(np.diff(rs) < -1e-12 * np.maximum(1.0, np.abs(rs[1:]))):
            raise ValueError("Betti-0 curve must be nondecreasing")
        xs.flags.writeable = False
        rs.flags.writeable = False
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "rs", rs)

    def __call__(self, x):
        return np.interp(x, self.xs, self.rs)

    def to_csv(self) -> str:
        lines = ["x,r"] + [f"{x!r},{r!r}" for x, r in zip(self.xs.tolist(), self.rs.tolist())]
        return "\n".join(lines) + "\n"


def barcode_from_intervals(items: Sequence[tuple[int, float, float]]) -> Barcode:
    return Barcode(tuple(PersistenceInterval(k, b, d) for k, b, d in items))
