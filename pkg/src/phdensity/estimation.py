"""Concentration estimates for von Mises-Fisher and Watson samples, plug-in
barcodes, and Monte Carlo convergence experiments."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate, optimize

from .analytic import betti0_vmf_s2, cech_barcode, morse_barcode
from .core import Barcode
from .distributions import (
    VonMises,
    VonMisesFisher,
    Watson,
    bessel_ratio,
)
from .geometry import SPHERE, PointCloud
from .metric import distance

OVERFLOW_MARGIN = 1e-12


class ConcentrationOverflow(ValueError):
    """The resultant statistic sits on the boundary; the estimate would be infinite."""


# ---------------------------------------------------------------------------
# A_p = I_{p/2} / I_{p/2-1}

_SMALL = 1e-4


def a_p(p: int, kappa: float) -> float:
    """Mean resultant length of vMF(kappa) on S^{p-1}."""
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    if kappa == 0:
        return 0.0
    if kappa < _SMALL:
        return kappa / p * (1.0 - kappa * kappa / (p * (p + 2)))
    return bessel_ratio(p / 2 - 1, kappa)


def a_p_prime(p: int, kappa: float) -> float:
    """``A_p'(kappa) = 1 - A_p^2 - (p - 1) A_p / kappa``; ``1/p`` at zero."""
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    if kappa < _SMALL:
        return 1.0 / p - 3.0 * kappa * kappa / (p * p * (p + 2))
    A = a_p(p, kappa)
    return 1.0 - A * A - (p - 1) * A / kappa


def invert_a_p(p: int, rho: float) -> float:
    """Solve ``A_p(kappa) = rho`` by safeguarded Newton iteration."""
    if not 0 <= rho < 1:
        if rho >= 1:
            raise ConcentrationOverflow(f"resultant length {rho} has no finite preimage")
        raise ValueError("rho must lie in [0, 1)")
    if rho == 0:
        return 0.0
    lo, hi = 0.0, 1.0
    while a_p(p, hi) <= rho:
        lo, hi = hi, 2.0 * hi
        if hi > 1e12:
            raise ConcentrationOverflow("concentration exceeds 1e12")
    # start from the standard approximation, clipped into the bracket
    k = rho * (p - rho * rho) / (1.0 - rho * rho)
    k = min(max(k, lo), hi)
    for _ in range(200):
        F = a_p(p, k) - rho
        if F > 0:
            hi = k
        else:
            lo = k
        step = F / a_p_prime(p, k)
        new = k - step
        if not lo < new < hi:
            new = 0.5 * (lo + hi)
        if abs(new - k) <= 1e-15 * max(1.0, k):
            k = new
            break
        k = new
    if abs(a_p(p, k) - rho) > 1e-12:
        raise ArithmeticError(f"A_p inversion did not converge for rho={rho}")
    return k


# ---------------------------------------------------------------------------
# von Mises-Fisher


@dataclass(frozen=True)
class VmfEstimate:
    mu_hat: np.ndarray | None
    kappa_hat: float
    resultant: float
    n: int
    p: int
    degenerate: bool = False

    @property
    def asymptotic_variance(self) -> float:
        """``1 / (n A_p'(kappa_hat))``."""
        return 1.0 / (self.n * a_p_prime(self.p, self.kappa_hat))


def _sphere_points(X) -> np.ndarray:
    if isinstance(X, PointCloud):
        if X.space != SPHERE:
            raise ValueError("estimation needs a sphere point cloud")
        return np.asarray(X.points)
    return np.atleast_2d(np.asarray(X, dtype=float))


def mle_vmf(X) -> VmfEstimate:
    """Mean direction and concentration of a vMF sample."""
    P = _sphere_points(X)
    n, p = P.shape
    if n < 1:
        raise ValueError("empty sample")
    xbar = P.mean(axis=0)
    R = float(np.linalg.norm(xbar))
    if R > 1.0 - OVERFLOW_MARGIN:
        raise ConcentrationOverflow(f"resultant length {R} is within 1e-12 of one")
    if R == 0.0:
        return VmfEstimate(None, 0.0, 0.0, n, p, degenerate=True)
    return VmfEstimate(xbar / R, invert_a_p(p, R), R, n, p)


# ---------------------------------------------------------------------------
# Watson


def watson_moments(p: int, kappa: float) -> tuple[float, float]:
    """``E[t^2]`` and ``Var[t^2]`` of ``t = x^t mu`` under Watson(kappa).

    These are the first two derivatives of ``-log d``.
    """
    def moment(j):
        val, _ = integrate.quad(
            lambda th: math.cos(th) ** (2 * j) * math.exp(-kappa * math.sin(th) ** 2) * math.sin(th) ** (p - 2),
            0.0, math.pi / 2, epsabs=0.0, epsrel=1e-13, limit=200,
        )
        return val

    m0, m1, m2 = moment(0), moment(1), moment(2)
    e1 = m1 / m0
    return e1, m2 / m0 - e1 * e1


@dataclass(frozen=True)
class WatsonEstimate:
    mu_hat: np.ndarray
    kappa_hat: float
    tau: float
    n: int
    p: int

    @property
    def asymptotic_variance(self) -> float:
        """``-(d^2/dkappa^2 log d)^{-1} / n``."""
        return 1.0 / (self.n * watson_moments(self.p, self.kappa_hat)[1])


def mle_watson(X, tie_rtol: float = 1e-12) -> WatsonEstimate:
    """Axis and concentration of a bipolar Watson sample."""
    P = _sphere_points(X)
    n, p = P.shape
    if n < p:
        raise ValueError("need at least p points")
    T = P.T @ P / n
    w, V = np.linalg.eigh(T)
    if w[-1] - w[-2] <= tie_rtol * max(w[-1], 1e-300):
        raise ValueError("leading scatter eigenvalue is not simple")
    mu = V[:, -1]
    tau = float(np.mean((P @ mu) ** 2))
    if tau <= 1.0 / p:
        raise ValueError("sample is not bipolar; the concentration estimate is not positive")
    if tau > 1.0 - OVERFLOW_MARGIN:
        raise ConcentrationOverflow("scatter is concentrated on a single axis")
    hi = 1.0
    while watson_moments(p, hi)[0] < tau:
        hi *= 2.0
        if hi > 1e8:
            raise ConcentrationOverflow("concentration exceeds 1e8")
    kappa = optimize.brentq(lambda k: watson_moments(p, k)[0] - tau, 0.0, hi, xtol=1e-14, rtol=1e-14)
    return WatsonEstimate(mu, kappa, tau, n, p)


def watson_log_norm_second_derivative(p: int, kappa: float) -> float:
    """``d^2/dkappa^2 log d(kappa)`` by quadrature."""
    return -watson_moments(p, kappa)[1]


# ---------------------------------------------------------------------------
# plug-in barcodes and experiments

BARCODE_FAMILIES = ("morse_b0", "morse_btop", "cech_btop")


def estimated_barcodes(kappa_hat: float, family: str = "vmf", filtration: str = "morse",
                       field: int = 2, p: int = 3) -> Barcode:
    """Analytic barcode evaluated at the estimated concentration."""
    if not math.isfinite(kappa_hat):
        raise ConcentrationOverflow("estimate is not finite")
    mu = np.eye(p)[-1]
    if family == "vm":
        spec = VonMises(kappa_hat)
    elif family == "vmf":
        spec = VonMisesFisher(mu, kappa_hat)
    elif family == "watson":
        spec = Watson(mu, kappa_hat)
    else:
        raise ValueError(f"no estimator for family {family!r}")
    if filtration == "morse":
        return morse_barcode(spec, field)
    if filtration == "cech":
        return cech_barcode(spec)
    raise ValueError("filtration must be 'morse' or 'cech'")


def _family_distances(kappa_hat: float, truth: dict[str, Barcode], p: int) -> dict[str, float]:
    morse = estimated_barcodes(kappa_hat, "vmf", "morse", 2, p)
    cech = estimated_barcodes(kappa_hat, "vmf", "cech", 2, p)
    return {
        "morse_b0": distance(morse.restrict([0]), truth["morse_b0"]),
        "morse_btop": distance(morse.restrict([p - 1]), truth["morse_btop"]),
        "cech_btop": distance(cech.restrict([p - 1]), truth["cech_btop"]),
    }


def loglog_slope(ns, means) -> tuple[float, float]:
    """Least-squares slope and intercept of ``log mean`` against ``log n``."""
    slope, intercept = np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(means, float)), 1)
    return float(slope), float(intercept)


@dataclass
class Series:
    """Per-n summary of one Monte Carlo quantity."""

    means: list[float]
    ses: list[float]
    slope: float
    intercept: float
    raw: list[list[float]] = field(repr=False)

    @classmethod
    def from_raw(cls, ns, raw) -> "Series":
        means = [float(np.mean(r)) for r in raw]
        ses = [float(np.std(r, ddof=1) / math.sqrt(len(r))) if len(r) > 1 else math.nan for r in raw]
        slope, intercept = loglog_slope(ns, means)
        return cls(means, ses, slope, intercept, [list(map(float, r)) for r in raw])


@dataclass
class ConvergenceReport:
    experiment: str
    family: str
    p: int
    kappa: float
    n_list: list[int]
    trials: int
    seed: int
    series: dict[str, Series]
    degenerate: list[int]
    second_moment: list[float] = field(default_factory=list)

    def slope(self, name: str) -> float:
        return self.series[name].slope

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _trial_seeds(seed: int, n_list, trials):
    children = np.random.SeedSequence(seed).spawn(len(n_list) * trials)
    return [children[i * trials:(i + 1) * trials] for i in range(len(n_list))]


def _check_design(n_list, kappa):
    n_list = [int(n) for n in n_list]
    if len(n_list) < 2 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list needs at least two strictly increasing sizes")
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    return n_list


def convergence_experiment(family: str = "vmf", p: int = 3, kappa: float = 2.0,
                           n_list=(100, 316, 1000, 3162, 10000), trials: int = 200,
                           seed: int = 0) -> ConvergenceReport:
    """Mean barcode distance between plug-in and true barcodes versus n.

    Trials run sequentially, each with its own spawned seed, so results
    depend only on ``seed`` and are aggregated by trial index.
    """
    if family != "vmf":
        raise ValueError("the convergence experiment is defined for the vmf family")
    n_list = _check_design(n_list, kappa)
    mu = np.eye(p)[-1]
    spec = VonMisesFisher(mu, kappa)
    morse, cech = morse_barcode(spec), cech_barcode(spec)
    truth = {
        "morse_b0": morse.restrict([0]),
        "morse_btop": morse.restrict([p - 1]),
        "cech_btop": cech.restrict([p - 1]),
    }
    raw = {k: [] for k in BARCODE_FAMILIES}
    raw_kappa, degenerate = [], []
    for n, seeds in zip(n_list, _trial_seeds(seed, n_list, trials)):
        per = {k: [] for k in BARCODE_FAMILIES}
        ks, bad = [], 0
        for ss in seeds:
            X = spec.sample(n, np.random.default_rng(ss))
            try:
                est = mle_vmf(X)
            except ConcentrationOverflow:
                bad += 1
                continue
            for k, v in _family_distances(est.kappa_hat, truth, p).items():
                per[k].append(v)
            ks.append(est.kappa_hat)
        for k in BARCODE_FAMILIES:
            raw[k].append(per[k])
        raw_kappa.append(ks)
        degenerate.append(bad)
    series = {k: Series.from_raw(n_list, raw[k]) for k in BARCODE_FAMILIES}
    second = [float(np.mean((np.asarray(ks) - kappa) ** 2)) for ks in raw_kappa]
    series["kappa_abs_error"] = Series.from_raw(n_list, [np.abs(np.asarray(ks) - kappa) for ks in raw_kappa])
    return ConvergenceReport("convergence", family, p, kappa, n_list, trials, seed,
                             series, degenerate, second)


def betti0_sup_error_experiment(kappa: float = 2.0, n_list=(100, 316, 1000, 3162, 10000),
                                trials: int = 200, seed: int = 0, grid: int = 1024) -> ConvergenceReport:
    """Sup over an x-grid of the plug-in Betti-0 function error, on S^2."""
    n_list = _check_design(n_list, kappa)
    p = 3
    spec = VonMisesFisher(np.eye(p)[-1], kappa)
    xs = np.arange(1, grid + 1) / grid
    truth = betti0_vmf_s2(xs, kappa)
    raw, degenerate = [], []
    for n, seeds in zip(n_list, _trial_seeds(seed, n_list, trials)):
        errs, bad = [], 0
        for ss in seeds:
            X = spec.sample(n, np.random.default_rng(ss))
            try:
                est = mle_vmf(X)
            except ConcentrationOverflow:
                bad += 1
                continue
            if est.kappa_hat == 0:
                bad += 1
                continue
            errs.append(float(np.max(np.abs(betti0_vmf_s2(xs, est.kappa_hat) - truth))))
        raw.append(errs)
        degenerate.append(bad)
    return ConvergenceReport("betti0_sup_error", "vmf", p, kappa, n_list, trials, seed,
                             {"sup_error": Series.from_raw(n_list, raw)}, degenerate)
