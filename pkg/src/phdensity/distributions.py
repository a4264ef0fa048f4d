"""Directional densities: von Mises, von Mises-Fisher, Watson, Bingham and
matrix von Mises on SO(3).

All densities are taken with respect to the uniform probability measure of
their space, so a concentration of zero gives the constant density 1.
Normalizing constants are kept in log space; e^kappa overflows long before
the concentrations the estimation experiments can produce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .geometry import (
    CIRCLE,
    SO3,
    SPHERE,
    PointCloud,
    cayley_klein_batch,
    is_rotation,
    quaternion_from_rotation,
)

# ---------------------------------------------------------------------------
# modified Bessel functions of the first kind

_SERIES_RTOL = 1e-15


def _asymptotic_cutoff(nu: float) -> float:
    return 50.0 + nu * nu


def _bessel_series_sum(nu: float, x: float) -> float:
    # sum_k (x/2)^(2k+nu) / (k! Gamma(k+nu+1)), relative to the k = 0 term
    q = 0.25 * x * x
    total, term, k = 1.0, 1.0, 0
    while True:
        k += 1
        term *= q / (k * (k + nu))
        total += term
        if term < _SERIES_RTOL * total and k > 0.5 * x:
            break
    return total


def _log_bessel_series(nu: float, x: float) -> float:
    return nu * math.log(0.5 * x) - math.lgamma(nu + 1.0) + math.log(_bessel_series_sum(nu, x))


def _bessel_asymptotic_sum(nu: float, x: float) -> float:
    # e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(nu) / x^k; terminates for half-integer nu
    mu4 = 4.0 * nu * nu
    total, term, k = 1.0, 1.0, 0
    while True:
        k += 1
        factor = (mu4 - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if factor == 0.0:
            break
        new = -term * factor
        if abs(new) >= abs(term):
            break
        term = new
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return total


def _log_bessel_asymptotic(nu: float, x: float) -> float:
    return x - 0.5 * math.log(2.0 * math.pi * x) + math.log(_bessel_asymptotic_sum(nu, x))


def log_bessel_i(nu: float, kappa: float) -> float:
    """``log I_nu(kappa)`` for ``nu >= 0`` and ``kappa >= 0``."""
    if kappa < 0:
        raise ValueError("Bessel argument must be nonnegative")
    if nu < 0:
        raise ValueError("Bessel order must be nonnegative")
    if kappa == 0:
        return 0.0 if nu == 0 else -math.inf
    if kappa < _asymptotic_cutoff(nu):
        return _log_bessel_series(nu, kappa)
    return _log_bessel_asymptotic(nu, kappa)


def bessel_ratio(nu: float, kappa: float) -> float:
    """``I_{nu+1}(kappa) / I_nu(kappa)`` without forming either factor.

    Both orders use the same expansion so the shared exponential cancels
    exactly; only the series sums are divided.
    """
    if kappa < 0 or nu < 0:
        raise ValueError("order and argument must be nonnegative")
    if kappa == 0:
        return 0.0
    if kappa < _asymptotic_cutoff(nu + 1):
        return (0.5 * kappa / (nu + 1.0)) * _bessel_series_sum(nu + 1, kappa) / _bessel_series_sum(nu, kappa)
    return _bessel_asymptotic_sum(nu + 1, kappa) / _bessel_asymptotic_sum(nu, kappa)


def bessel_i(nu: float, kappa: float) -> float:
    """Modified Bessel function of the first kind, ``I_nu(kappa)``."""
    return math.exp(log_bessel_i(nu, kappa))


def bessel_i_integral(nu: float, kappa: float) -> float:
    """``I_nu`` from its integral representation over [-1, 1] (adaptive quadrature).

    Independent of :func:`bessel_i`; used to cross-check the series.
    """
    if kappa < 0:
        raise ValueError("Bessel argument must be nonnegative")
    if kappa == 0:
        return 1.0 if nu == 0 else 0.0
    val, _ = integrate.quad(
        lambda t: math.exp(kappa * (t - 1.0)), -1.0, 1.0,
        weight="alg", wvar=(nu - 0.5, nu - 0.5), epsabs=0.0, epsrel=1e-13, limit=200,
    )
    logpref = nu * math.log(kappa / 2) - math.lgamma(nu + 0.5) - math.lgamma(0.5)
    return math.exp(logpref + kappa + math.log(val))


# ---------------------------------------------------------------------------
# normalizing constants


def sphere_area(p: int) -> float:
    """Surface area of the unit sphere S^{p-1} in R^p."""
    return 2.0 * math.pi ** (p / 2) / math.gamma(p / 2)


def _area_ratio(p: int) -> float:
    # s_{p-2} / s_{p-1}
    return sphere_area(p - 1) / sphere_area(p)


def vmf_log_norm(p: int, kappa: float) -> float:
    """``log c(kappa)`` for the von Mises-Fisher density on S^{p-1}."""
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    if kappa == 0:
        return 0.0
    nu = p / 2 - 1
    return nu * math.log(kappa / 2) - math.lgamma(p / 2) - log_bessel_i(nu, kappa)


def vmf_norm(p: int, kappa: float) -> float:
    return math.exp(vmf_log_norm(p, kappa))


def watson_log_norm(p: int, kappa: float) -> float:
    """``log d(kappa)`` for the Watson density on S^{p-1}.

    ``1/d = (s_{p-2}/s_{p-1}) int_0^pi exp(kappa cos^2 t) sin^{p-2} t dt``,
    evaluated by adaptive quadrature with ``exp(kappa)`` factored out.
    """
    if p < 2:
        raise ValueError("p must be at least 2")
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    if kappa == 0:
        return 0.0
    # integrand symmetric about pi/2
    val, _ = integrate.quad(
        lambda t: math.exp(-kappa * math.sin(t) ** 2) * math.sin(t) ** (p - 2),
        0.0, math.pi / 2, epsabs=0.0, epsrel=1e-13, limit=200,
    )
    return -(kappa + math.log(2.0 * _area_ratio(p) * val))


def watson_norm(p: int, kappa: float) -> float:
    return math.exp(watson_log_norm(p, kappa))


def _check_bingham_eigs(eigs) -> np.ndarray:
    k = np.asarray(eigs, dtype=float)
    if k.ndim != 1 or len(k) < 2:
        raise ValueError("Bingham needs at least two eigenvalues")
    if k[0] <= 0 or np.any(np.diff(k) <= 0):
        raise ValueError("Bingham eigenvalues must satisfy 0 < k1 < k2 < ... < kp")
    return k


def bingham_log_norm(eigs) -> float:
    """``log d(K)`` for ``K = diag(k_1 < ... < k_p)``, p in {2, 3}.

    Nested adaptive quadrature with ``exp(k_p)`` factored out.
    """
    k = _check_bingham_eigs(eigs)
    p = len(k)
    if p > 3:
        raise ValueError("Bingham normalizer is only available for p <= 3")
    top = k[-1]
    if p == 2:
        # (1/2pi) int exp(k1 cos^2 + k2 sin^2), four symmetric quarters
        val, _ = integrate.quad(
            lambda t: math.exp(k[0] * math.cos(t) ** 2 + k[1] * math.sin(t) ** 2 - top),
            0.0, math.pi / 2, epsabs=0.0, epsrel=1e-13,
        )
        return -(top + math.log(4.0 * val / (2 * math.pi)))

    # p = 3: uniform measure is dt dphi / (4 pi) with t = cos(colatitude about v3)
    def inner(phi):
        kp = k[0] * math.cos(phi) ** 2 + k[1] * math.sin(phi) ** 2
        v, _ = integrate.quad(
            lambda t: math.exp(kp + (k[2] - kp) * t * t - top), 0.0, 1.0,
            epsabs=0.0, epsrel=1e-13,
        )
        return v

    val, _ = integrate.quad(inner, 0.0, math.pi / 2, epsabs=0.0, epsrel=1e-12)
    return -(top + math.log(8.0 * val / (4 * math.pi) * 1.0))


def bingham_norm(eigs) -> float:
    return math.exp(bingham_log_norm(eigs))


def matrix_vm_log_norm(kappa: float) -> float:
    """``log c(kappa)`` for the matrix von Mises density on SO(3).

    With respect to Haar probability measure the rotation angle w has density
    (1 - cos w)/pi and tr = 1 + 2 cos w, giving
    ``1/c = e^kappa (I_0(2 kappa) - I_1(2 kappa))``.
    """
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    if kappa == 0:
        return 0.0
    l0, l1 = log_bessel_i(0, 2 * kappa), log_bessel_i(1, 2 * kappa)
    return -(kappa + l0 + math.log1p(-math.exp(l1 - l0)))


# ---------------------------------------------------------------------------
# parametric families


def _unit(v, name="mu") -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if len(v) < 2:
        raise ValueError(f"{name} must have at least two components")
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError(f"{name} must be a unit vector")
    return v / nrm


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


@dataclass(frozen=True)
class VonMises:
    kappa: float
    mu: float = 0.0

    space = CIRCLE
    p = 2

    def __post_init__(self):
        if not self.kappa >= 0:
            raise ValueError("kappa must be nonnegative")
        if not math.isfinite(self.mu):
            raise ValueError("mu must be a finite angle")

    @property
    def log_norm(self) -> float:
        return -log_bessel_i(0, self.kappa)

    def logpdf(self, theta):
        return self.log_norm + self.kappa * np.cos(np.asarray(theta, dtype=float) - self.mu)

    def pdf(self, theta):
        return np.exp(self.logpdf(theta))

    @property
    def min_density(self) -> float:
        return math.exp(self.log_norm - self.kappa)

    @property
    def max_density(self) -> float:
        return math.exp(self.log_norm + self.kappa)

    def sample(self, n: int, seed=None) -> PointCloud:
        rng = _rng(seed)
        if self.kappa == 0:
            u = rng.random(n)
            theta = 2 * np.pi * u - np.pi
        else:
            theta = rng.vonmises(self.mu, self.kappa, n)
            theta = np.mod(theta + np.pi, 2 * np.pi) - np.pi
        return PointCloud(CIRCLE, theta)


@dataclass(frozen=True)
class VonMisesFisher:
    mu: np.ndarray
    kappa: float

    space = SPHERE

    def __post_init__(self):
        object.__setattr__(self, "mu", _unit(self.mu))
        if not self.kappa >= 0:
            raise ValueError("kappa must be nonnegative")

    @property
    def p(self) -> int:
        return len(self.mu)

    @property
    def log_norm(self) -> float:
        return vmf_log_norm(self.p, self.kappa)

    def logpdf(self, x):
        return self.log_norm + self.kappa * (np.asarray(x, dtype=float) @ self.mu)

    def pdf(self, x):
        return np.exp(self.logpdf(x))

    @property
    def min_density(self) -> float:
        return math.exp(self.log_norm - self.kappa)

    @property
    def max_density(self) -> float:
        return math.exp(self.log_norm + self.kappa)

    def sample(self, n: int, seed=None) -> PointCloud:
        rng = _rng(seed)
        w = _wood_marginal(self.p, self.kappa, n, rng)
        return PointCloud(SPHERE, _attach_tangent(self.mu, w, rng))


@dataclass(frozen=True)
class Watson:
    mu: np.ndarray
    kappa: float

    space = SPHERE

    def __post_init__(self):
        object.__setattr__(self, "mu", _unit(self.mu))
        if not self.kappa >= 0:
            raise ValueError("kappa must be nonnegative")

    @property
    def p(self) -> int:
        return len(self.mu)

    @property
    def log_norm(self) -> float:
        return watson_log_norm(self.p, self.kappa)

    def logpdf(self, x):
        t = np.asarray(x, dtype=float) @ self.mu
        return self.log_norm + self.kappa * t * t

    def pdf(self, x):
        return np.exp(self.logpdf(x))

    @property
    def min_density(self) -> float:
        return math.exp(self.log_norm)

    @property
    def max_density(self) -> float:
        return math.exp(self.log_norm + self.kappa)

    def sample(self, n: int, seed=None) -> PointCloud:
        rng = _rng(seed)
        t = _watson_marginal(self.p, self.kappa, n, rng)
        return PointCloud(SPHERE, _attach_tangent(self.mu, t, rng))


@dataclass(frozen=True)
class Bingham:
    """Bingham density ``d(K) exp(x^t K x)`` with ``K = V diag(k) V^t``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None

    space = SPHERE

    def __post_init__(self):
        k = _check_bingham_eigs(self.eigenvalues)
        V = np.eye(len(k)) if self.eigenvectors is None else np.asarray(self.eigenvectors, float)
        if V.shape != (len(k), len(k)) or np.max(np.abs(V.T @ V - np.eye(len(k)))) > 1e-10:
            raise ValueError("eigenvectors must form an orthonormal p x p matrix")
        object.__setattr__(self, "eigenvalues", k)
        object.__setattr__(self, "eigenvectors", V)

    @property
    def p(self) -> int:
        return len(self.eigenvalues)

    @property
    def K(self) -> np.ndarray:
        V = self.eigenvectors
        return V @ np.diag(self.eigenvalues) @ V.T

    @property
    def log_norm(self) -> float:
        return bingham_log_norm(self.eigenvalues)

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        return self.log_norm + np.einsum("...i,ij,...j->...", x, self.K, x)

    def pdf(self, x):
        return np.exp(self.logpdf(x))

    @property
    def min_density(self) -> float:
        return math.exp(self.log_norm + self.eigenvalues[0])

    @property
    def max_density(self) -> float:
        return math.exp(self.log_norm + self.eigenvalues[-1])

    def sample(self, n: int, seed=None) -> PointCloud:
        raise ValueError("Bingham sampling is not supported")


@dataclass(frozen=True)
class MatrixVonMises:
    """``c(kappa) exp(kappa tr(X^t A))`` on SO(3)."""

    A: np.ndarray
    kappa: float

    space = SO3
    p = 3

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if not is_rotation(A):
            raise ValueError("A must be a rotation matrix")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        object.__setattr__(self, "A", A)

    @property
    def log_norm(self) -> float:
        return matrix_vm_log_norm(self.kappa)

    def logpdf(self, X):
        X = np.asarray(X, dtype=float)
        return self.log_norm + self.kappa * np.einsum("...ab,ab->...", X, self.A)

    def pdf(self, X):
        return np.exp(self.logpdf(X))

    @property
    def min_density(self) -> float:
        return math.exp(self.log_norm - self.kappa)

    @property
    def max_density(self) -> float:
        return math.exp(self.log_norm + 3 * self.kappa)

    def watson_lift(self) -> Watson:
        """Watson density on S^3 whose Cayley-Klein pushforward is this one."""
        return Watson(quaternion_from_rotation(self.A), 4 * self.kappa)

    @property
    def lift_scale(self) -> float:
        """``k = d(4 kappa) e^kappa / c(kappa)``: the lift maps level r to level k r."""
        return math.exp(watson_log_norm(4, 4 * self.kappa) + self.kappa - self.log_norm)

    def sample(self, n: int, seed=None) -> PointCloud:
        Q = self.watson_lift().sample(n, seed).points
        return PointCloud(SO3, cayley_klein_batch(Q))


Distribution = VonMises | VonMisesFisher | Watson | Bingham | MatrixVonMises


def density(spec: Distribution, point) -> float:
    """Density of ``spec`` at one point, after checking the point is on the space."""
    x = np.asarray(point, dtype=float)
    if spec.space == CIRCLE:
        if x.ndim != 0:
            raise ValueError("circle points are angles")
    elif spec.space == SPHERE:
        if x.shape != (spec.p,) or abs(np.linalg.norm(x) - 1) > 1e-12:
            raise ValueError(f"point is not on S^{spec.p - 1}")
    elif not is_rotation(x):
        raise ValueError("point is not in SO(3)")
    return float(spec.pdf(x))


def sample(spec: Distribution, n: int, seed=None) -> PointCloud:
    if n < 1:
        raise ValueError("sample size must be positive")
    return spec.sample(n, seed)


# ---------------------------------------------------------------------------
# samplers


def _wood_marginal(p: int, kappa: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draws of ``w = x^t mu`` under vMF(kappa) on S^{p-1} (Wood's rejection scheme)."""
    m = p - 1
    b = m / (2.0 * kappa + math.sqrt(4.0 * kappa * kappa + m * m))
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + m * math.log(1.0 - x0 * x0)
    out = np.empty(n)
    filled = 0
    while filled < n:
        k = max(16, int(1.3 * (n - filled)))
        z = rng.beta(m / 2.0, m / 2.0, k)
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        u = rng.random(k)
        ok = kappa * w + m * np.log1p(-x0 * w) - c >= np.log(u)
        w = w[ok][: n - filled]
        out[filled:filled + len(w)] = w
        filled += len(w)
    return out


def _watson_marginal(p: int, kappa: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draws of ``t = x^t mu`` under Watson(kappa), kappa >= 0.

    Proposal: a vMF marginal with a random sign, density prop. to
    cosh(kappa t) on the sphere marginal; ``e^{kappa t^2} / cosh(kappa t)``
    peaks at |t| = 1, which fixes the acceptance bound.
    """
    if kappa == 0:
        return _wood_marginal(p, 0.0, n, rng)
    out = np.empty(n)
    filled = 0
    while filled < n:
        k = max(16, int(2 * (n - filled)))
        w = _wood_marginal(p, kappa, k, rng)
        t = np.where(rng.random(k) < 0.5, -w, w)
        a = np.abs(t)
        log_acc = kappa * (t * t - a) + math.log1p(math.exp(-2 * kappa)) - np.log1p(np.exp(-2 * kappa * a))
        ok = np.log(rng.random(k)) <= log_acc
        t = t[ok][: n - filled]
        out[filled:filled + len(t)] = t
        filled += len(t)
    return out


def _attach_tangent(mu: np.ndarray, t: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Points ``t mu + sqrt(1 - t^2) v`` with ``v`` uniform on the sphere orthogonal to mu."""
    n, p = len(t), len(mu)
    v = rng.standard_normal((n, p))
    v -= np.outer(v @ mu, mu)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    x = t[:, None] * mu[None, :] + np.sqrt(np.clip(1.0 - t * t, 0.0, None))[:, None] * v
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def uniform_circle(n: int, seed=None) -> PointCloud:
    """``n`` uniform angles ``2 pi u - pi`` with ``u`` uniform on [0, 1)."""
    rng = _rng(seed)
    return PointCloud(CIRCLE, 2 * np.pi * rng.random(n) - np.pi)


def make_spec(family: str, *, p: int = 3, kappa: float = 1.0, mu=None, eigs=None, A=None):
    """Build a distribution from CLI-style arguments."""
    family = family.lower()
    if family in ("vm", "vonmises"):
        return VonMises(kappa, 0.0 if mu is None else float(np.atleast_1d(mu)[0]))
    if family in ("vmf", "watson"):
        if mu is None:
            mu = np.eye(p)[-1]
        mu = np.asarray(mu, dtype=float)
        mu = mu / np.linalg.norm(mu)
        cls = VonMisesFisher if family == "vmf" else Watson
        return cls(mu, kappa)
    if family == "bingham":
        if eigs is None:
            raise ValueError("bingham needs eigenvalues")
        return Bingham(np.asarray(eigs, dtype=float))
    if family in ("matrixvm", "mvm"):
        return MatrixVonMises(np.eye(3) if A is None else A, kappa)
    raise ValueError(f"unknown family {family!r}")
