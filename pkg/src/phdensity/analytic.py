"""Closed-form barcodes and Betti-0 functions of the five parametric densities.

Morse barcodes describe the sublevel filtration ``{f <= r}``; Cech barcodes
describe the superlevel filtration ``{f >= 1/r}`` in dimensions >= 1. The
Cech Betti-0 information is carried by the Betti-0 function, the inverse of
the mass ``g(r)`` of the superlevel set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import INF, Barcode, BettiZeroCurve, FieldSpec, PersistenceInterval
from .distributions import (
    Bingham,
    MatrixVonMises,
    VonMises,
    VonMisesFisher,
    Watson,
    sphere_area,
    watson_log_norm,
)

_GL_NODES = 200
_BISECT_RTOL = 1e-13


def _iv(dim, a, b):
    return PersistenceInterval(dim, a, b)


def _check_field(field) -> FieldSpec:
    F = FieldSpec.of(field)
    if F.characteristic not in (0, 2):
        raise ValueError("analytic barcodes are available for characteristic 0 and 2")
    return F


def morse_barcode(spec, field: FieldSpec | int = 2) -> Barcode:
    """Barcode of the sublevel filtration ``{f <= r}``."""
    F = _check_field(field)
    lo, hi = spec.min_density, spec.max_density
    if isinstance(spec, VonMises):
        return Barcode((_iv(0, lo, INF), _iv(1, hi, INF)))
    if isinstance(spec, VonMisesFisher):
        return Barcode((_iv(0, lo, INF), _iv(spec.p - 1, hi, INF)))
    if isinstance(spec, Watson):
        p = spec.p
        return Barcode((_iv(0, lo, INF), _iv(p - 2, lo, hi), _iv(p - 1, hi, INF)))
    if isinstance(spec, Bingham):
        p, k = spec.p, spec.eigenvalues
        d = math.exp(spec.log_norm)
        out = [_iv(0, d * math.exp(k[0]), INF)]
        # one cell per eigenvalue gap: dimension i lives on [d e^{k_{i+1}}, d e^{k_{i+2}})
        out += [_iv(i, d * math.exp(k[i]), d * math.exp(k[i + 1])) for i in range(p - 1)]
        out.append(_iv(p - 1, d * math.exp(k[-1]), INF))
        return Barcode(tuple(out))
    if isinstance(spec, MatrixVonMises):
        out = [_iv(0, lo, INF), _iv(3, hi, INF)]
        if F.characteristic == 2:
            out += [_iv(1, lo, hi), _iv(2, lo, hi)]
        return Barcode(tuple(out))
    raise TypeError(f"unsupported distribution {type(spec).__name__}")


def cech_barcode(spec) -> Barcode:
    """Barcode of the superlevel filtration ``{f >= 1/r}`` in dimensions >= 1."""
    lo = spec.min_density
    if isinstance(spec, VonMises):
        return Barcode((_iv(1, 1 / lo, INF),))
    if isinstance(spec, (VonMisesFisher, Watson)):
        return Barcode((_iv(spec.p - 1, 1 / lo, INF),))
    if isinstance(spec, Bingham):
        p, k = spec.p, spec.eigenvalues
        inv_d = math.exp(-spec.log_norm)
        # dimension i lives on (1/d)[e^{-k_{p-i}}, e^{-k_{p-i-1}})
        out = [_iv(i, inv_d * math.exp(-k[p - i - 1]), inv_d * math.exp(-k[p - i - 2]))
               for i in range(1, p - 1)]
        out.append(_iv(p - 1, inv_d * math.exp(-k[0]), INF))
        return Barcode(tuple(out))
    if isinstance(spec, MatrixVonMises):
        return Barcode((_iv(3, 1 / lo, INF),))
    raise TypeError(f"unsupported distribution {type(spec).__name__}")


def _cech_components(spec) -> Barcode:
    # connected components of {f >= 1/r}; only needed for the duality check
    lo, hi = spec.min_density, spec.max_density
    if isinstance(spec, Watson) or (isinstance(spec, Bingham) and spec.p == 2):
        return Barcode((_iv(0, 1 / hi, INF), _iv(0, 1 / hi, 1 / lo)))
    if isinstance(spec, Bingham):
        k = spec.eigenvalues
        inv_d = math.exp(-spec.log_norm)
        return Barcode((_iv(0, inv_d * math.exp(-k[-1]), INF),
                        _iv(0, inv_d * math.exp(-k[-1]), inv_d * math.exp(-k[-2]))))
    return Barcode((_iv(0, 1 / hi, INF),))


def _reduced(bc: Barcode) -> list[PersistenceInterval]:
    out, dropped = [], False
    for J in bc:
        if J.dim == 0 and J.is_essential and not dropped:
            dropped = True
            continue
        out.append(J)
    return out


def duality_check(spec, rtol: float = 1e-12) -> bool:
    """Reciprocal endpoint correspondence between Morse and Cech barcodes.

    Every bounded Morse Betti-i interval ``[a, b)`` must pair off with a
    bounded Cech Betti-(p-2-i) interval whose endpoints are ``{1/b, 1/a}``,
    and vice versa (reduced homology: one essential Betti-0 class dropped
    on each side).
    """
    if isinstance(spec, MatrixVonMises):
        raise ValueError("duality check is defined for densities on spheres only")
    p = spec.p
    morse = [J for J in _reduced(morse_barcode(spec, 2)) if not J.is_essential]
    cech = [J for J in _reduced(_cech_components(spec) | cech_barcode(spec)) if not J.is_essential]
    if len(morse) != len(cech):
        return False
    remaining = list(cech)
    for J in morse:
        target = sorted((1 / J.death, 1 / J.birth))
        hit = None
        for idx, K in enumerate(remaining):
            if K.dim == p - 2 - J.dim and all(
                math.isclose(u, v, rel_tol=rtol) for u, v in zip(target, (K.birth, K.death))
            ):
                hit = idx
                break
        if hit is None:
            return False
        remaining.pop(hit)
    return not remaining


# ---------------------------------------------------------------------------
# mass of superlevel sets


def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


_GLX, _GLW = _gauss_legendre(_GL_NODES)


def _gl_integrate(fun, a, b):
    """Vectorized Gauss-Legendre over [a_i, b_i]; ``fun`` maps an array of nodes."""
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    half = 0.5 * (b - a)
    t = 0.5 * (b + a) + half * _GLX
    return np.sum(_GLW * fun(t), axis=-1) * half[..., 0]


@dataclass(frozen=True)
class GFunction:
    """``g(r)``: probability mass of ``{f >= 1/r}``.

    Evaluated by Gauss-Legendre quadrature over the colatitude about the
    symmetry axis, with the density's largest exponential factored out.
    """

    spec: object
    nodes: int = _GL_NODES
    _lo: float = field(init=False, repr=False)
    _hi: float = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_lo", 1.0 / self.spec.max_density)
        object.__setattr__(self, "_hi", 1.0 / self.spec.min_density)

    @property
    def support(self) -> tuple[float, float]:
        """``g`` is 0 below the first value and 1 from the second on."""
        return self._lo, self._hi

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        out[r >= self._hi] = 1.0
        mid = (r >= self._lo) & (r < self._hi)
        if np.any(mid):
            out[mid] = np.clip(self._mass(r[mid]), 0.0, 1.0)
        return out if out.ndim else float(out)

    def _mass(self, r: np.ndarray) -> np.ndarray:
        s = self.spec
        if isinstance(s, (VonMises, VonMisesFisher)):
            return _mass_vmf(s.p, s.kappa, s.log_norm, r)
        if isinstance(s, Watson):
            return _mass_watson(s.p, s.kappa, s.log_norm, r)
        if isinstance(s, MatrixVonMises):
            w = s.watson_lift()
            return _mass_watson(4, w.kappa, w.log_norm, r / s.lift_scale)
        if isinstance(s, Bingham):
            return _mass_bingham(s.eigenvalues, s.log_norm, r)
        raise TypeError(f"unsupported distribution {type(s).__name__}")

    def inverse(self, x, rtol: float = _BISECT_RTOL):
        """``inf {r : g(r) >= x}`` by vectorized bisection on the support."""
        x = np.asarray(x, dtype=float)
        if np.any((x <= 0) | (x > 1)):
            raise ValueError("x must lie in (0, 1]")
        lo = np.full(x.shape, self._lo)
        hi = np.full(x.shape, self._hi)
        if self._hi <= self._lo:
            return hi if hi.ndim else float(hi)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            above = self(mid) >= x
            hi = np.where(above, mid, hi)
            lo = np.where(above, lo, mid)
            if np.all(hi - lo <= rtol * hi):
                break
        return hi if hi.ndim else float(hi)


def _area_ratio(p):
    return sphere_area(p - 1) / sphere_area(p)


def _mass_vmf(p, kappa, log_c, r):
    # superlevel set is the cap x.mu >= a with c e^{kappa a} = 1/r
    a = np.clip(-(np.log(r) + log_c) / kappa, -1.0, 1.0)
    alpha = np.arccos(a)
    integral = _gl_integrate(lambda t: np.exp(kappa * (np.cos(t) - 1.0)) * np.sin(t) ** (p - 2), 0.0, alpha)
    return np.exp(log_c + kappa) * _area_ratio(p) * integral


def _mass_watson(p, kappa, log_d, r):
    # two caps |x.mu| >= a with d e^{kappa a^2} = 1/r
    a2 = np.clip(-(np.log(r) + log_d) / kappa, 0.0, 1.0)
    alpha = np.arccos(np.sqrt(a2))
    integral = _gl_integrate(lambda t: np.exp(-kappa * np.sin(t) ** 2) * np.sin(t) ** (p - 2), 0.0, alpha)
    return 2.0 * np.exp(log_d + kappa) * _area_ratio(p) * integral


def _mass_bingham(k, log_d, r):
    L = -(np.log(r) + log_d)  # f >= 1/r  iff  x^t K x >= L
    if len(k) == 2:
        # x = (cos phi, sin phi): (k2 - k1) sin^2 phi >= L - k1, four symmetric arcs
        s = np.clip((L - k[0]) / (k[1] - k[0]), 0.0, 1.0)
        phi0 = np.arcsin(np.sqrt(s))
        integral = _gl_integrate(
            lambda t: np.exp(k[0] * np.cos(t) ** 2 + k[1] * np.sin(t) ** 2 - k[1]), phi0, np.pi / 2
        )
        return 4.0 * np.exp(log_d + k[1]) * integral / (2 * np.pi)
    return np.array([_mass_bingham3(k, log_d, float(Li)) for Li in np.atleast_1d(L)])


def _mass_bingham3(k, log_d, L):
    # x = (sqrt(1-t^2) cos phi, sqrt(1-t^2) sin phi, t); uniform measure dt dphi / (4 pi)
    k1, k2, k3 = k

    def kphi(phi):
        return k1 * np.cos(phi) ** 2 + k2 * np.sin(phi) ** 2

    def inner(phi):
        kp = kphi(phi)
        tau = np.clip((L - kp) / (k3 - kp), 0.0, 1.0)
        t0 = np.sqrt(tau)
        return _gl_integrate(
            lambda t: np.exp(kp[..., None] + (k3 - kp[..., None]) * t * t - k3), t0, np.ones_like(t0)
        )

    # the lower limit sqrt(tau) has a square-root kink where kphi = L
    if k1 < L < k2:
        phis = math.acos(math.sqrt((k2 - L) / (k2 - k1)))
    else:
        phis = 0.0 if L <= k1 else math.pi / 2
    total = 0.0
    if phis > 0:
        # phi = phis (1 - v^2) smooths the kink at v = 0
        v = 0.5 * (_GLX + 1.0)
        phi = phis * (1.0 - v * v)
        total += np.sum(0.5 * _GLW * inner(phi) * 2 * phis * v)
    if phis < math.pi / 2:
        total += float(_gl_integrate(inner, phis, math.pi / 2))
    return 8.0 * math.exp(log_d + k3) * total / (4 * math.pi)


def g_function(spec, r):
    """Mass of ``{f >= 1/r}`` (clamped to [0, 1])."""
    if np.any(np.asarray(r) < 0):
        raise ValueError("r must be nonnegative")
    if getattr(spec, "kappa", 1.0) == 0:
        r = np.asarray(r, dtype=float)
        out = (r >= 1.0).astype(float)
        return out if out.ndim else float(out)
    return GFunction(spec)(r)


def g_vmf_s2(r, kappa: float):
    """Closed form of ``g`` for the von Mises-Fisher density on S^2."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        g = 1.0 / (1.0 - np.exp(-2.0 * kappa)) - 1.0 / (2.0 * kappa * r)
    return np.clip(g, 0.0, 1.0)


def betti0_vmf_s2(x, kappa: float):
    """Closed form of the Betti-0 function for the von Mises-Fisher density on S^2."""
    x = np.asarray(x, dtype=float)
    # divide numerator and denominator by e^{2 kappa} to stay finite for large kappa
    q = np.exp(-2.0 * kappa)
    return -np.expm1(-2.0 * kappa) / (2.0 * kappa * ((1.0 - x) + x * q))


def dbeta0_dkappa(x, kappa: float):
    """Partial derivative of :func:`betti0_vmf_s2` in kappa."""
    x = np.asarray(x, dtype=float)
    E = math.exp(2 * kappa)
    D = (1 - x) * E + x
    return (-(1 - x) * E * E + (1 + 2 * kappa - 2 * x) * E + x) / (2 * kappa ** 2 * D * D)


def dbeta0_dkappa_bound(kappa: float) -> float:
    return (math.exp(4 * kappa) + (1 + 2 * kappa) * math.exp(2 * kappa) + 1) / (2 * kappa ** 2)


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any((x <= 0) | (x > 1)) or np.any(np.isnan(x)):
        raise ValueError("the Betti-0 function is defined for x in (0, 1]")
    return x


def betti0_function(spec, x):
    """``beta_0(x) = inf {r : g(r) >= x}`` for ``x`` in (0, 1]."""
    x = _check_x(x)
    kappa = getattr(spec, "kappa", None)
    if kappa == 0:
        out = np.full(x.shape, 1.0 / spec.min_density)
    elif isinstance(spec, VonMisesFisher) and spec.p == 3:
        out = betti0_vmf_s2(x, spec.kappa)
    else:
        out = np.asarray(GFunction(spec).inverse(x))
    return out if out.ndim else float(out)


def betti0_curve(spec, grid: int) -> BettiZeroCurve:
    """Betti-0 function sampled at ``x_i = i / grid``, ``i = 1..grid``."""
    if grid < 1:
        raise ValueError("grid must be positive")
    xs = np.arange(1, grid + 1) / grid
    return BettiZeroCurve(xs, np.asarray(betti0_function(spec, xs)), label=describe(spec))


def parametric_curve(spec, t):
    """Points ``(x, r)`` on the graph of the Betti-0 function.

    ``t`` is the colatitude of the superlevel-set boundary about the mode:
    t in [0, pi] for von Mises and von Mises-Fisher, [0, pi/2] for Watson.
    Masses are taken with respect to the uniform probability measure.
    """
    t = np.asarray(t, dtype=float)
    if isinstance(spec, (VonMises, VonMisesFisher)):
        p, k, lc = spec.p, spec.kappa, spec.log_norm
        integral = _gl_integrate(lambda s: np.exp(k * (np.cos(s) - 1.0)) * np.sin(s) ** (p - 2), 0.0, t)
        x = np.exp(lc + k) * _area_ratio(p) * integral
        r = np.exp(-k * np.cos(t) - lc)
    elif isinstance(spec, Watson):
        p, k, ld = spec.p, spec.kappa, spec.log_norm
        integral = _gl_integrate(lambda s: np.exp(-k * np.sin(s) ** 2) * np.sin(s) ** (p - 2), 0.0, t)
        x = 2.0 * np.exp(ld + k) * _area_ratio(p) * integral
        r = np.exp(-k * np.cos(t) ** 2 - ld)
    else:
        raise ValueError("parametric curve is available for von Mises, von Mises-Fisher and Watson")
    return np.minimum(x, 1.0), r


def describe(spec) -> dict:
    """Plain-data description of a distribution, for output headers."""
    if isinstance(spec, VonMises):
        return {"family": "vm", "kappa": spec.kappa, "mu": spec.mu}
    if isinstance(spec, VonMisesFisher):
        return {"family": "vmf", "p": spec.p, "kappa": spec.kappa, "mu": spec.mu.tolist()}
    if isinstance(spec, Watson):
        return {"family": "watson", "p": spec.p, "kappa": spec.kappa, "mu": spec.mu.tolist()}
    if isinstance(spec, Bingham):
        return {"family": "bingham", "p": spec.p, "eigs": spec.eigenvalues.tolist()}
    if isinstance(spec, MatrixVonMises):
        return {"family": "matrixvm", "kappa": spec.kappa, "A": spec.A.tolist()}
    raise TypeError(f"unsupported distribution {type(spec).__name__}")


def matrix_vm_watson_check(spec: MatrixVonMises) -> tuple[Barcode, Barcode]:
    """The matrix von Mises Cech barcode and the one transported from S^3.

    The lift is the Watson density on S^3 with concentration 4 kappa; level
    ``r`` on SO(3) corresponds to level ``k r`` upstairs, so Cech values
    (reciprocal levels) scale by ``k``.
    """
    w = spec.watson_lift()
    k = math.exp(watson_log_norm(4, 4 * spec.kappa) + spec.kappa - spec.log_norm)
    lifted = Barcode(tuple(
        PersistenceInterval(3, k * J.birth, k * J.death if J.death != INF else INF)
        for J in cech_barcode(w)
    ))
    return cech_barcode(spec), lifted
