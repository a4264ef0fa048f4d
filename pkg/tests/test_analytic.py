import math

import numpy as np
import pytest
from conftest import unit_rows
from scipy import integrate, special

from phdensity.analytic import (
    GFunction,
    betti0_curve,
    betti0_function,
    betti0_vmf_s2,
    cech_barcode,
    duality_check,
    g_function,
    g_vmf_s2,
    matrix_vm_watson_check,
    morse_barcode,
    parametric_curve,
)
from phdensity.core import INF, Barcode
from phdensity.distributions import (
    Bingham,
    MatrixVonMises,
    VonMises,
    VonMisesFisher,
    Watson,
    bessel_i,
    bingham_norm,
    watson_norm,
)
from phdensity.geometry import cayley_klein, cayley_klein_batch

NORTH = np.array([0.0, 0.0, 1.0])


def close(a, b, rel=1e-12):
    return math.isclose(a, b, rel_tol=rel) or (a == b == INF)


def same_bars(got: Barcode, want: list[tuple[int, float, float]], rel=1e-12):
    g = sorted((J.dim, J.birth, J.death) for J in got)
    w = sorted(want)
    return len(g) == len(w) and all(a[0] == b[0] and close(a[1], b[1], rel) and close(a[2], b[2], rel)
                                    for a, b in zip(g, w))


def test_von_mises_barcodes():
    i0 = bessel_i(0, 1.0)
    assert same_bars(morse_barcode(VonMises(1.0)), [(0, math.exp(-1) / i0, INF), (1, math.e / i0, INF)])
    assert same_bars(cech_barcode(VonMises(1.0)), [(1, i0 * math.e, INF)])
    assert same_bars(cech_barcode(VonMises(0.0)), [(1, 1.0, INF)])


def test_watson_morse_barcode():
    d = watson_norm(3, 2.0)
    want = [(0, d, INF), (1, d, d * math.exp(2)), (2, d * math.exp(2), INF)]
    assert same_bars(morse_barcode(Watson(NORTH, 2.0)), want)
    assert same_bars(cech_barcode(Watson(NORTH, 2.0)), [(2, 1 / d, INF)])


def test_vmf_cech_barcode():
    assert same_bars(cech_barcode(VonMisesFisher(NORTH, 1.0)), [(2, math.e * math.sinh(1.0), INF)])
    s = VonMisesFisher(np.eye(4)[0], 2.0)
    assert same_bars(morse_barcode(s), [(0, s.min_density, INF), (3, s.max_density, INF)])


def test_bingham_barcodes():
    k = np.array([1.0, 2.0, 3.0])
    d = bingham_norm(k)
    spec = Bingham(k)
    morse = [(0, d * math.e, INF), (0, d * math.e, d * math.e ** 2), (1, d * math.e ** 2, d * math.e ** 3),
             (2, d * math.e ** 3, INF)]
    assert same_bars(morse_barcode(spec), morse)
    cech = [(1, math.exp(-2) / d, math.exp(-1) / d), (2, math.exp(-1) / d, INF)]
    assert same_bars(cech_barcode(spec), cech)
    k2 = Bingham(np.array([0.5, 2.0]))
    d2 = bingham_norm([0.5, 2.0])
    assert same_bars(morse_barcode(k2), [(0, d2 * math.exp(0.5), INF), (0, d2 * math.exp(0.5), d2 * math.exp(2)),
                                         (1, d2 * math.exp(2), INF)])


def test_matrix_vm_field_dependence():
    spec = MatrixVonMises(np.eye(3), 1.0)
    lo, hi = spec.min_density, spec.max_density
    assert same_bars(morse_barcode(spec, 0), [(0, lo, INF), (3, hi, INF)])
    assert same_bars(morse_barcode(spec, 2), [(0, lo, INF), (1, lo, hi), (2, lo, hi), (3, hi, INF)])
    with pytest.raises(ValueError):
        morse_barcode(spec, 3)


def test_morse_endpoints_match_density_extremes(rng):
    specs = [VonMises(0.7), VonMisesFisher(NORTH, 3.0), Watson(NORTH, 1.5), Bingham(np.array([0.2, 0.9, 1.7])),
             MatrixVonMises(cayley_klein(unit_rows(rng, 1, 4)[0]), 0.6)]
    for s in specs:
        ends = {v for J in morse_barcode(s) for v in (J.birth, J.death) if v != INF}
        assert min(ends) == pytest.approx(s.min_density, rel=1e-12)
        assert max(ends) == pytest.approx(s.max_density, rel=1e-12)


def test_matrix_vm_cech_matches_lift():
    for k in (0.3, 1.0, 2.5):
        own, lifted = matrix_vm_watson_check(MatrixVonMises(np.eye(3), k))
        assert same_bars(own, [(J.dim, J.birth, J.death) for J in lifted], rel=1e-10)


def test_duality():
    assert duality_check(Bingham(np.array([1.0, 2.0, 3.0])))
    assert duality_check(Bingham(np.array([0.5, 2.0])))
    assert duality_check(Watson(NORTH, 2.0))
    assert duality_check(Watson(np.eye(4)[0], 1.0))
    assert duality_check(VonMisesFisher(NORTH, 1.0))
    with pytest.raises(ValueError):
        duality_check(MatrixVonMises(np.eye(3), 1.0))


# mass function and Betti-0 function


def test_g_endpoints():
    s = VonMisesFisher(NORTH, 1.0)
    assert g_function(s, 1 / s.max_density) == pytest.approx(0, abs=1e-15)
    assert g_function(s, 1 / s.min_density) == 1.0
    assert g_function(s, 0.0) == 0.0 and g_function(s, 1e9) == 1.0
    with pytest.raises(ValueError):
        g_function(s, -1.0)


def test_g_closed_form_vs_quadrature():
    for k in (0.5, 1.0, 3.0):
        s = VonMisesFisher(NORTH, k)
        r = np.linspace(1 / s.max_density, 1 / s.min_density, 200)
        assert np.max(np.abs(GFunction(s)(r) - g_vmf_s2(r, k))) < 1e-8


def cap_mass(spec, r):
    """Independent route: adaptive quadrature in z = x.mu over the cap(s) {f >= 1/r}."""
    p, k, c = spec.p, spec.kappa, math.exp(spec.log_norm)
    area = math.gamma(p / 2) / (math.sqrt(math.pi) * math.gamma((p - 1) / 2))
    level = math.log(1 / (r * c)) / k
    if isinstance(spec, Watson):
        a, caps, f = math.sqrt(max(level, 0.0)), 2, lambda z: c * math.exp(k * z * z)
    else:
        a, caps, f = max(level, -1.0), 1, lambda z: c * math.exp(k * z)
    v, _ = integrate.quad(lambda z: f(z) * (1 - z * z) ** ((p - 3) / 2) * area, a, 1, epsabs=0, epsrel=1e-12)
    return caps * v


def test_g_watson_s2_closed_form():
    s, k = Watson(NORTH, 2.0), 2.0
    d = watson_norm(3, k)
    lo, hi = GFunction(s).support
    for r in np.linspace(lo, hi, 9)[1:-1]:
        a = math.sqrt(math.log(1 / (r * d)) / k)
        exact = d * math.sqrt(math.pi / k) / 2 * (special.erfi(math.sqrt(k)) - special.erfi(math.sqrt(k) * a))
        assert GFunction(s)(r) == pytest.approx(exact, abs=1e-12)


def test_g_p4_vs_adaptive_quadrature():
    for s in (Watson(np.eye(4)[0], 1.5), VonMisesFisher(np.eye(4)[3], 2.0), Watson(NORTH, 3.0)):
        lo, hi = GFunction(s).support
        for r in np.linspace(lo, hi, 7)[1:-1]:
            assert GFunction(s)(r) == pytest.approx(cap_mass(s, r), abs=1e-10)


def test_g_bingham_and_matrix_vm_monte_carlo(rng):
    X = unit_rows(rng, 400_000, 3)
    s = Bingham(np.array([0.4, 1.1, 2.3]))
    f = s.pdf(X)
    lo, hi = GFunction(s).support
    for r in np.linspace(lo, hi, 6)[1:-1]:
        v = f * (f >= 1 / r)
        assert abs(GFunction(s)(r) - v.mean()) < 4 * v.std() / math.sqrt(len(v))
    m = MatrixVonMises(np.eye(3), 1.0)
    R = cayley_klein_batch(unit_rows(rng, 400_000, 4))
    f = m.pdf(R)
    lo, hi = GFunction(m).support
    for r in np.linspace(lo, hi, 6)[1:-1]:
        v = f * (f >= 1 / r)
        assert abs(GFunction(m)(r) - v.mean()) < 4 * v.std() / math.sqrt(len(v))


def test_betti0_examples():
    assert betti0_function(VonMisesFisher(NORTH, 1.0), 0.5) == pytest.approx(math.tanh(1.0), abs=1e-15)
    assert betti0_function(VonMises(0.0), 0.3) == 1.0
    assert np.all(betti0_function(VonMises(0.0), np.array([0.1, 1.0])) == 1.0)
    for x in (0.0, 1.5, -0.2):
        with pytest.raises(ValueError):
            betti0_function(VonMises(1.0), x)


def test_betti0_closed_form_vs_inversion():
    xs = np.arange(1, 1025) / 1024
    for k in (0.5, 1.0, 2.0, 5.0):
        s = VonMisesFisher(NORTH, k)
        assert np.max(np.abs(betti0_vmf_s2(xs, k) - GFunction(s).inverse(xs))) < 1e-6


def test_roundtrip_and_monotone():
    xs = np.linspace(0.02, 0.98, 49)
    for s in (VonMises(1.0), VonMisesFisher(NORTH, 2.0), Watson(NORTH, 2.0), Bingham(np.array([0.5, 1.0, 2.0])),
              MatrixVonMises(np.eye(3), 0.7)):
        b = np.asarray(betti0_function(s, xs))
        assert np.all(np.diff(b) >= 0)
        assert np.max(np.abs(GFunction(s)(b) - xs)) < 1e-8


def test_concentration_limits():
    xs = np.array([0.1, 0.5, 0.9])
    assert np.allclose(betti0_function(VonMisesFisher(NORTH, 1e-6), xs), 1.0, atol=1e-5)
    assert np.allclose(betti0_function(VonMises(1e-6), xs), 1.0, atol=1e-5)
    big = [float(np.max(betti0_function(VonMisesFisher(NORTH, k), xs))) for k in (10.0, 100.0, 1000.0)]
    assert big[0] > big[1] > big[2] and big[2] < 0.01


def test_parametric_curve_traces_betti0():
    for s, tmax in ((VonMises(1.0), math.pi), (VonMisesFisher(NORTH, 2.0), math.pi),
                    (VonMisesFisher(np.eye(4)[0], 1.0), math.pi), (Watson(NORTH, 2.0), math.pi / 2)):
        t = np.linspace(0.05, tmax - 0.05, 40)
        x, r = parametric_curve(s, t)
        assert np.max(np.abs(betti0_function(s, x) - r)) < 1e-6
    with pytest.raises(ValueError):
        parametric_curve(Bingham(np.array([1.0, 2.0, 3.0])), [0.1])


def test_betti0_curve_grid():
    c = betti0_curve(VonMisesFisher(NORTH, 1.0), 8)
    assert c.xs.tolist() == [i / 8 for i in range(1, 9)]
    assert c.rs[3] == pytest.approx(math.tanh(1.0), abs=1e-15)
    with pytest.raises(ValueError):
        betti0_curve(VonMises(1.0), 0)
