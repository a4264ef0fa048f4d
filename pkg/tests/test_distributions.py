import math

import numpy as np
import pytest
from conftest import unit_rows
from scipy import integrate, special, stats

from phdensity.distributions import (
    Bingham,
    MatrixVonMises,
    VonMises,
    VonMisesFisher,
    Watson,
    bessel_i,
    bessel_i_integral,
    bessel_ratio,
    bingham_norm,
    density,
    log_bessel_i,
    make_spec,
    matrix_vm_log_norm,
    sample,
    uniform_circle,
    vmf_norm,
    watson_norm,
)
from phdensity.geometry import cayley_klein, cayley_klein_batch


# Bessel functions


def test_bessel_closed_forms():
    assert bessel_i(0, 0.0) == 1.0
    k = 2.0
    assert bessel_i(0.5, k) == pytest.approx(math.sqrt(2 / (math.pi * k)) * math.sinh(k), rel=1e-12)
    i32 = math.sqrt(2 / (math.pi * k)) * (math.cosh(k) - math.sinh(k) / k)
    assert bessel_i(1.5, k) == pytest.approx(i32, rel=1e-12)
    for k in (1.0, 2.0, 5.0):
        assert bessel_ratio(0.5, k) == pytest.approx(1 / math.tanh(k) - 1 / k, abs=1e-14)


@pytest.mark.parametrize("nu", [0, 0.5, 1, 1.5, 2.5])
@pytest.mark.parametrize("kappa", [0.01, 0.7, 3.0, 20.0, 60.0])
def test_bessel_series_vs_integral_and_scipy(nu, kappa):
    assert bessel_i(nu, kappa) == pytest.approx(bessel_i_integral(nu, kappa), rel=1e-11)
    assert bessel_i(nu, kappa) == pytest.approx(special.iv(nu, kappa), rel=1e-12)


@pytest.mark.parametrize("kappa", [100.0, 500.0, 5000.0])
def test_log_bessel_large_argument(kappa):
    for nu in (0, 0.5, 1):
        assert log_bessel_i(nu, kappa) == pytest.approx(math.log(special.ive(nu, kappa)) + kappa, rel=1e-13)


def test_bessel_negative_argument():
    with pytest.raises(ValueError):
        bessel_i(0, -1.0)


# normalizing constants


def test_von_mises_normalization_and_values():
    assert np.allclose(VonMises(0.0).pdf(np.linspace(-3, 3, 7)), 1.0)
    for k in (0.5, 2.0, 10.0):
        val, _ = integrate.quad(lambda t: float(VonMises(k, 0.3).pdf(t)), -math.pi, math.pi, epsabs=0, epsrel=1e-12)
        assert val / (2 * math.pi) == pytest.approx(1, abs=1e-10)


def test_vmf_values():
    mu = np.array([0.0, 0.0, 1.0])
    assert density(VonMisesFisher(mu, 1.0), mu) == pytest.approx(math.e / math.sinh(1), rel=1e-12)
    for k in (0.1, 1.0, 7.0, 40.0):
        assert vmf_norm(3, k) == pytest.approx(k / math.sinh(k), rel=1e-12)
    assert vmf_norm(3, 0.0) == 1.0


def sphere_average(f, p):
    """Average over S^{p-1} (p = 2, 3) by adaptive quadrature."""
    if p == 2:
        v, _ = integrate.quad(lambda t: f(np.array([math.cos(t), math.sin(t)])), 0, 2 * math.pi, epsrel=1e-12)
        return v / (2 * math.pi)
    g = lambda phi, z: f(np.array([math.sqrt(1 - z * z) * math.cos(phi), math.sqrt(1 - z * z) * math.sin(phi), z]))
    v, _ = integrate.dblquad(g, -1, 1, 0, 2 * math.pi, epsabs=0, epsrel=1e-11)
    return v / (4 * math.pi)


@pytest.mark.parametrize("spec", [
    VonMisesFisher(np.array([0.6, 0.0, 0.8]), 3.0),
    Watson(np.array([0.0, 1.0, 0.0]), 2.0),
    Watson(np.array([0.6, 0.8]), 1.5),
    Bingham(np.array([0.5, 1.2, 3.0])),
    Bingham(np.array([0.3, 2.0])),
])
def test_density_integrates_to_one(spec):
    assert sphere_average(lambda x: float(spec.pdf(x)), spec.p) == pytest.approx(1, abs=1e-6)


def test_normalization_monte_carlo_high_dimension(rng):
    X = unit_rows(rng, 200_000, 5)
    for spec in (VonMisesFisher(np.eye(5)[0], 2.0), Watson(np.eye(5)[1], 3.0)):
        v = spec.pdf(X)
        assert abs(v.mean() - 1) < 3 * v.std() / math.sqrt(len(v))


def test_matrix_vm_normalization_monte_carlo(rng):
    # Cayley-Klein pushes uniform quaternions to Haar measure
    R = cayley_klein_batch(unit_rows(rng, 200_000, 4))
    spec = MatrixVonMises(cayley_klein(np.array([0.5, 0.5, 0.5, 0.5])), 1.0)
    v = spec.pdf(R)
    assert abs(v.mean() - 1) < 3 * v.std() / math.sqrt(len(v))


def test_matrix_vm_norm_by_angle_quadrature():
    for k in (0.3, 1.0, 4.0):
        val, _ = integrate.quad(lambda w: (1 - math.cos(w)) / math.pi * math.exp(k * (1 + 2 * math.cos(w))), 0, math.pi)
        assert matrix_vm_log_norm(k) == pytest.approx(-math.log(val), abs=1e-12)


def test_watson_norm_two_rules():
    assert watson_norm(3, 0.0) == 1.0 and watson_norm(2, 0.0) == 1.0
    # p = 2, kappa = 1 by Gauss-Legendre
    t, w = np.polynomial.legendre.leggauss(80)
    theta = math.pi / 2 * (t + 1)
    gl = float(np.sum(w * np.exp(np.cos(theta) ** 2))) * (math.pi / 2) / math.pi
    assert 1 / watson_norm(2, 1.0) == pytest.approx(gl, rel=1e-12)
    # Kummer function: 1/d = M(1/2, p/2, kappa)
    for p in (2, 3, 4, 6):
        for k in (0.5, 2.0, 10.0, 50.0):
            assert 1 / watson_norm(p, k) == pytest.approx(special.hyp1f1(0.5, p / 2, k), rel=1e-9)


def test_bingham_norm_against_dblquad():
    for eigs in ([0.5, 1.0, 2.0], [1.0, 2.0, 3.0], [0.2, 0.4, 7.0]):
        k = np.array(eigs)
        f = lambda x: math.exp(float(x @ (k * x)))
        assert 1 / bingham_norm(eigs) == pytest.approx(sphere_average(f, 3), rel=1e-9)
    with pytest.raises(ValueError):
        bingham_norm([1.0, 2.0, 3.0, 4.0])
    with pytest.raises(ValueError):
        Bingham(np.array([1.0, 1.0, 2.0]))
    with pytest.raises(ValueError):
        Bingham(np.array([0.0, 1.0, 2.0]))


def test_matrix_vm_lift_scale_is_one(rng):
    A = cayley_klein(unit_rows(rng, 1, 4)[0])
    for k in (0.5, 1.0, 3.0):
        spec = MatrixVonMises(A, k)
        assert spec.lift_scale == pytest.approx(1.0, abs=1e-10)
        Q = unit_rows(rng, 100, 4)
        fw = spec.watson_lift().pdf(Q)
        fa = spec.pdf(cayley_klein_batch(Q))
        assert np.allclose(fw, spec.lift_scale * fa, rtol=1e-10)


# extremes


def test_extreme_locations(rng):
    mu = np.array([0.0, 0.6, 0.8])
    X = unit_rows(rng, 20_000, 3)
    eq = np.cross(mu, [1.0, 0, 0])
    eq /= np.linalg.norm(eq)

    v = VonMisesFisher(mu, 2.0)
    assert density(v, mu) == pytest.approx(v.max_density) and density(v, -mu) == pytest.approx(v.min_density)
    w = Watson(mu, 2.0)
    assert density(w, mu) == pytest.approx(w.max_density) == density(w, -mu)
    assert density(w, eq) == pytest.approx(w.min_density)
    assert w.min_density == pytest.approx(watson_norm(3, 2.0))
    V = np.linalg.qr(rng.standard_normal((3, 3)))[0]
    b = Bingham(np.array([0.5, 1.0, 2.5]), V)
    assert density(b, V[:, 2]) == pytest.approx(b.max_density) == density(b, -V[:, 2])
    assert density(b, V[:, 0]) == pytest.approx(b.min_density)
    for spec in (v, w, b):
        f = spec.pdf(X)
        assert f.max() <= spec.max_density * (1 + 1e-12) and f.min() >= spec.min_density * (1 - 1e-12)
    m = MatrixVonMises(cayley_klein(np.array([0.5, 0.5, 0.5, 0.5])), 1.5)
    assert density(m, m.A) == pytest.approx(m.max_density)


def test_density_rejects_off_manifold_points():
    with pytest.raises(ValueError):
        density(VonMisesFisher(np.eye(3)[0], 1.0), np.array([1.0, 1.0, 0.0]))
    with pytest.raises(ValueError):
        density(MatrixVonMises(np.eye(3), 1.0), 2 * np.eye(3))


# sampling


def ks_pvalue(samples, cdf):
    return stats.kstest(samples, cdf).pvalue


def vmf3_cdf(k):
    return lambda w: np.expm1(k * (np.asarray(w) + 1)) / np.expm1(2 * k)


def watson3_cdf(k):
    s = math.sqrt(k)
    return lambda t: (special.erfi(s * np.asarray(t)) + special.erfi(s)) / (2 * special.erfi(s))


def tabulated_cdf(pdf, lo, hi, m=4001):
    grid = np.linspace(lo, hi, m)
    vals = np.array([integrate.quad(pdf, lo, x)[0] if x > lo else 0.0 for x in grid])
    vals /= vals[-1]
    return lambda x: np.interp(x, grid, vals)


def test_vmf_marginal_ks():
    mu = np.array([0.0, 0.0, 1.0])
    for k in (0.5, 2.0, 20.0):
        t = sample(VonMisesFisher(mu, k), 100_000, seed=3).points @ mu
        assert ks_pvalue(t, vmf3_cdf(k)) > 1e-3


def test_vmf_marginal_ks_p4():
    k = 2.0
    mu = np.eye(4)[0]
    t = sample(VonMisesFisher(mu, k), 100_000, seed=4).points @ mu
    assert ks_pvalue(t, tabulated_cdf(lambda w: math.exp(k * w) * math.sqrt(1 - w * w), -1, 1)) > 1e-3


def test_watson_marginal_ks():
    mu = np.array([0.6, 0.0, 0.8])
    for k in (0.5, 2.0, 8.0):
        t = sample(Watson(mu, k), 100_000, seed=5).points @ mu
        assert ks_pvalue(t, watson3_cdf(k)) > 1e-3


def test_vmf_resultant_length():
    mu = np.array([0.0, 0.0, 1.0])
    n = 100_000
    X = sample(VonMisesFisher(mu, 2.0), n, seed=11).points
    a3 = 1 / math.tanh(2.0) - 0.5
    w = X @ mu
    assert abs(np.linalg.norm(X.mean(axis=0)) - a3) < 3 * w.std() / math.sqrt(n) + 1e-4
    U = sample(VonMisesFisher(mu, 0.0), n, seed=12).points
    assert np.linalg.norm(U.mean(axis=0)) < 3 * math.sqrt(3 / n)


def test_von_mises_circle_sampler():
    for k in (0.0, 1.0, 4.0):
        theta = sample(VonMises(k), 50_000, seed=2).points
        assert np.all((theta >= -math.pi) & (theta < math.pi))
        cdf = tabulated_cdf(lambda t: math.exp(k * math.cos(t)), -math.pi, math.pi)
        assert ks_pvalue(theta, cdf) > 1e-3
    u = uniform_circle(1000, seed=0).points
    assert np.all((u >= -math.pi) & (u < math.pi))


def test_matrix_vm_trace_law():
    k = 1.0
    A = cayley_klein(np.array([0.5, -0.5, 0.5, 0.5]))
    X = sample(MatrixVonMises(A, k), 50_000, seed=9).points
    tr = np.einsum("nij,ij->n", X, A)
    # Haar rotation angle w has density (1 - cos w)/pi and tr = 1 + 2 cos w
    cdf_w = tabulated_cdf(lambda w: (1 - math.cos(w)) * math.exp(2 * k * math.cos(w)), 0, math.pi)
    angle = np.arccos(np.clip((tr - 1) / 2, -1, 1))
    assert ks_pvalue(angle, cdf_w) > 1e-3


def test_matrix_vm_trace_matches_watson_pushforward():
    k = 0.8
    spec = MatrixVonMises(np.eye(3), k)
    X = sample(spec, 30_000, seed=1).points
    tr = np.einsum("nii->n", X)
    lift = spec.watson_lift()
    q = sample(lift, 30_000, seed=2).points
    pushed = 4 * (q @ lift.mu) ** 2 - 1
    assert stats.ks_2samp(tr, pushed).pvalue > 1e-3


def test_sampling_errors():
    with pytest.raises(ValueError):
        sample(Bingham(np.array([1.0, 2.0, 3.0])), 10)
    with pytest.raises(ValueError):
        sample(VonMises(1.0), 0)


def test_seeds_reproduce():
    spec = Watson(np.eye(3)[0], 2.0)
    assert np.array_equal(sample(spec, 20, seed=8).points, sample(spec, 20, seed=8).points)


def test_make_spec():
    assert isinstance(make_spec("vmf", p=4, kappa=2), VonMisesFisher)
    assert make_spec("watson", p=3, kappa=1, mu=[1, 1, 0]).mu == pytest.approx([2 ** -0.5, 2 ** -0.5, 0])
    assert isinstance(make_spec("bingham", eigs=[1, 2, 3]), Bingham)
    assert isinstance(make_spec("matrixvm", kappa=1), MatrixVonMises)
    with pytest.raises(ValueError):
        make_spec("kent")
    with pytest.raises(ValueError):
        make_spec("bingham")
