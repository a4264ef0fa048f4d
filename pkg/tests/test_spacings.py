import math

import numpy as np
import pytest
from conftest import circle_cloud

from phdensity.core import INF
from phdensity.distributions import uniform_circle
from phdensity.spacings import (
    SpacingSet,
    _expected_spacing_exact,
    check_circle_barcode,
    empirical_betti0_function,
    expected_betti0_barcode,
    expected_betti1_barcode,
    expected_spacing,
    expected_spacings,
    limit_sup_error,
    normalizing_constant,
    sample_ordered_spacings,
    spacings,
    uniform_circle_persistence_check,
    whitworth_tail,
)


def test_spacing_examples():
    assert spacings(circle_cloud([0, 0.25, 0.5, 0.75])).gaps.tolist() == [0.25] * 4
    S = spacings(circle_cloud([0, 0.1, 0.5]))
    assert S.gaps == pytest.approx([0.1, 0.4, 0.5], abs=1e-15)
    assert S.n == 3 and S.largest == pytest.approx(0.5)


def test_spacings_anchor_at_first_point():
    S = spacings(circle_cloud([0.5, 0.1, 0.0]))
    assert S.gaps == pytest.approx([0.5, 0.1, 0.4], abs=1e-15)


def test_spacings_errors():
    with pytest.raises(ValueError):
        spacings(circle_cloud([0.2]))
    with pytest.raises(ValueError):
        SpacingSet(np.array([0.5, -0.1]))


def test_spacings_sum_to_one(rng):
    for n in (2, 5, 50):
        S = spacings(uniform_circle(n, seed=n))
        assert abs(S.gaps.sum() - 1) < 1e-12 and np.all(S.gaps > 0)


def test_marginal_means_are_one_over_n():
    n, trials = 6, 40_000
    G = np.array([spacings(uniform_circle(n, seed=s)).gaps for s in range(trials)])
    se = G.std(axis=0) / math.sqrt(trials)
    assert np.all(np.abs(G.mean(axis=0) - 1 / n) < 3.5 * se)


def test_expected_spacing_examples():
    assert expected_spacing(2, 1) == 0.25 and expected_spacing(2, 2) == 0.75
    assert expected_spacing(3, 3) == pytest.approx(11 / 18, abs=1e-16)
    for bad in ((3, 0), (3, 4), (0, 1)):
        with pytest.raises(ValueError):
            expected_spacing(*bad)


def test_expected_spacings_sum_and_monotone():
    for n in range(1, 51):
        assert sum(_expected_spacing_exact(n, i) for i in range(1, n + 1)) == 1
        e = expected_spacings(n)
        assert abs(math.fsum(e) - 1) < 1e-12
        assert np.all(np.diff(e) > 0)


def test_whitworth_examples():
    for n in range(2, 31):
        assert whitworth_tail(n, 0.5) == pytest.approx(n / 2 ** (n - 1), abs=1e-15)
    assert whitworth_tail(5, 1.0) == 0.0 and whitworth_tail(5, 2.0) == 0.0
    # n = 3 closed form below 1/2
    for x in (0.35, 0.4, 0.45):
        assert whitworth_tail(3, x) == pytest.approx(3 * (1 - x) ** 2 - 3 * (1 - 2 * x) ** 2, abs=1e-15)


def test_whitworth_monotone():
    xs = np.linspace(0.05, 0.95, 19)
    for n in (5, 40, 200):
        v = [whitworth_tail(n, x) for x in xs]
        assert all(a >= b for a, b in zip(v, v[1:]))
    for x in (0.1, 0.3, 0.45):
        v = [whitworth_tail(n, x) for n in range(3, 80)]
        assert all(a >= b for a, b in zip(v, v[1:]))


def test_whitworth_large_n_is_a_probability():
    for n in (100, 500, 2000):
        for x in (0.001, 0.01, 0.05, 0.2):
            assert 0 <= whitworth_tail(n, x) <= 1


def test_monte_carlo_max_spacing_and_tail():
    n, trials = 10, 100_000
    S = sample_ordered_spacings(n, trials, seed=123)
    m = S[:, -1]
    assert abs(m.mean() - expected_spacing(n, n)) < 3 * m.std() / math.sqrt(trials)
    p = whitworth_tail(n, 1 / 3)
    freq = float(np.mean(m > 1 / 3))
    assert abs(freq - p) < 3 * math.sqrt(p * (1 - p) / trials)
    n2 = 200
    S2 = sample_ordered_spacings(n2, 20_000, seed=5)[:, -1]
    p2 = whitworth_tail(n2, 0.03)
    assert abs(np.mean(S2 > 0.03) - p2) < 4 * math.sqrt(p2 * (1 - p2) / 20_000)


def test_expected_barcodes():
    b0 = expected_betti0_barcode(2)
    assert b0.pairs(0) == [(0, 0.25), (0, INF)]
    b1 = expected_betti1_barcode(3)
    assert b1.pairs(1) == [(pytest.approx(11 / 18), INF)]
    for n in (5, 30):
        ints = expected_betti0_barcode(n).in_dim(0)
        assert sum(J.death == INF for J in ints) == 1 and len(ints) == n


def test_empirical_betti0_normalization_and_shape():
    for n in (10, 100, 1000):
        # integral of the step function, exactly step by step
        m = np.arange(1, n)
        integral = math.fsum(empirical_betti0_function(n, m / (n - 1)) / (n - 1))
        assert integral == pytest.approx(1, abs=1e-6)
        xs = np.linspace(0.001, 1, 500)
        assert np.all(np.diff(empirical_betti0_function(n, xs)) >= 0)
    assert normalizing_constant(2) == pytest.approx(1 / 0.25)
    x = np.array([0.05, 0.1])
    assert np.all(empirical_betti0_function(10, x) >= 0)
    with pytest.raises(ValueError):
        empirical_betti0_function(10, 0.0)


def test_limit_law():
    errs = [limit_sup_error(n) for n in (100, 1000, 10_000)]
    assert errs[0] > errs[1] > errs[2] and errs[2] <= 0.05
    # the exact step supremum dominates any sampled grid
    n = 1000
    xs = np.linspace(0.05, 0.9, 20_001)
    grid = float(np.max(np.abs(empirical_betti0_function(n, xs) + np.log1p(-xs))))
    assert grid <= limit_sup_error(n) + 1e-15 and grid > limit_sup_error(n) - 1e-3


def test_equally_spaced_circle_check():
    c = check_circle_barcode(circle_cloud([0, 0.25, 0.5, 0.75]))
    assert c.passed and c.betti1 == ((0.25, 0.5),)


def test_uniform_circle_check_many_seeds():
    reports = [uniform_circle_persistence_check(20, s) for s in range(40)]
    assert all(r.passed for r in reports)
    assert set(reports[0].to_dict()) >= {"passed", "betti0_ok", "betti1_ok", "max_spacing"}
    with pytest.raises(ValueError):
        uniform_circle_persistence_check(2, 0)


def test_fraction_of_large_gaps():
    n, trials = 6, 50_000
    m = sample_ordered_spacings(n, trials, seed=77)[:, -1]
    p = n / 2 ** (n - 1)
    assert abs(np.mean(m > 0.5) - p) < 3 * math.sqrt(p * (1 - p) / trials)
