"""Quick consistency battery behind ``phdensity check``.

Each check compares two independent routes to the same quantity and
returns ``(name, passed, detail)``.
"""

from __future__ import annotations

import math

import numpy as np

from .analytic import (
    GFunction,
    betti0_vmf_s2,
    duality_check,
    matrix_vm_watson_check,
    morse_barcode,
)
from .complexes import rips_filtration
from .core import Barcode, PersistenceInterval
from .distributions import Bingham, MatrixVonMises, VonMisesFisher, Watson, bessel_i, bessel_i_integral
from .estimation import a_p, invert_a_p
from .geometry import PointCloud, cayley_klein_batch
from .metric import brute_force_distance, distance
from .persistence import betti_numbers_bruteforce, reduce
from .spacings import expected_spacings, uniform_circle_persistence_check, whitworth_tail


def random_barcode(rng: np.random.Generator, max_size: int = 5, dims: int = 2,
                   p_inf: float = 0.3) -> Barcode:
    out = []
    for _ in range(int(rng.integers(0, max_size + 1))):
        b = float(rng.random())
        d = math.inf if rng.random() < p_inf else b + float(rng.random())
        out.append(PersistenceInterval(int(rng.integers(0, dims)), b, d))
    return Barcode(tuple(out))


def _metric_oracle(rng):
    bad = 0
    for _ in range(100):
        a, b = random_barcode(rng), random_barcode(rng)
        bad += distance(a, b) != brute_force_distance(a, b)
    return bad == 0, f"{100 - bad}/100 random pairs agree"


def _reduction_oracle(rng):
    bad = 0
    for _ in range(10):
        v = rng.standard_normal((6, 3))
        X = PointCloud("sphere", v / np.linalg.norm(v, axis=1, keepdims=True))
        K = rips_filtration(X, dim_max=3)
        bc = reduce(K)
        for r in np.unique(K.values):
            bad += betti_numbers_bruteforce(K, r, 3) != [bc.betti(k, r) for k in range(4)]
    return bad == 0, "barcode Betti numbers equal F2 ranks at every critical value"


def _spacings(rng):
    ok = all(
        abs(sum(expected_spacings(n)) - 1) < 1e-12 and abs(whitworth_tail(n, 0.5) - n / 2 ** (n - 1)) < 1e-12
        for n in range(2, 31)
    )
    seeds = rng.integers(0, 2 ** 31, 20).tolist()
    passed = sum(uniform_circle_persistence_check(20, s).passed for s in seeds)
    return ok and passed == 20, f"identities exact, {passed}/20 circle samples match spacings"


def _duality(rng):
    specs = [Watson(np.eye(3)[2], 2.0)]
    for _ in range(3):
        specs.append(Bingham(np.sort(rng.uniform(0.1, 4.0, 3))))
    ok = all(duality_check(s) for s in specs)
    return ok, f"{len(specs)} densities"


def _betti0(rng):
    xs = np.arange(1, 1025) / 1024
    err = max(
        float(np.max(np.abs(betti0_vmf_s2(xs, k) - GFunction(VonMisesFisher(np.eye(3)[2], k)).inverse(xs))))
        for k in (0.5, 1.0, 2.0)
    )
    return err < 1e-6, f"closed form vs inverted mass, sup error {err:.2e}"


def _bessel(rng):
    err = max(abs(bessel_i(nu, k) / bessel_i_integral(nu, k) - 1) for nu in (0, 0.5, 1, 1.5) for k in (0.5, 2, 10))
    a3 = max(abs(a_p(3, k) - (1 / math.tanh(k) - 1 / k)) for k in (0.5, 1, 2, 5))
    rt = max(abs(invert_a_p(p, a_p(p, k)) - k) for p in (2, 3, 5) for k in (0.1, 1, 10, 100))
    return err < 1e-10 and a3 < 1e-12 and rt < 1e-10, f"series/integral {err:.1e}, A3 {a3:.1e}, inverse {rt:.1e}"


def _so3(rng):
    P = rng.standard_normal((200, 4))
    Q = rng.standard_normal((200, 4))
    P /= np.linalg.norm(P, axis=1, keepdims=True)
    Q /= np.linalg.norm(Q, axis=1, keepdims=True)
    tr = np.einsum("nij,nij->n", cayley_klein_batch(P), cayley_klein_batch(Q))
    err = float(np.max(np.abs(tr - (4 * np.sum(P * Q, axis=1) ** 2 - 1))))
    spec = MatrixVonMises(np.eye(3), 1.0)
    own, lifted = matrix_vm_watson_check(spec)
    lift_ok = all(math.isclose(a.birth, b.birth, rel_tol=1e-12) for a, b in zip(own, lifted))
    diff = set(morse_barcode(spec, 2).intervals) - set(morse_barcode(spec, 0).intervals)
    field_ok = sorted(J.dim for J in diff) == [1, 2]
    return err < 1e-12 and lift_ok and field_ok, f"trace identity {err:.1e}, lift and field checks"


CHECKS = [
    ("metric_vs_bruteforce", _metric_oracle),
    ("reduction_vs_ranks", _reduction_oracle),
    ("spacings", _spacings),
    ("duality", _duality),
    ("betti0_closed_form", _betti0),
    ("bessel_and_A_p", _bessel),
    ("so3_structure", _so3),
]


def run_checks(seed: int = 0) -> list[tuple[str, bool, str]]:
    rng = np.random.default_rng(seed)
    out = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn(rng)
        except Exception as e:  # a crash is reported as a failed check
            ok, detail = False, f"{type(e).__name__}: {e}"
        out.append((name, bool(ok), detail))
    return out
