"""Command-line interface: ``phdensity <verb> [options]``.

Exit status is 0 on success, 1 for invalid input or usage, 2 when a
numerical routine fails.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import betti0_curve, cech_barcode, morse_barcode
from .complexes import FilteredComplex, cech_filtration, rips_filtration
from .core import Barcode
from .distributions import make_spec, sample
from .estimation import (
    ConcentrationOverflow,
    betti0_sup_error_experiment,
    convergence_experiment,
    mle_vmf,
    mle_watson,
)
from .geometry import PointCloud
from .metric import optimal_matching
from .persistence import reduce
from .spacings import expected_spacings, uniform_circle_persistence_check


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(float(v)) for v in text.split(",") if v.strip()]


def _version() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            capture_output=True, text=True, timeout=5, cwd=Path(__file__).resolve().parent,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _spec_args(p: argparse.ArgumentParser, kappa_default: float = 1.0) -> None:
    p.add_argument("--family", required=True, choices=["vm", "vmf", "watson", "bingham", "matrixvm"])
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--kappa", type=float, default=kappa_default)
    p.add_argument("--mu", type=_floats, default=None, help="comma-separated mean direction")
    p.add_argument("--eigs", type=_floats, default=None, help="comma-separated Bingham eigenvalues")


def _spec(a):
    return make_spec(a.family, p=a.p, kappa=a.kappa, mu=a.mu, eigs=a.eigs)


def _read_points(path: str, metric: str | None = None) -> PointCloud:
    return PointCloud.from_csv(Path(path).read_text(), metric)


# ---------------------------------------------------------------------------
# verbs


def cmd_sample(a) -> int:
    X = sample(_spec(a), a.n, a.seed)
    _emit(X.to_csv(), a.output)
    return 0


def _complex(a) -> FilteredComplex:
    X = _read_points(a.input, a.metric)
    build = rips_filtration if a.filtration == "rips" else cech_filtration
    return build(X, dim_max=a.dimmax, r_max=a.rmax)


def cmd_complex(a) -> int:
    _emit(_complex(a).dump(), a.output)
    return 0


def cmd_persist(a) -> int:
    if a.complex:
        K = FilteredComplex.load(Path(a.complex).read_text())
    elif a.input:
        K = _complex(a)
    else:
        raise ValueError("persist needs --in or --complex")
    bc = reduce(K)
    _emit(bc.to_csv() if a.csv else bc.to_json(indent=1), a.output)
    return 0


def _read_barcode(path: str) -> Barcode:
    text = Path(path).read_text()
    return Barcode.from_csv(text) if path.endswith(".csv") else Barcode.from_json(text)


def cmd_bdist(a) -> int:
    M = optimal_matching(_read_barcode(a.a), _read_barcode(a.b))
    _emit(json.dumps(M.to_dict(), indent=1), a.output)
    return 0


def cmd_analytic(a) -> int:
    spec = _spec(a)
    if a.filtration == "morse":
        bc = morse_barcode(spec, a.field)
    elif a.filtration == "cech":
        bc = cech_barcode(spec)
    else:
        raise ValueError("analytic barcodes exist for the morse and cech filtrations")
    _emit(bc.to_json(indent=1), a.output)
    return 0


def cmd_betti0(a) -> int:
    _emit(betti0_curve(_spec(a), a.grid).to_csv(), a.output)
    return 0


def cmd_spacings(a) -> int:
    if a.check:
        reports = []
        children = np.random.SeedSequence(a.seed).generate_state(a.trials)
        for s in children.tolist():
            reports.append(uniform_circle_persistence_check(a.n, int(s)).to_dict())
        passed = sum(r["passed"] for r in reports)
        _emit(json.dumps({"n": a.n, "trials": a.trials, "seed": a.seed, "passed": passed,
                          "reports": reports}, indent=1), a.output)
        return 0 if passed == a.trials else 2
    if a.n < 1:
        raise ValueError("n must be positive")
    rows = ["i,expected_spacing"] + [f"{i},{v!r}" for i, v in enumerate(expected_spacings(a.n).tolist(), 1)]
    _emit("\n".join(rows) + "\n", a.output)
    return 0


def cmd_estimate(a) -> int:
    X = _read_points(a.input)
    if a.family == "vmf":
        e = mle_vmf(X)
        out = {"family": "vmf", "n": e.n, "p": e.p, "kappa_hat": e.kappa_hat,
               "mu_hat": None if e.mu_hat is None else e.mu_hat.tolist(),
               "resultant": e.resultant, "degenerate": e.degenerate,
               "asymptotic_variance": e.asymptotic_variance}
    elif a.family == "watson":
        w = mle_watson(X)
        out = {"family": "watson", "n": w.n, "p": w.p, "kappa_hat": w.kappa_hat,
               "mu_hat": w.mu_hat.tolist(), "tau": w.tau,
               "asymptotic_variance": w.asymptotic_variance}
    else:
        raise ValueError("estimation is available for vmf and watson")
    _emit(json.dumps(out, indent=1), a.output)
    return 0


def cmd_experiment(a) -> int:
    t0 = time.perf_counter()
    if a.which == "convergence":
        rep = convergence_experiment(a.family, a.p, a.kappa, a.n, a.trials, a.seed)
    else:
        rep = betti0_sup_error_experiment(a.kappa, a.n, a.trials, a.seed)
    payload = rep.to_dict()
    payload["version"] = _version()
    payload["flags"] = {k: v for k, v in vars(a).items() if k != "func"}
    payload["seconds"] = time.perf_counter() - t0
    _emit(json.dumps(payload, indent=1), a.output)
    return 0


def cmd_check(a) -> int:
    from .checks import run_checks

    results = run_checks(seed=a.seed)
    width = max(len(name) for name, _, _ in results)
    lines = [f"{'check'.ljust(width)}  result  detail"]
    for name, ok, detail in results:
        lines.append(f"{name.ljust(width)}  {'PASS' if ok else 'FAIL':6}  {detail}")
    passed = sum(ok for _, ok, _ in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    _emit("\n".join(lines), a.output)
    return 0 if passed == len(results) else 2


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="phdensity", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("-o", "--output", default=None)
        p.set_defaults(func=func)
        return p

    p = add("sample", cmd_sample, "draw a point cloud")
    _spec_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    for name in ("rips", "cech"):
        p = add(name, cmd_complex, f"build a {name} filtration and dump it")
        p.add_argument("--in", dest="input", required=True)
        p.add_argument("--dimmax", type=int, default=2)
        p.add_argument("--rmax", type=float, default=None)
        p.add_argument("--metric", default=None)
        p.set_defaults(filtration=name)

    p = add("persist", cmd_persist, "barcode of a point cloud or a dumped complex")
    p.add_argument("--in", dest="input", default=None)
    p.add_argument("--complex", default=None)
    p.add_argument("--filtration", choices=["rips", "cech"], default="rips")
    p.add_argument("--dimmax", type=int, default=2)
    p.add_argument("--rmax", type=float, default=None)
    p.add_argument("--metric", default=None)
    p.add_argument("--csv", action="store_true")

    p = add("bdist", cmd_bdist, "barcode distance and optimal matching")
    p.add_argument("a")
    p.add_argument("b")

    p = add("analytic", cmd_analytic, "closed-form barcode of a density")
    _spec_args(p)
    p.add_argument("--filtration", choices=["morse", "cech", "rips"], default="morse")
    p.add_argument("--field", type=int, choices=[0, 2], default=2)

    p = add("betti0", cmd_betti0, "Betti-0 function on the grid i/grid")
    _spec_args(p)
    p.add_argument("--grid", type=int, default=512)

    p = add("spacings", cmd_spacings, "expected spacings or the circle persistence check")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--expected", action="store_true")
    p.add_argument("--check", action="store_true")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    p = add("estimate", cmd_estimate, "maximum-likelihood concentration")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--family", choices=["vmf", "watson"], default="vmf")

    p = add("experiment", cmd_experiment, "Monte Carlo convergence experiments")
    p.add_argument("which", choices=["convergence", "betti0"])
    p.add_argument("--family", default="vmf")
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--kappa", type=float, default=2.0)
    p.add_argument("--n", type=_ints, default=[100, 316, 1000, 3162, 10000])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)

    p = add("check", cmd_check, "run the built-in consistency checks")
    p.add_argument("--seed", type=int, default=0)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"phdensity: error: {e}", file=sys.stderr)
        return 1
    except SystemExit as e:
        # --help and --version
        return int(e.code or 0)
    except ConcentrationOverflow as e:
        print(f"phdensity: numerical failure: {e}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, FileNotFoundError, KeyError) as e:
        print(f"phdensity: error: {e}", file=sys.stderr)
        return 1
    except (ArithmeticError, FloatingPointError, np.linalg.LinAlgError) as e:
        print(f"phdensity: numerical failure: {e}", file=sys.stderr)
        return 2


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # downstream reader closed early, e.g. ``| head``
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = 0
    sys.exit(code)


if __name__ == "__main__":
    main()
