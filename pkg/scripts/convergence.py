"""Estimated vs true barcode convergence for vMF samples on S^2.

Usage: python scripts/convergence.py [--trials 200] [--seed 42] [-o report.json]
"""

import argparse
import sys
import time

from phdensity.estimation import betti0_sup_error_experiment, convergence_experiment


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kappa", type=float, default=2.0)
    ap.add_argument("--n", default="100,316,1000,3162,10000")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("-o", "--output")
    a = ap.parse_args(argv)
    n_list = [int(v) for v in a.n.split(",")]

    t0 = time.perf_counter()
    rep = convergence_experiment("vmf", 3, a.kappa, n_list, trials=a.trials, seed=a.seed)
    sup = betti0_sup_error_experiment(a.kappa, n_list, trials=a.trials, seed=a.seed)
    print(f"{'n':>7} " + " ".join(f"{name:>16}" for name in rep.series))
    for i, n in enumerate(n_list):
        print(f"{n:>7} " + " ".join(f"{s.means[i]:>16.3e}" for s in rep.series.values()))
    for name, s in rep.series.items():
        print(f"slope {name:<16} {s.slope:+.3f}")
    print(f"slope {'betti0 sup error':<16} {sup.series['sup_error'].slope:+.3f}")
    print(f"degenerate fits: {sum(rep.degenerate)}; {time.perf_counter() - t0:.1f}s")
    if a.output:
        with open(a.output, "w") as fh:
            fh.write(rep.to_json(indent=1))
    return 0


if __name__ == "__main__":
    sys.exit(main())
