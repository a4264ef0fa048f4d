"""Write Betti-0 function curves as CSV files, one per (family, kappa).

Usage: python scripts/betti0_curves.py [--out-dir curves] [--grid 1024]
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from phdensity.analytic import betti0_curve
from phdensity.distributions import VonMises, VonMisesFisher, Watson

NORTH = np.array([0.0, 0.0, 1.0])


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="curves")
    ap.add_argument("--grid", type=int, default=1024)
    ap.add_argument("--kappas", default="0.5,1,2,5")
    a = ap.parse_args(argv)
    out = Path(a.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for k in (float(v) for v in a.kappas.split(",")):
        for name, spec in (("vm", VonMises(k)), ("vmf", VonMisesFisher(NORTH, k)), ("watson", Watson(NORTH, k))):
            path = out / f"betti0_{name}_kappa{k:g}.csv"
            path.write_text(betti0_curve(spec, a.grid).to_csv())
            print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
