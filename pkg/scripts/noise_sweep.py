"""Mean sorting efficiency vs per-arm phase noise for several dimensions.

    python scripts/noise_sweep.py --dims 2 4 8 16 --trials 500 --out sweep.csv
"""

import argparse
import csv
import sys

import numpy as np

from qsorter import SorterSpec, ideal_module, sweep_perturbations


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 4, 8, 16])
    ap.add_argument("--sigmas", type=float, nargs="+", default=list(np.round(np.linspace(0, 0.5, 11), 3)))
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(out)
    w.writerow(["d", "sigma", "mean_efficiency", "stderr", "mean_worst"])
    for d in args.dims:
        spec = SorterSpec(d, ideal_module(d))
        for sigma in args.sigmas:
            r = sweep_perturbations(spec, sigma, args.trials, args.seed)
            w.writerow([d, sigma, f"{r.mean_mean:.6f}", f"{r.stderr_mean:.2e}", f"{r.mean_worst:.6f}"])
    if args.out:
        out.close()


if __name__ == "__main__":
    main()
