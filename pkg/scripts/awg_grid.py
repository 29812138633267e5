"""AWG arm lengths for an evenly spaced wavelength grid and the resulting crosstalk.

Wavelengths in micrometres; e.g. a 4-channel grid around 1.55 um:

    python scripts/awg_grid.py --d 4 --center 1.55 --spacing 0.0008 --bound 2000
"""

import argparse

import numpy as np

from qsorter import SorterSpec, awg_design, awg_module, build_mzi, efficiency, sorting_matrix


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--d", type=int, default=4)
    ap.add_argument("--center", type=float, default=1.55)
    ap.add_argument("--spacing", type=float, default=0.0008)
    ap.add_argument("--bound", type=int, default=2000)
    args = ap.parse_args()

    lam = args.center + args.spacing * (np.arange(args.d) - (args.d - 1) / 2)
    design = awg_design(args.d, lam, args.bound)
    p = sorting_matrix(build_mzi(SorterSpec(args.d, awg_module(design))))
    worst, mean = efficiency(p)
    np.set_printoptions(precision=4, suppress=True)
    print("wavelengths", lam)
    print("lengths    ", np.array(design.lengths))
    print(f"residual    {design.residual:.4g} rad")
    print("sorting matrix\n", p.p)
    print(f"efficiency worst {worst:.4f} mean {mean:.4f}")


if __name__ == "__main__":
    main()
