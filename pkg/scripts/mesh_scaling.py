"""Beamsplitter count and reconstruction error of the Fourier-gate mesh vs d."""

import argparse
import time

from qsorter import decompose, fourier, reconstruct


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 4, 8, 16, 32, 64, 128])
    args = ap.parse_args()
    print(f"{'d':>5} {'splitters':>10} {'bound':>8} {'max error':>10} {'seconds':>8}")
    for d in args.dims:
        t0 = time.perf_counter()
        mesh = decompose(fourier(d))
        err = reconstruct(mesh).max_diff(fourier(d))
        dt = time.perf_counter() - t0
        print(f"{d:>5} {len(mesh.beamsplitters):>10} {d * (d - 1) // 2:>8} {err:>10.2e} {dt:>8.3f}")


if __name__ == "__main__":
    main()
