"""Crossover frequency w* against Omega_p / omega0, with the log-log slope.

Usage: python scripts/optics_ratio_scan.py [--ratios 10 100 1000 10000] [--out scan.csv]
"""

import argparse

import numpy as np

from dcemirror.optics import crossover_frequency
from dcemirror.params import PhysicalParams


def main():
    ap = argparse.ArgumentParser(description="crossover frequency scan")
    ap.add_argument("--ratios", type=float, nargs="+", default=[10.0, 1e2, 1e3, 1e4])
    ap.add_argument("--out", default="optics_ratio_scan.csv")
    args = ap.parse_args()

    base = PhysicalParams()
    rows = []
    for r in args.ratios:
        p = base.replace(lam=float(np.sqrt(2 * base.m * base.omega0**3 * r / base.c)))
        w_star = crossover_frequency(p, 100.0 * base.omega0 * r ** (1 / 3)).omega_star
        rows.append((r, p.plasma_frequency, w_star))
        print(f"Omega_p/w0 = {r:>8g}   w*/w0 = {w_star / base.omega0:.6f}")
    arr = np.array(rows)
    np.savetxt(args.out, arr, delimiter=",", header="ratio,plasma_frequency,omega_star", comments="", fmt="%.17g")
    if len(rows) > 1:
        slope = np.polyfit(np.log(arr[:, 1]), np.log(arr[:, 2]), 1)[0]
        print(f"log-log slope {slope:.4f}")


if __name__ == "__main__":
    main()
