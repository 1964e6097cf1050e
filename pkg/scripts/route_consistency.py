"""Compare time-integral coefficient plateaus with the spectral stationary values.

Prints the relative gap of Gamma(t) and D_PP(t) at several lags for each
temperature, plus the Kubo ratio D_PP / (Gamma 2 M k_B T / hbar) when T > 0.

Usage: python scripts/route_consistency.py [--T 0 5 20]
"""

import argparse

import numpy as np

from dcemirror import pipeline
from dcemirror.params import GridSpec, PhysicalParams


def main():
    ap = argparse.ArgumentParser(description="route consistency table")
    ap.add_argument("--T", type=float, nargs="+", default=[0.0, 5.0, 20.0])
    ap.add_argument("--lags", type=float, nargs="+", default=[10.0, 25.0, 50.0])
    args = ap.parse_args()

    for T in args.T:
        p = PhysicalParams(T=T)
        pl = pipeline.run(p, GridSpec(), check_convergence=False, with_impulse=False)
        tr, lim = pl.trace, pl.limits
        parts = []
        for lag in args.lags:
            c = tr.at(lag / p.Omega)
            parts.append(f"{lag:g}/W: {c['gamma'] / lim.gamma - 1:+.1e} {c['d_pp'] / lim.d_pp - 1:+.1e}")
        kubo = lim.d_pp / lim.gamma / (2 * p.M * p.kB * T / p.hbar) if T else np.nan
        print(f"T = {T:g}: Gamma^s = {lim.gamma:.5e}, D_PP^s = {lim.d_pp:.5e}, Kubo {kubo:.5f}")
        print("   gap (Gamma, D_PP) at " + "; ".join(parts))


if __name__ == "__main__":
    main()
