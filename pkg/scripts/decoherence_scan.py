"""Cat-state decoherence times against separation x0 with the stationary coefficients.

Usage: python scripts/decoherence_scan.py [--config configs/decoherence.cfg] [--x0 2 4 8]
"""

import argparse
from pathlib import Path

import numpy as np

from dcemirror import pipeline
from dcemirror.params import load_config


def main():
    ap = argparse.ArgumentParser(description="decoherence time scan")
    ap.add_argument("--config", default=str(Path(__file__).resolve().parents[1] / "configs" / "decoherence.cfg"))
    ap.add_argument("--x0", type=float, nargs="+", default=[2.0, 4.0, 8.0])
    ap.add_argument("--delta", type=float, default=1.0)
    ap.add_argument("--out", default="decoherence_scan.csv")
    args = ap.parse_args()

    params, grid = load_config(Path(args.config).read_text())
    pl = pipeline.run(params, grid, check_convergence=False, with_impulse=False)
    reps = pipeline.decoherence_scan(pl, args.x0, delta=args.delta)
    rows = []
    for x0, r in zip(args.x0, reps):
        rows.append((x0, r.t_xx_fit, r.t_xx_predicted, r.ratio_fit, r.t_relax, r.t_xx_over_t_r))
        print(f"x0 = {x0:g}: t_XX = {r.t_xx_fit:.4e} (predicted {r.t_xx_predicted:.4e}), t_XX/t_R = {r.t_xx_over_t_r:.2e}")
    arr = np.array(rows)
    np.savetxt(args.out, arr, delimiter=",", header="x0,t_xx_fit,t_xx_predicted,ratio,t_relax,t_xx_over_t_r",
               comments="", fmt="%.17g")
    if len(rows) > 1:
        print(f"slope d log t_XX / d log x0 = {np.polyfit(np.log(arr[:, 0]), np.log(arr[:, 1]), 1)[0]:.3f}")


if __name__ == "__main__":
    main()
