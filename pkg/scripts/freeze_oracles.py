"""Run the slow reference computations in tests/oracles.py and freeze the results.

Usage: python scripts/freeze_oracles.py [--out tests/frozen_oracles.json]
Takes a few minutes (the T = 0 mirror quadratures dominate).
"""

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from oracles import mirror_spectrum_quad  # noqa: E402

from dcemirror.baths import continuum_kernel  # noqa: E402
from dcemirror.optics import crossover_frequency  # noqa: E402
from dcemirror.params import GridSpec, PhysicalParams  # noqa: E402
from dcemirror.response import integrate_memory_equation  # noqa: E402


def lam_for_ratio(ratio, base=PhysicalParams()):
    return float(np.sqrt(2.0 * base.m * base.omega0**3 * ratio / base.c))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(ROOT / "tests" / "frozen_oracles.json"))
    args = ap.parse_args()
    grid = GridSpec()
    out = {"grid": {"cutoff": grid.cutoff}, "mirror": [], "continuum": [], "crossover": [], "memory_ode": {}}

    with warnings.catch_warnings(), np.errstate(all="ignore"):
        warnings.simplefilter("ignore")
        for T in (0.0, 5.0):
            p = PhysicalParams(T=T)
            for w in (0.5, 1.3, 3.0):
                n = mirror_spectrum_quad(w, p, grid.cutoff, "n")
                m = mirror_spectrum_quad(w, p, grid.cutoff, "m")
                out["mirror"].append({"T": T, "omega": w, "nu": n, "im_mu": m})
                print(f"mirror T={T} w={w}: nu={n:.10g} im_mu={m:.10g}", flush=True)

    p = PhysicalParams(T=2.0)
    for bath, band in (("plus", (0.0, grid.cutoff)), ("minus", (p.ir_cutoff, grid.cutoff))):
        for t in (0.3, 1.7, 6.0):
            v = continuum_kernel(t, bath, p, band)
            out["continuum"].append({"bath": bath, "T": 2.0, "t": t, "nu": v.real, "mu": v.imag})

    for ratio in (10.0, 1e2, 1e3, 1e4):
        p = PhysicalParams(lam=lam_for_ratio(ratio))
        cr = crossover_frequency(p, 100.0 * ratio ** (1 / 3))
        out["crossover"].append({"ratio": ratio, "omega_star": cr.omega_star})

    p = PhysicalParams()
    t, G = integrate_memory_equation(p, grid.cutoff, 20.0)
    idx = np.searchsorted(t, [1.0, 5.0, 12.0, 19.0])
    out["memory_ode"] = {"t": t[idx].tolist(), "G": G[idx].tolist()}

    Path(args.out).write_text(json.dumps(out, indent=2) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
