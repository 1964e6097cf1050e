"""Command-line entry point: ``dcemirror <subcommand> [options]``.

Every run writes its tables as CSV (17 significant digits) and a
``manifest.json`` into ``--out``, the manifest even when the run fails.
Exit codes: 0 success, 1 a physics or numerical check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, optics, pipeline
from .baths import minus_bath_spectra, plus_bath_spectra, thermal_factor
from .coefficients import dsgs_residual
from .mirror import build_pair_density, mirror_spectra, mirror_time_kernels
from .params import ConfigError, GridSpec, PhysicalParams, default_config_text, dump_config, load_config
from .response import driven_correlator_spectrum, impulse_response, susceptibility
from .wigner import (
    BoundaryMassExceeded,
    CatStateSpec,
    GridUnderResolved,
    InsufficientDecay,
    StabilityError,
    cat_state,
    decoherence_report,
    evolve,
    fringe_component,
    gaussian_state,
    observables,
)


class PhysicsCheckFailed(RuntimeError):
    pass


def write_csv(path: Path, header, rows) -> None:
    arr = np.asarray(list(rows), dtype=float)
    np.savetxt(path, arr.reshape(-1, len(header)), delimiter=",", header=",".join(header), comments="", fmt="%.17g")


class Run:
    """Collects outputs and conventions for the manifest."""

    def __init__(self, out: Path, command: str, params: PhysicalParams, grid: GridSpec):
        self.out = out
        self.command = command
        self.params = params
        self.grid = grid
        self.files: list[str] = []
        self.conventions: dict = {}
        self.summary: dict = {}

    def csv(self, name, header, rows):
        write_csv(self.out / name, header, rows)
        self.files.append(name)

    def json(self, name, obj):
        (self.out / name).write_text(json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")
        self.files.append(name)


def _jsonable(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    return str(o)


# --- subcommands ----------------------------------------------------------


def cmd_optics(run: Run, args) -> None:
    p = run.params
    if args.ratio is not None:
        # Omega_p / w0 = c lam^2 / (2 m w0^3)
        p = p.replace(lam=float(np.sqrt(2.0 * p.m * p.omega0**3 * args.ratio / p.c)))
    table = optics.spectral_scan(run.grid, p, np.linspace(0.0, run.grid.cutoff, run.grid.n_omega + 1)[1:])
    run.csv("optics.csv", optics.CSV_HEADER, table.rows())
    summary = {"plasma_frequency": p.plasma_frequency, "ratio": p.plasma_frequency / p.omega0,
               "unitarity_max": float(np.max(np.abs(table.transmittance + table.reflectance - 1.0)))}
    try:
        cross = optics.crossover_frequency(p, run.grid.cutoff)
        summary["omega_star"] = cross.omega_star
        summary["roots"] = list(cross.roots)
    except optics.BracketNotFound as exc:
        summary["omega_star"] = None
        summary["crossover_error"] = str(exc)
    run.summary = summary


def cmd_kernels(run: Run, args) -> None:
    g, p = run.grid, run.params
    baths = {"plus": plus_bath_spectra, "minus": minus_bath_spectra}
    chosen = list(baths) if args.bath == "both" else [args.bath]
    for name in chosen:
        kp = baths[name](g, p)
        run.csv(f"{name}_spectra.csv", ("omega", "nu_tilde", "im_mu_tilde"),
                zip(kp.omega, kp.nu_tilde.real, kp.mu_tilde.imag))
        run.csv(f"{name}_time.csv", ("t", "nu", "mu"), zip(kp.t, kp.nu_t, kp.mu_t))
        run.summary[f"{name}_fdr_residual"] = kp.fdr_residual
    run.conventions["plus_bath"] = "per unit length; time kernels scaled by L"
    run.conventions["minus_bath_prefactor"] = "c lam^2 / 2 (mode-sum derived)"


def cmd_response(run: Run, args) -> None:
    g, p = run.grid, run.params
    minus = minus_bath_spectra(g, p)
    s = susceptibility(g, p, minus, with_impulse=False)
    ir = impulse_response(s, g.t_max, g.n_t)
    run.csv("susceptibility.csv", ("omega", "re_G", "im_G"), zip(s.omega, s.G.real, s.G.imag))
    run.csv("impulse_response.csv", ("t", "G"), zip(ir.t, ir.G))
    C = driven_correlator_spectrum(s, minus)
    run.csv("driven_correlator.csv", ("omega", "re_C", "im_C"), zip(C.omega, C.values.real, C.values.imag))
    run.summary = dict(s.meta, causality_defect=ir.causality_defect, eta=s.eta,
                       sum_rule_over_pi=float(np.sum(s.omega * s.G.imag) * s.d_omega / np.pi))
    if not s.meta["stable"]:
        raise PhysicsCheckFailed("idf static stiffness is negative: raise ir_cutoff or lower lam")


def cmd_mirror(run: Run, args) -> None:
    g, p = run.grid, run.params
    pd = build_pair_density(g, p)
    m = mirror_spectra(pd, g)
    tk = mirror_time_kernels(m)
    run.csv("mirror_spectra.csv", ("omega", "nu_tilde", "im_mu_tilde", "fdr_residual"),
            zip(m.omega, m.nu_tilde.real, m.mu_tilde.imag, m.meta["fdr_profile"]))
    run.csv("mirror_time.csv", ("t", "nu", "mu"), zip(tk.t, tk.nu, tk.mu))
    if args.pair_dump:
        stride = max(1, g.n_omega // args.pair_dump)
        idx = np.arange(0, g.n_omega, stride)
        rows = []
        for i in idx:
            n, mm = pd.at(float(pd.omega[i]))
            rows.extend(zip(np.full(idx.size, pd.omega[i]), pd.omega[idx], n[idx], mm[idx]))
        run.csv("pair_density.csv", ("omega", "omega_prime", "n", "m"), rows)
    meta = {k: v for k, v in m.meta.items() if k != "fdr_profile"}
    run.summary = dict(meta, fdr_residual=m.fdr_residual, nu_parity=tk.nu_parity, mu_parity=tk.mu_parity)
    run.conventions["mirror_prefactor"] = "2 c^2 lam^2 / m^2 (equals lam-bar^2 L / m^2)"
    if not m.meta["converged"]:
        raise PhysicsCheckFailed(f"mirror spectra not converged: shift {m.meta['convergence_shift']:.3g} > 1%")


def cmd_coefficients(run: Run, args) -> None:
    g, p = run.grid, run.params
    pl = pipeline.run(p, g)
    tr = pl.trace
    from .coefficients import CSV_HEADER

    run.csv("coefficients.csv", CSV_HEADER, tr.rows())
    lim = pl.limits
    z = float(thermal_factor(np.array([p.Omega]), p)[0])
    run.summary = {
        "gamma_s": lim.gamma,
        "d_pp_s": lim.d_pp,
        "d_xp_plateau": float(tr.d_xp[-1]),
        "d_omega2_sq_plateau": float(tr.d_omega2_sq[-1]),
        "delta_omega1_sq": p.delta_omega1_sq,
        "dsgs_residual": dsgs_residual(lim.gamma, lim.d_pp, p),
        "ratio_over_M_Omega_z": lim.d_pp / (p.M * p.Omega * z * lim.gamma) if lim.gamma else None,
        "gamma_plateau_rel": abs(tr.gamma[-1] / lim.gamma - 1) if lim.gamma else 0.0,
        "d_pp_plateau_rel": abs(tr.d_pp[-1] / lim.d_pp - 1) if lim.d_pp else 0.0,
        "imag_residue": lim.imag_residue,
    }
    run.conventions["coefficient_prefactor"] = "hbar (kernels already carry lam-bar^2 L)"
    run.conventions["signs"] = pl.signs.describe()


def cmd_evolve(run: Run, args) -> None:
    g, p = run.grid, run.params
    pl = pipeline.run(p, g, check_convergence=False, with_impulse=False)
    run.conventions["signs"] = pl.signs.describe()
    if args.coeffs == "stationary":
        coeffs = pl.wigner_coefficients()
        run.summary["coefficients"] = coeffs.__dict__
    else:
        coeffs = (pl.trace, pl.signs, p)
    if args.initial == "cat":
        spec = CatStateSpec(args.x0, args.p0, args.delta)
        state = cat_state(spec, g, p.hbar)
    else:
        spec = None
        state = gaussian_state(g, args.x0, args.p0, args.delta, p.hbar)
    if args.horizon is not None:
        horizon = args.horizon
    elif spec is not None and spec.x0 > 0 and pl.limits.d_pp != 0:
        horizon = 4.0 * p.hbar / (abs(pl.limits.d_pp) * spec.x0**2)
    else:
        horizon = 2.0 * np.pi / p.Omega
    k = (spec.x0 / p.hbar) if spec is not None and spec.x0 > 0 else None
    fringe = []
    res = evolve(state, coeffs, horizon, p.M, every=args.every, observers=(
        (lambda s: fringe.append(abs(fringe_component(s, k)) if k else 0.0)),))
    keys = ("t", "norm", "mean_x", "mean_p", "var_x", "var_p", "cov_xp", "negativity")
    run.csv("evolution.csv", keys + ("visibility",),
            ([r[key] for key in keys] + [f / fringe[0] if fringe[0] else 0.0] for r, f in zip(res.records, fringe)))
    run.summary.update(steps=res.steps, dt=res.dt, horizon=horizon, indefinite_steps=res.indefinite_steps,
                       norm_drift=abs(res.final.integral() - state.integral()))
    if spec is not None and k:
        z = float(thermal_factor(np.array([p.Omega]), p)[0])
        try:
            rep = decoherence_report(res.times, fringe, [r["negativity"] for r in res.records],
                                     d_pp_s=pl.limits.d_pp, gamma_s=pl.limits.gamma, spec=spec,
                                     M=p.M, Omega=p.Omega, z=z, hbar=p.hbar)
            run.summary["decoherence"] = {
                "t_xx_fit": rep.t_xx_fit, "t_xx_predicted": rep.t_xx_predicted, "ratio_fit": rep.ratio_fit,
                "t_relax": rep.t_relax, "t_xx_over_t_r": rep.t_xx_over_t_r,
                "t_xx_over_t_r_formula": rep.t_xx_over_t_r_formula,
            }
        except InsufficientDecay as exc:
            run.summary["decoherence"] = {"error": str(exc)}
    if args.snapshot:
        np.save(run.out / "final_state.npy", res.final.W)
        run.files.append("final_state.npy")


def cmd_verify(run: Run, args) -> None:
    from .verify import format_table, report, verify_suite

    entries = verify_suite(run.params, run.grid)
    rep = report(entries)
    run.json("verify.json", rep)
    print(format_table(entries))
    run.summary = {"passed": rep["passed"], "failed": [e.name for e in entries if not e.passed]}
    if not rep["passed"]:
        raise PhysicsCheckFailed("failed: " + "; ".join(run.summary["failed"]))


COMMANDS = {
    "optics": cmd_optics,
    "kernels": cmd_kernels,
    "response": cmd_response,
    "mirror-kernels": cmd_mirror,
    "coefficients": cmd_coefficients,
    "evolve": cmd_evolve,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dcemirror", description="Mirror noise and dissipation from pair emission")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value parameter file (defaults if omitted)")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--seedless", action="store_true",
                        help="assert a deterministic run (always true: nothing here draws random numbers)")
    sub = ap.add_subparsers(dest="command", required=True, metavar="{" + ",".join(COMMANDS) + "}")

    s = sub.add_parser("optics", parents=[common], help="static scattering amplitudes")
    s.add_argument("--ratio", type=float, help="set Omega_p / omega0 by adjusting the coupling")
    s = sub.add_parser("kernels", parents=[common], help="(+) and (-) bath kernels")
    s.add_argument("--bath", choices=("plus", "minus", "both"), default="both")
    sub.add_parser("response", parents=[common], help="idf susceptibility and impulse response")
    s = sub.add_parser("mirror-kernels", parents=[common], help="mirror noise and dissipation spectra")
    s.add_argument("--pair-dump", type=int, default=0, metavar="N",
                   help="also write n, m on an N x N subsample of the (w, w') grid")
    sub.add_parser("coefficients", parents=[common], help="master-equation coefficient traces")
    s = sub.add_parser("evolve", parents=[common], help="Wigner function evolution")
    s.add_argument("--initial", choices=("cat", "gaussian"), default="cat")
    s.add_argument("--x0", type=float, default=4.0)
    s.add_argument("--p0", type=float, default=0.0)
    s.add_argument("--delta", type=float, default=1.0)
    s.add_argument("--coeffs", choices=("stationary", "trace"), default="stationary")
    s.add_argument("--horizon", type=float, help="evolution time (default: 4 predicted t_XX)")
    s.add_argument("--every", type=int, default=10, help="record every N steps")
    s.add_argument("--snapshot", action="store_true", help="save the final W as .npy")
    sub.add_parser("verify", parents=[common], help="run the invariant suite")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    started = time.time()
    manifest = {"subcommand": args.command, "version": __version__, "argv": list(sys.argv[1:] if argv is None else argv)}
    code = 0
    run = None
    try:
        text = Path(args.config).read_text() if args.config else default_config_text()
        params, grid = load_config(text)
        run = Run(out, args.command, params, grid)
        canonical = dump_config(params, grid)
        manifest.update(config_hash=hashlib.sha256(canonical.encode()).hexdigest(),
                        params=params.__dict__, grid=grid.__dict__)
        COMMANDS[args.command](run, args)
        manifest["status"] = "ok"
    except (ConfigError, OSError, GridUnderResolved) as exc:
        manifest.update(status="usage-error", error=f"{type(exc).__name__}: {exc}")
        print(f"dcemirror {args.command}: {exc}", file=sys.stderr)
        code = 2
    except (PhysicsCheckFailed, StabilityError, BoundaryMassExceeded) as exc:
        manifest.update(status="check-failed", error=f"{type(exc).__name__}: {exc}")
        print(f"dcemirror {args.command}: {exc}", file=sys.stderr)
        code = 1
    finally:
        if run is not None:
            if run.summary:
                run.json("summary.json", run.summary)
            manifest.update(outputs=run.files + ["manifest.json"], conventions=run.conventions)
        manifest["wall_clock_s"] = round(time.time() - started, 3)
        manifest["deterministic"] = True
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_jsonable) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
