"""Command-line front end: simulations, sweeps, defect checks, field dumps.

Every verb that writes data drops a JSON manifest next to its CSV so the
run can be reproduced exactly.  Numeric flags accept power-of-two
notation like 2^-11 in addition to decimals.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .egorov import egorov_sweep, splitting_sweep
from .experiments import (RunConfig, envelope_lattice, initial_state,
                          min_error_envelope, run_final_state, sweep_dt,
                          sweep_h, write_manifest, write_records_csv)
from .observables import builtin_observables, expectation, get_observable
from .phase_space import husimi_box, husimi_function, save_field, wigner_transform
from .potentials import REGISTRY

FIG1_DT = tuple(2.0**-k for k in range(6, 12))
FIG2_H = tuple(2.0**-k for k in range(4, 11))
FIG3_H = tuple(2.0**-k for k in range(7, 12))
EGOROV_H = tuple(2.0**-k for k in range(4, 9))


def parse_number(text: str) -> float:
    """Float literal or exact power notation 'b^e' (e.g. 2^-11)."""
    if "^" in text:
        base, exp = text.split("^", 1)
        return float(base) ** int(exp)
    return float(text)


def parse_number_list(text: str) -> list[float]:
    return [parse_number(tok) for tok in text.split(",") if tok]


def _add_config_flags(p: argparse.ArgumentParser, multi_h=False, multi_dt=False):
    h_help = "semiclassical parameter" + (" (comma list for sweeps)" if multi_h else "")
    dt_help = "time step" + (" (comma list for sweeps)" if multi_dt else "")
    p.add_argument("--h", default=None, help=h_help)
    p.add_argument("--dt", default=None, help=dt_help)
    p.add_argument("--T", type=parse_number, default=0.5, help="final time")
    p.add_argument("--potential", default="sin_x2_y2", choices=sorted(REGISTRY),
                   help="interaction potential")
    p.add_argument("--alpha", type=parse_number, default=12.5, help="packet width exponent")
    p.add_argument("--x0", type=parse_number, default=-1.0, help="packet center")
    p.add_argument("--k0", type=parse_number, default=50.0, help="packet wavenumber")
    p.add_argument("--y0", type=parse_number, default=1.0, help="initial nuclear position")
    p.add_argument("--v0", type=parse_number, default=0.0, help="initial nuclear velocity")
    p.add_argument("--observables", default="position,momentum,gaussian,xgaussian,kinetic",
                   help="comma-separated observable names")
    p.add_argument("--reference-dt", type=parse_number, default=1e-5,
                   help="step of the reference run")
    p.add_argument("--points-per-h", type=int, default=32,
                   help="minimum grid points per unit of h")
    p.add_argument("--out", default=None, help="output CSV (or text dump) path")
    p.add_argument("--workers", type=int, default=1, help="concurrent sweep cells")


def _config_from(args, h: float, dt: float) -> RunConfig:
    return RunConfig(h=h, dt=dt, T=args.T, potential_name=args.potential,
                     alpha=args.alpha, x0=args.x0, k0=args.k0, y0=args.y0,
                     v0=args.v0, grid_points_per_h=args.points_per_h,
                     observables=tuple(args.observables.split(",")),
                     reference_dt=args.reference_dt)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcmd",
        description="quantum-classical dynamics: simulate, sweep, verify")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("simulate", help="single run; print final expectations")
    _add_config_flags(p)

    p = sub.add_parser("sweep-dt", help="temporal convergence sweep at fixed h")
    _add_config_flags(p, multi_dt=True)

    p = sub.add_parser("sweep-h", help="semiclassical sweep at fixed dt")
    _add_config_flags(p, multi_h=True)
    p.add_argument("--mode", choices=("observables", "wavefunction"),
                   default="observables", help="which error family to record")

    p = sub.add_parser("egorov", help="quantum-vs-classical defect decay in h")
    _add_config_flags(p, multi_h=True)
    p.add_argument("--observable", default="gaussian", help="Schwartz observable name")
    p.add_argument("--path", choices=("wigner", "husimi"), default="wigner",
                   help="phase-space integral path")

    p = sub.add_parser("phase-space", help="dump a Wigner or Husimi field")
    _add_config_flags(p)
    p.add_argument("--path", choices=("wigner", "husimi"), default="wigner",
                   help="which field to dump")

    p = sub.add_parser("envelope", help="worst-case-over-h error vs dt")
    _add_config_flags(p, multi_h=True, multi_dt=True)
    p.add_argument("--observable", default="gaussian", help="observable for the envelope")
    return parser


def _print_fits(fits) -> None:
    for metric, fit in sorted(fits.items()):
        print(f"  {metric}: slope {fit.slope:+.3f}  (R^2 {fit.r_squared:.4f}, "
              f"{fit.n_points_used} points)")


def _cmd_simulate(args) -> int:
    dt = parse_number(args.dt) if args.dt else 1e-3
    h = parse_number(args.h) if args.h else 0.04
    cfg = _config_from(args, h, dt)
    state = initial_state(cfg) if cfg.T == 0.0 else run_final_state(cfg, dt)
    names = cfg.observables
    table = builtin_observables()
    print(f"t = {state.time}: y = {state.nuclear.y:.10f}, v = {state.nuclear.v:.10f}")
    values = {}
    for name in names:
        values[name] = expectation(table[name], state.psi)
        print(f"  <{name}> = {values[name]:.12g}")
    if args.out:
        from .experiments import ErrorRecord
        n = state.psi.grid.n_points
        recs = [ErrorRecord(f"simulate:h{h!r}:dt{dt!r}", h, dt, cfg.T, n,
                            f"observable:{name}", val, val, 0.0, 0.0)
                for name, val in values.items()]
        write_records_csv(recs, args.out)
        write_manifest(args.out, cfg)
    return 0


def _cmd_sweep_dt(args) -> int:
    h = parse_number(args.h) if args.h else 0.04
    dts = parse_number_list(args.dt) if args.dt else list(FIG1_DT)
    cfg = _config_from(args, h, dts[0])
    result = sweep_dt(cfg, dts, workers=args.workers, floor_control=True)
    print(f"sweep-dt at h={h}: {len(result.records)} records")
    _print_fits(result.fits)
    if args.out:
        write_records_csv(result.records, args.out)
        write_manifest(args.out, cfg, result.fits)
    return 0


def _cmd_sweep_h(args) -> int:
    hs = parse_number_list(args.h) if args.h else (
        list(FIG2_H) if args.mode == "observables" else list(FIG3_H))
    dt = parse_number(args.dt) if args.dt else 1e-3
    cfg = _config_from(args, hs[0], dt)
    result = sweep_h(cfg, hs, mode=args.mode, workers=args.workers)
    print(f"sweep-h ({args.mode}) at dt={dt}: {len(result.records)} records")
    _print_fits(result.fits)
    if args.out:
        write_records_csv(result.records, args.out)
        write_manifest(args.out, cfg, result.fits)
    return 0


def _cmd_egorov(args) -> int:
    hs = parse_number_list(args.h) if args.h else list(EGOROV_H)
    dt = parse_number(args.dt) if args.dt else 1e-3
    cfg = _config_from(args, hs[0], dt)
    A = get_observable(args.observable)
    report = egorov_sweep(A, cfg, hs, cfg.T, path=args.path)
    print(f"egorov defect decay, {args.observable} via {args.path}: "
          f"slope {report.fitted_slope:+.3f} over h={hs}")
    for h, d in zip(report.h_values, report.defects):
        print(f"  h={h}: defect {d:.3e}")
    if args.out:
        write_records_csv(report.records(), args.out)
        write_manifest(args.out, cfg, {report.fit.metric: report.fit},
                       extra={"path": args.path, "observable": args.observable})
    return 0


def _cmd_phase_space(args) -> int:
    dt = parse_number(args.dt) if args.dt else 1e-3
    h = parse_number(args.h) if args.h else 0.04
    cfg = _config_from(args, h, dt)
    state = initial_state(cfg) if cfg.T == 0.0 else run_final_state(cfg, dt)
    if args.path == "wigner":
        field = wigner_transform(state.psi)
    else:
        field = husimi_function(state.psi, *husimi_box(state.psi))
    print(f"{args.path} field at t={cfg.T}: {field.values.shape[0]}x"
          f"{field.values.shape[1]} nodes, total {field.total():.8f}")
    if args.out:
        save_field(field, args.out)
        write_manifest(args.out, cfg, extra={"path": args.path})
    return 0


def _cmd_envelope(args) -> int:
    hs = parse_number_list(args.h) if args.h else list(EGOROV_H)
    dts = parse_number_list(args.dt) if args.dt else list(FIG1_DT)
    cfg = _config_from(args, hs[0], dts[0])
    records = envelope_lattice(cfg, hs, dts, workers=args.workers)
    table = min_error_envelope(records, observable=args.observable)
    print(f"envelope over h={hs}: worst-case slope {table.slope.slope:+.3f}")
    for dt in table.dt_values:
        print(f"  dt={dt}: worst over h = {table.worst_over_h[dt]:.3e}")
    if args.out:
        write_records_csv(records, args.out)
        write_manifest(args.out, cfg, {table.slope.metric: table.slope},
                       extra={"observable": args.observable})
    return 0


_DISPATCH = {
    "simulate": _cmd_simulate,
    "sweep-dt": _cmd_sweep_dt,
    "sweep-h": _cmd_sweep_h,
    "egorov": _cmd_egorov,
    "phase-space": _cmd_phase_space,
    "envelope": _cmd_envelope,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _DISPATCH[args.verb](args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
