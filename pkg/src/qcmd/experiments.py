"""Convergence experiment harness: configured sweeps, error metrics,
slope fits, and CSV emission.

Errors are always measured against a fine-step reference run of the same
configuration on the same grid, so spatial discretization error cancels
and the recorded quantity is purely temporal.  The wavefunction metric is
sqrt(dx) * ||psi_n - psi_ref||_2, the discrete L2 distance.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__
from .grid import WaveFunction, make_grid, mass, normalize
from .observables import builtin_observables, expectation
from .phase_space import boundary_density
from .potentials import get_potential
from .propagator import NuclearState, QCMDState, evolve, n_steps

#: metric keys in the CSV, beyond per-observable entries
WAVEFUNCTION_METRIC = "wavefunction_l2"
NUCLEAR_Y_METRIC = "nuclear_y"
NUCLEAR_V_METRIC = "nuclear_v"

CSV_HEADER = ("run_id,h,dt,T,n_points,metric,reference_value,"
              "numerical_value,abs_error,wall_time_seconds")

INITIAL_BOUNDARY_TOL = 1e-10


@dataclass(frozen=True)
class RunConfig:
    """Full description of one simulation setup."""

    h: float = 0.04
    dt: float = 1e-3
    T: float = 0.5
    potential_name: str = "sin_x2_y2"
    alpha: float = 12.5     # packet width exponent
    x0: float = -1.0        # packet center
    k0: float = 50.0        # packet phase wavenumber
    y0: float = 1.0         # initial nuclear position
    v0: float = 0.0         # initial nuclear velocity
    grid_points_per_h: int = 32
    observables: tuple[str, ...] = ("position", "momentum", "gaussian",
                                    "xgaussian", "kinetic")
    reference_dt: float = 1e-5


@dataclass(frozen=True)
class ErrorRecord:
    run_id: str
    h: float
    dt: float
    T: float
    n_points: int
    metric: str
    reference_value: float
    numerical_value: float
    abs_error: float
    wall_time_seconds: float


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares fit of log(error) against log(parameter)."""

    metric: str
    slope: float
    intercept: float
    r_squared: float
    n_points_used: int


def fit_loglog(xs, ys, metric: str = "", floor: float = 0.0) -> SlopeFit:
    """OLS slope of log y vs log x, skipping points at or under 10x floor."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    keep = (ys > 10.0 * floor) & (ys > 0.0) & np.isfinite(ys)
    lx, ly = np.log(xs[keep]), np.log(ys[keep])
    if len(lx) < 2:
        return SlopeFit(metric, float("nan"), float("nan"), float("nan"), int(keep.sum()))
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    sstot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / sstot if sstot > 0 else 1.0
    return SlopeFit(metric, float(slope), float(intercept), r2, len(lx))


def initial_state(cfg: RunConfig) -> QCMDState:
    """Normalized Gaussian wavepacket exp(-alpha (x-x0)^2 + i k0 (x-x0))
    on the grid for cfg.h, with the configured nuclear data."""
    grid = make_grid(cfg.h, cfg.grid_points_per_h)
    x = grid.nodes
    raw = np.exp(-cfg.alpha * (x - cfg.x0) ** 2 + 1j * cfg.k0 * (x - cfg.x0))
    psi = normalize(WaveFunction(grid, raw, cfg.h))
    bd = boundary_density(psi)
    if bd >= INITIAL_BOUNDARY_TOL:
        raise ValueError(
            f"initial packet touches the boundary (relative edge density "
            f"{bd:.2e} >= {INITIAL_BOUNDARY_TOL:.0e}); shrink alpha or move x0")
    return QCMDState(psi, NuclearState(cfg.y0, cfg.v0), 0.0)


def run_final_state(cfg: RunConfig, dt: float) -> QCMDState:
    """Propagate the configured initial state to T with step dt."""
    V = get_potential(cfg.potential_name)
    return evolve(initial_state(cfg), dt, cfg.T, V)[-1]


def _observable_map(names):
    table = builtin_observables()
    return {name: table[name] for name in names}


def wavefunction_l2_error(a: WaveFunction, b: WaveFunction) -> float:
    diff = a.values - b.values
    return float(np.sqrt(a.grid.spacing * np.dot(diff.real, diff.real)
                         + a.grid.spacing * np.dot(diff.imag, diff.imag)))


def _error_records(run_id: str, cfg: RunConfig, dt: float, num: QCMDState,
                   ref: QCMDState, wall: float) -> list[ErrorRecord]:
    n = num.psi.grid.n_points
    recs = [
        ErrorRecord(run_id, cfg.h, dt, cfg.T, n, WAVEFUNCTION_METRIC,
                    0.0, wavefunction_l2_error(num.psi, ref.psi),
                    wavefunction_l2_error(num.psi, ref.psi), wall),
        ErrorRecord(run_id, cfg.h, dt, cfg.T, n, NUCLEAR_Y_METRIC,
                    ref.nuclear.y, num.nuclear.y,
                    abs(num.nuclear.y - ref.nuclear.y), wall),
        ErrorRecord(run_id, cfg.h, dt, cfg.T, n, NUCLEAR_V_METRIC,
                    ref.nuclear.v, num.nuclear.v,
                    abs(num.nuclear.v - ref.nuclear.v), wall),
    ]
    for name, A in _observable_map(cfg.observables).items():
        ev_num = expectation(A, num.psi)
        ev_ref = expectation(A, ref.psi)
        recs.append(ErrorRecord(run_id, cfg.h, dt, cfg.T, n, f"observable:{name}",
                                ev_ref, ev_num, abs(ev_num - ev_ref), wall))
    return recs


@dataclass
class SweepResult:
    records: list[ErrorRecord]
    fits: dict[str, SlopeFit]
    floor_errors: dict[str, float] = field(default_factory=dict)


def _metric_names(cfg: RunConfig) -> list[str]:
    return ([WAVEFUNCTION_METRIC, NUCLEAR_Y_METRIC, NUCLEAR_V_METRIC]
            + [f"observable:{n}" for n in cfg.observables])


def sweep_dt(cfg: RunConfig, dt_list, workers: int = 1,
             floor_control: bool = False) -> SweepResult:
    """Temporal convergence sweep at fixed h.

    One reference run at cfg.reference_dt, then one run per dt; errors of
    every metric are recorded against the reference final state and
    log-log slopes in dt fitted per metric.  With floor_control a run at
    2 * reference_dt estimates the accuracy floor, which is then excluded
    (together with anything within 10x of it) from the fits.
    """
    for dt in dt_list:
        n_steps(dt, cfg.T)  # raises on non-commensurate dt, naming it
    ref = run_final_state(cfg, cfg.reference_dt)

    floors: dict[str, float] = {}
    if floor_control:
        t0 = time.perf_counter()
        ctrl = run_final_state(cfg, 2.0 * cfg.reference_dt)
        wall = time.perf_counter() - t0
        for rec in _error_records("floor", cfg, 2.0 * cfg.reference_dt, ctrl, ref, wall):
            floors[rec.metric] = rec.abs_error

    def cell(dt: float) -> list[ErrorRecord]:
        t0 = time.perf_counter()
        num = run_final_state(cfg, dt)
        wall = time.perf_counter() - t0
        return _error_records(f"sweep-dt:h{cfg.h!r}:dt{dt!r}", cfg, dt, num, ref, wall)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_dt = list(pool.map(cell, dt_list))
    else:
        per_dt = [cell(dt) for dt in dt_list]

    records = [r for recs in per_dt for r in recs]
    records.sort(key=lambda r: (r.run_id, r.metric))
    fits = {}
    for metric in _metric_names(cfg):
        errs = [r.abs_error for r in records if r.metric == metric]
        dts = [r.dt for r in records if r.metric == metric]
        fits[metric] = fit_loglog(dts, errs, metric, floor=floors.get(metric, 0.0))
    return SweepResult(records, fits, floors)


def sweep_h(cfg: RunConfig, h_list, mode: str = "observables",
            workers: int = 1) -> SweepResult:
    """Semiclassical-parameter sweep at fixed dt.

    Per h: a reference run at cfg.reference_dt and a run at cfg.dt on the
    grid for that h.  mode "observables" records the per-observable
    expectation errors, mode "wavefunction" the L2 metric; slopes are
    fitted against h.
    """
    if mode not in ("observables", "wavefunction"):
        raise ValueError(f"unknown mode {mode!r}")
    n_steps(cfg.dt, cfg.T)
    n_steps(cfg.reference_dt, cfg.T)

    def cell(h: float) -> list[ErrorRecord]:
        sub = replace(cfg, h=h)
        t0 = time.perf_counter()
        ref = run_final_state(sub, sub.reference_dt)
        num = run_final_state(sub, sub.dt)
        wall = time.perf_counter() - t0
        recs = _error_records(f"sweep-h:h{h!r}:dt{sub.dt!r}", sub, sub.dt, num, ref, wall)
        if mode == "observables":
            return [r for r in recs if r.metric.startswith("observable:")]
        return [r for r in recs if r.metric == WAVEFUNCTION_METRIC]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_h = list(pool.map(cell, h_list))
    else:
        per_h = [cell(h) for h in h_list]

    records = [r for recs in per_h for r in recs]
    records.sort(key=lambda r: (r.run_id, r.metric))
    metrics = ({f"observable:{n}" for n in cfg.observables} if mode == "observables"
               else {WAVEFUNCTION_METRIC})
    fits = {}
    for metric in sorted(metrics):
        errs = [r.abs_error for r in records if r.metric == metric]
        hs = [r.h for r in records if r.metric == metric]
        fits[metric] = fit_loglog(hs, errs, metric)
    return SweepResult(records, fits)


def envelope_lattice(cfg: RunConfig, h_list, dt_list, workers: int = 1) -> list[ErrorRecord]:
    """Matched (h, dt) error lattice: a full dt sweep at every h."""
    records = []
    for h in h_list:
        records.extend(sweep_dt(replace(cfg, h=h), dt_list, workers=workers).records)
    return records


@dataclass
class EnvelopeTable:
    """Pointwise min of the observable error and its wavefunction-path
    bound proxy, and the worst case of that envelope over h per dt."""

    observable: str
    h_values: list[float]
    dt_values: list[float]
    envelope: dict            # (h, dt) -> min(observable err, wavefunction err)
    worst_over_h: dict        # dt -> max_h envelope
    slope: SlopeFit


def min_error_envelope(records: list[ErrorRecord],
                       observable: str = "gaussian") -> EnvelopeTable:
    """Combine observable-path and wavefunction-path errors on a matched
    (h, dt) lattice; the worst case over h at each dt illustrates the
    uniform-in-h temporal rate."""
    obs_metric = f"observable:{observable}"
    obs_err: dict[tuple[float, float], float] = {}
    wf_err: dict[tuple[float, float], float] = {}
    for r in records:
        key = (r.h, r.dt)
        if r.metric == obs_metric:
            obs_err[key] = r.abs_error
        elif r.metric == WAVEFUNCTION_METRIC:
            wf_err[key] = r.abs_error
    keys = sorted(set(obs_err) & set(wf_err))
    if not keys:
        raise ValueError(
            f"records carry no matched (h, dt) cells for {obs_metric} "
            "and the wavefunction metric")
    envelope = {k: min(obs_err[k], wf_err[k]) for k in keys}
    h_values = sorted({h for h, _ in keys})
    dt_values = sorted({dt for _, dt in keys})
    worst = {dt: max(envelope[(h, dt)] for h in h_values
                     if (h, dt) in envelope) for dt in dt_values}
    slope = fit_loglog(dt_values, [worst[dt] for dt in dt_values],
                       f"envelope_worst_over_h:{observable}")
    return EnvelopeTable(observable, h_values, dt_values, envelope, worst, slope)


def _fmt(x) -> str:
    return repr(float(x))


def write_records_csv(records: list[ErrorRecord], path) -> None:
    """Write records under the fixed schema; rows sorted for determinism."""
    rows = sorted(records, key=lambda r: (r.run_id, r.metric))
    with open(path, "w") as f:
        f.write(CSV_HEADER + "\n")
        for r in rows:
            f.write(",".join([
                r.run_id, _fmt(r.h), _fmt(r.dt), _fmt(r.T), str(r.n_points),
                r.metric, _fmt(r.reference_value), _fmt(r.numerical_value),
                _fmt(r.abs_error), _fmt(r.wall_time_seconds)]) + "\n")


def read_records_csv(path) -> list[ErrorRecord]:
    records = []
    with open(path) as f:
        header = f.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {header!r}")
        for line in f:
            run_id, h, dt, T, n, metric, ref, num, err, wall = line.strip().split(",")
            records.append(ErrorRecord(run_id, float(h), float(dt), float(T),
                                       int(n), metric, float(ref), float(num),
                                       float(err), float(wall)))
    return records


def manifest_path(csv_path):
    from pathlib import Path
    p = Path(csv_path)
    return p.with_name(p.stem + ".manifest.json")


def write_manifest(csv_path, cfg: RunConfig, fits: dict[str, SlopeFit] | None = None,
                   extra: dict | None = None) -> None:
    """Reproducibility sidecar: full config, code version, timestamp,
    and the harness-fitted slopes for downstream cross-checks."""
    doc = {
        "config": asdict(cfg),
        "code_version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    if fits:
        doc["slopes"] = {m: {"slope": f.slope, "r_squared": f.r_squared,
                             "n_points_used": f.n_points_used}
                         for m, f in fits.items()}
    if extra:
        doc.update(extra)
    with open(manifest_path(csv_path), "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")
