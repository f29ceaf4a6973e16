"""Drivers for single runs and the epsilon-sweep convergence study.

The study builds well-prepared data per epsilon from one seed, runs the
limit solver once (the matched data is epsilon-independent), runs the
compressible solver per epsilon in lockstep against the stored limit
samples, and emits per-run time-series CSVs, a summary CSV, and the rate
fit.  All outputs are deterministic; the timestamp header line is the only
non-reproducible byte and can be suppressed.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

from .compressible import run as run_compressible
from .config import StudyConfig
from .diagnostics import (
    GapReport,
    acoustic_ratio,
    convergence_gap,
    energy_inequality_monitor,
    fit_rate,
)
from .errors import StateError
from .incompressible import run_incompressible
from .initial_data import matched_limit_init, well_prepared_init
from .snapshot import save_snapshot
from .timestep import ImexConfig, Trajectory

TIMESERIES_HEADER = (
    "t,E_total,e_phi,e_u,e_eta,e_tau,D_total,div_u_H1,Pprime_gradphi_H1,"
    "gap_total,g_u,g_eta,g_tau,g_pi"
)
SUMMARY_HEADER = "epsilon,sup_gap,beta0_hat_running,acoustic_ratio,energy_violation"
ZERO_GAP_FLOOR = 1e-300


def fmt(x: float) -> str:
    return f"{x:.17g}"


def _timestamp_line() -> str:
    import datetime

    return "# generated " + datetime.datetime.now(datetime.timezone.utc).isoformat()


def write_csv(path: str, header: str, rows: list[str], no_timestamp: bool) -> None:
    lines = [] if no_timestamp else [_timestamp_line()]
    lines.append(header)
    lines.extend(rows)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def timeseries_row(record, gap: GapReport | None) -> str:
    e = record.energy
    if gap is None:
        gap_cols = [math.nan] * 5
    else:
        gap_cols = [gap.total, gap.g_u, gap.g_eta, gap.g_tau, gap.g_pi]
    cols = [
        record.time,
        e.e_total,
        e.e_phi,
        e.e_u,
        e.e_eta,
        e.e_tau,
        record.dissipation.d_total,
        record.div_u_h1,
        record.pprime_grad_phi_h1,
        *gap_cols,
    ]
    return ",".join(fmt(c) for c in cols)


def _write_snapshots(traj: Trajectory, out_dir: str, tag: str) -> None:
    for index, (_, state) in enumerate(traj.snapshots):
        save_snapshot(state, os.path.join(out_dir, f"snap_{tag}_{index:05d}.obm"))


def _imex_config(cfg: StudyConfig) -> ImexConfig:
    return ImexConfig(
        dt=cfg.dt, t_end=cfg.t_end, callback_stride=cfg.callback_stride
    )


def run_simulation(
    cfg: StudyConfig, no_timestamp: bool = False, store_snapshots: int | None = None
) -> int:
    """Single compressible run at the first (largest) epsilon."""
    epsilon = cfg.epsilons[0]
    os.makedirs(cfg.output_dir, exist_ok=True)
    s0 = well_prepared_init(cfg.grid, cfg.params, epsilon, cfg.delta, cfg.seed)
    traj = run_compressible(
        s0, _imex_config(cfg), cfg.params, store_stride=store_snapshots
    )
    rows = [timeseries_row(r, None) for r in traj.records]
    write_csv(
        os.path.join(cfg.output_dir, f"timeseries_eps_{epsilon:g}.csv"),
        TIMESERIES_HEADER,
        rows,
        no_timestamp,
    )
    if store_snapshots:
        _write_snapshots(traj, cfg.output_dir, f"eps_{epsilon:g}")
    return 0


def run_limit_simulation(
    cfg: StudyConfig, no_timestamp: bool = False, store_snapshots: int | None = None
) -> int:
    """Single incompressible run with the matched data."""
    os.makedirs(cfg.output_dir, exist_ok=True)
    s0 = matched_limit_init(cfg.grid, cfg.params, cfg.delta, cfg.seed)
    traj = run_incompressible(
        s0, _imex_config(cfg), cfg.params, store_stride=store_snapshots
    )
    rows = [timeseries_row(r, None) for r in traj.records]
    write_csv(
        os.path.join(cfg.output_dir, "timeseries_limit.csv"),
        TIMESERIES_HEADER,
        rows,
        no_timestamp,
    )
    if store_snapshots:
        _write_snapshots(traj, cfg.output_dir, "limit")
    return 0


@dataclass
class _SweepMember:
    epsilon: float
    sup_gap: float
    acoustic: float
    energy_violation: float
    max_energy_ratio: float


def run_study(
    cfg: StudyConfig, no_timestamp: bool = False, store_snapshots: int | None = None
) -> int:
    """Full sweep: matched runs per epsilon, summary, monitors, rate fit.

    Exit code 0 iff every configured monitor passes; failures are written
    to failures.json.
    """
    os.makedirs(cfg.output_dir, exist_ok=True)
    imex = _imex_config(cfg)
    failures: list[dict] = []

    limit0 = matched_limit_init(cfg.grid, cfg.params, cfg.delta, cfg.seed)
    limit_states = []
    limit_traj = run_incompressible(
        limit0,
        imex,
        cfg.params,
        observers=[limit_states.append],
        store_stride=store_snapshots,
    )
    write_csv(
        os.path.join(cfg.output_dir, "timeseries_limit.csv"),
        TIMESERIES_HEADER,
        [timeseries_row(r, None) for r in limit_traj.records],
        no_timestamp,
    )
    if store_snapshots:
        _write_snapshots(limit_traj, cfg.output_dir, "limit")

    members: list[_SweepMember] = []
    summary_rows: list[str] = []
    points: list[tuple[float, float]] = []

    for epsilon in cfg.epsilons:
        s0 = well_prepared_init(cfg.grid, cfg.params, epsilon, cfg.delta, cfg.seed)
        gaps: list[GapReport] = []
        counter = iter(range(len(limit_states)))

        def pair_gap(state, _counter=counter, _gaps=gaps):
            idx = next(_counter)
            _gaps.append(
                convergence_gap(
                    state, limit_states[idx], cfg.params, time_tol=0.5 * cfg.dt
                )
            )

        try:
            traj = run_compressible(
                s0,
                imex,
                cfg.params,
                observers=[pair_gap],
                store_stride=store_snapshots,
            )
        except StateError as exc:
            failures.append(
                {"monitor": "run", "epsilon": epsilon, "error": str(exc)}
            )
            continue

        write_csv(
            os.path.join(cfg.output_dir, f"timeseries_eps_{epsilon:g}.csv"),
            TIMESERIES_HEADER,
            [timeseries_row(r, g) for r, g in zip(traj.records, gaps)],
            no_timestamp,
        )
        if store_snapshots:
            _write_snapshots(traj, cfg.output_dir, f"eps_{epsilon:g}")

        sup_gap = max(g.total for g in gaps)
        violation = energy_inequality_monitor(traj)
        ratio = acoustic_ratio(traj, epsilon)
        e0 = traj.records[0].energy.e_total
        e_max = max(r.energy.e_total for r in traj.records)
        energy_ratio = e_max / e0 if e0 > 0 else 1.0
        members.append(
            _SweepMember(epsilon, sup_gap, ratio, violation, energy_ratio)
        )

        if violation > cfg.energy_tol:
            failures.append(
                {
                    "monitor": "energy_violation",
                    "epsilon": epsilon,
                    "value": violation,
                    "limit": cfg.energy_tol,
                }
            )
        if energy_ratio > cfg.stability_factor:
            failures.append(
                {
                    "monitor": "stability",
                    "epsilon": epsilon,
                    "value": energy_ratio,
                    "limit": cfg.stability_factor,
                }
            )

        if sup_gap > ZERO_GAP_FLOOR:
            points.append((epsilon, sup_gap))
        running = (
            fit_rate(points).beta0_hat if len(points) >= 3 else math.nan
        )
        summary_rows.append(
            ",".join(
                [fmt(epsilon), fmt(sup_gap), fmt(running), fmt(ratio), fmt(violation)]
            )
        )

    for prev, cur in zip(members, members[1:]):
        if prev.acoustic <= 0 or cur.acoustic <= 0:
            continue
        factor = max(prev.acoustic / cur.acoustic, cur.acoustic / prev.acoustic)
        if factor > cfg.acoustic_factor:
            failures.append(
                {
                    "monitor": "acoustic_factor",
                    "epsilon": cur.epsilon,
                    "value": factor,
                    "limit": cfg.acoustic_factor,
                }
            )

    write_csv(
        os.path.join(cfg.output_dir, "summary.csv"),
        SUMMARY_HEADER,
        summary_rows,
        no_timestamp,
    )

    rate_info: dict
    if len(members) < 3:
        rate_info = {"skipped": "needs at least 3 epsilons"}
    elif len(points) < 3:
        rate_info = {"skipped": "degenerate: zero gaps"}
    else:
        fit = fit_rate(points)
        rate_info = {
            "beta0_hat": fit.beta0_hat,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
            "points": [[e, g] for e, g in fit.points],
        }
        if cfg.rate_min is not None and fit.beta0_hat < cfg.rate_min:
            failures.append(
                {
                    "monitor": "rate_min",
                    "value": fit.beta0_hat,
                    "limit": cfg.rate_min,
                }
            )
        if cfg.rate_max is not None and fit.beta0_hat > cfg.rate_max:
            failures.append(
                {
                    "monitor": "rate_max",
                    "value": fit.beta0_hat,
                    "limit": cfg.rate_max,
                }
            )
        if cfg.rate_r2_min is not None and fit.r_squared < cfg.rate_r2_min:
            failures.append(
                {
                    "monitor": "rate_r2_min",
                    "value": fit.r_squared,
                    "limit": cfg.rate_r2_min,
                }
            )
    with open(os.path.join(cfg.output_dir, "ratefit.json"), "w", encoding="utf-8") as fh:
        json.dump(rate_info, fh, indent=2, sort_keys=True)
        fh.write("\n")

    if failures:
        with open(
            os.path.join(cfg.output_dir, "failures.json"), "w", encoding="utf-8"
        ) as fh:
            json.dump({"failures": failures}, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return 3
    return 0
