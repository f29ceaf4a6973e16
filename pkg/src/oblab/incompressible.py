"""Spectral projection solver for the incompressible limit system.

Shares the CN/RK2 additive skeleton with the compressible solver; the
velocity is Leray-projected at every stage, and the pressure is a
diagnostic recovered from the projected momentum balance rather than a
prognostic variable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .diagnostics import dissipation_D, limit_energy
from .errors import ConfigError, StateError
from .grid import (
    Field,
    GridSpec,
    SymTensorField,
    VectorField,
    dealias_hat,
    divergence,
    fftn,
    ifftn,
    leray_project_hat,
    max_abs,
    sobolev_norm,
    spectral,
)
from .model import (
    IncompressibleState,
    PhysicalParams,
    _HatCache,
    _incompressible_nonstiff,
    validate_state,
)
from .timestep import (
    DiagnosticRecord,
    ImexConfig,
    Observer,
    Trajectory,
    check_cfl,
    notify,
    sample_steps,
)

__all__ = ["projection_step", "recover_pressure", "run_incompressible"]

DIV_MONITOR_TOL = 1e-9


@dataclass(frozen=True)
class _LimitImplicitData:
    u_mult: np.ndarray
    eta_mult: np.ndarray
    tau_mult: np.ndarray


@lru_cache(maxsize=32)
def _implicit_data(grid: GridSpec, dt: float, p: PhysicalParams) -> _LimitImplicitData:
    sp = spectral(grid)
    c = 0.5 * dt
    return _LimitImplicitData(
        u_mult=1.0 / (1.0 + c * p.mu1 * sp.ksq),
        eta_mult=1.0 / (1.0 + c * p.nu * sp.ksq),
        tau_mult=1.0 / (1.0 + c * (p.nu * sp.ksq + 0.5 * p.A0)),
    )


def recover_pressure(s: IncompressibleState, p: PhysicalParams) -> Field:
    """Zero-mean pi with lap(pi1) = div[-u.grad u + (beta/k) div tau],
    plus the polymer potential beta(L-1)eta + zbar eta^2 minus its mean."""
    grid = s.grid
    sp = spectral(grid)
    u = [c.values for c in s.u.components]
    cache = _HatCache(grid, np.zeros(grid.shape), u,
                      s.eta.values, [c.values for c in s.tau.components])
    force_hats = []
    for i in range(grid.dim):
        advect = sum(u[j] * cache.jac_u[i][j] for j in range(grid.dim))
        force_hats.append(
            dealias_hat(fftn(-advect), grid) + (p.beta / p.k) * fftn(cache.div_tau[i])
        )
    div_force = sum(h * ik for h, ik in zip(force_hats, sp.ik))
    pi1_hat = div_force * (-sp.inv_ksq)  # -ksq * pi1_hat = (div F)_hat
    pi1 = ifftn(pi1_hat)
    eta_sq = ifftn(dealias_hat(fftn(s.eta.values**2), grid))
    pot = p.beta * (p.L_poly - 1.0) * s.eta.values + p.zbar * eta_sq
    total = pi1 + pot
    return Field(grid, total - total.mean())


def projection_step(
    s: IncompressibleState, cfg: ImexConfig, p: PhysicalParams
) -> IncompressibleState:
    """Advance one step; velocity Leray-projected at every stage."""
    grid = s.grid
    check_cfl(cfg.dt, s.u, grid, safety=1.0, time=s.time)
    div_max = max_abs(divergence(s.u))
    if div_max > 1e-8:
        raise StateError(f"input velocity not divergence-free (max {div_max:.3e})")
    data = _implicit_data(grid, cfg.dt, p)
    dt = cfg.dt
    half = 0.5 * dt

    u = [c.values for c in s.u.components]
    eta = s.eta.values
    tau = [c.values for c in s.tau.components]

    n_u, n_eta, n_tau, cache = _incompressible_nonstiff(grid, u, eta, tau, p)

    u_star_h = leray_project_hat(
        [data.u_mult * (uh + half * fftn(nu)) for uh, nu in zip(cache.u_h, n_u)], grid
    )
    eta_star_h = data.eta_mult * (cache.eta_h + half * fftn(n_eta))
    tau_star_h = [
        data.tau_mult * (th + half * fftn(nt)) for th, nt in zip(cache.tau_h, n_tau)
    ]
    star_u = [ifftn(uh) for uh in u_star_h]
    star_eta = ifftn(eta_star_h)
    star_tau = [ifftn(th) for th in tau_star_h]

    m_u, m_eta, m_tau, _ = _incompressible_nonstiff(grid, star_u, star_eta, star_tau, p)
    sp = cache.sp
    l_u = [-p.mu1 * sp.ksq * uh for uh in cache.u_h]
    l_eta = -p.nu * sp.ksq * cache.eta_h
    l_tau = [(-p.nu * sp.ksq - 0.5 * p.A0) * th for th in cache.tau_h]

    u_next_h = leray_project_hat(
        [
            data.u_mult * (uh + dt * fftn(mu) + half * lu)
            for uh, mu, lu in zip(cache.u_h, m_u, l_u)
        ],
        grid,
    )
    eta_next_h = data.eta_mult * (cache.eta_h + dt * fftn(m_eta) + half * l_eta)
    tau_next_h = [
        data.tau_mult * (th + dt * fftn(mt) + half * lt)
        for th, mt, lt in zip(cache.tau_h, m_tau, l_tau)
    ]

    out = IncompressibleState(
        u=VectorField.from_arrays(grid, [ifftn(uh) for uh in u_next_h]),
        eta=Field(grid, ifftn(eta_next_h)),
        tau=SymTensorField.from_arrays(grid, [ifftn(th) for th in tau_next_h]),
        pi=Field.zeros(grid),
        time=s.time + dt,
    )
    out = IncompressibleState(
        u=out.u, eta=out.eta, tau=out.tau, pi=recover_pressure(out, p), time=out.time
    )
    violations = validate_state(out)
    if violations:
        raise StateError(
            f"invalid state after step to t={out.time:.6g}: " + "; ".join(violations)
        )
    return out


def record_incompressible(s: IncompressibleState, p: PhysicalParams) -> DiagnosticRecord:
    dev = [max_abs(s.u), float(np.max(np.abs(s.eta.values - 1.0))), max_abs(s.tau)]
    return DiagnosticRecord(
        time=s.time,
        energy=limit_energy(s, p),
        dissipation=dissipation_D(s, p),
        div_u_h1=sobolev_norm(divergence(s.u), 1),
        pprime_grad_phi_h1=0.0,
        max_abs_u=max_abs(s.u),
        state_max_abs=max(dev),
    )


def run_incompressible(
    s0: IncompressibleState,
    cfg: ImexConfig,
    p: PhysicalParams,
    observers: Iterable[Observer] = (),
    store_stride: int | None = None,
) -> Trajectory:
    """Step to t_end; the divergence-free invariant is checked each callback."""
    violations = validate_state(s0)
    if violations:
        raise StateError("initial state invalid: " + "; ".join(violations))
    try:
        check_cfl(cfg.dt, s0.u, s0.grid, safety=2.0, time=s0.time)
    except StateError as exc:
        raise ConfigError(str(exc)) from None

    traj = Trajectory()
    traj.append(record_incompressible(s0, p))
    if store_stride:
        traj.snapshots.append((s0.time, s0))
    notify(observers, s0)

    samples = sample_steps(cfg.n_steps, cfg.callback_stride)
    state = s0
    for step in range(1, cfg.n_steps + 1):
        state = projection_step(state, cfg, p)
        if store_stride and step % store_stride == 0:
            traj.snapshots.append((state.time, state))
        if step in samples:
            div_max = max_abs(divergence(state.u))
            if div_max > DIV_MONITOR_TOL:
                raise StateError(
                    f"divergence-free invariant broken at t={state.time:.6g} "
                    f"(max {div_max:.3e})"
                )
            traj.append(record_incompressible(state, p))
            notify(observers, state)
            check_cfl(cfg.dt, state.u, state.grid, safety=1.0, time=state.time)
    return traj
