"""IMEX time integration of the compressible perturbation system.

The stiff constant-coefficient part couples (phi, u) through the acoustic
operator and the constant viscosities; per Fourier mode it is a dense
(1+dim) x (1+dim) complex system whose inverse is precomputed once per
(grid, dt, epsilon, params).  The eta and tau slots are scalar per mode.
The step size is therefore limited only by the advective CFL guard,
uniformly in epsilon.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .diagnostics import dissipation_D, energy_E, pprime_grad_phi_h1
from .errors import ConfigError, StateError
from .grid import (
    Field,
    GridSpec,
    SymTensorField,
    VectorField,
    divergence,
    fftn,
    ifftn,
    max_abs,
    sobolev_norm,
    spectral,
)
from .initial_data import well_prepared_init  # re-exported entry point
from .model import (
    CompressibleState,
    PhysicalParams,
    _compressible_nonstiff,
    _HatCache,
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

__all__ = ["imex_step", "run", "well_prepared_init"]


@dataclass(frozen=True)
class _ImplicitData:
    acoustic_inv: np.ndarray  # (n_modes, 1+dim, 1+dim) complex
    eta_mult: np.ndarray
    tau_mult: np.ndarray


@lru_cache(maxsize=32)
def _implicit_data(
    grid: GridSpec, dt: float, epsilon: float, p: PhysicalParams
) -> _ImplicitData:
    sp = spectral(grid)
    dim = grid.dim
    c = 0.5 * dt
    kappa = [np.broadcast_to(ik.imag, grid.shape).ravel() for ik in sp.ik]
    ksq = sp.ksq.ravel()
    n_modes = ksq.size
    a_gamma = p.a * p.gamma

    mat = np.zeros((n_modes, dim + 1, dim + 1), dtype=complex)
    mat[:, 0, 0] = 1.0
    for j in range(dim):
        mat[:, 0, 1 + j] = (c / epsilon) * 1j * kappa[j]
        mat[:, 1 + j, 0] = (c * a_gamma / epsilon) * 1j * kappa[j]
        for l in range(dim):
            mat[:, 1 + j, 1 + l] = c * p.mu2 * kappa[j] * kappa[l]
        mat[:, 1 + j, 1 + j] += 1.0 + c * p.mu1 * ksq
    inv = np.linalg.inv(mat)
    assert np.all(np.isfinite(inv)), "acoustic-viscous mode solve singular"

    eta_mult = 1.0 / (1.0 + c * p.nu * sp.ksq)
    tau_mult = 1.0 / (1.0 + c * (p.nu * sp.ksq + 0.5 * p.A0))
    return _ImplicitData(acoustic_inv=inv, eta_mult=eta_mult, tau_mult=tau_mult)


def _solve_acoustic(data: _ImplicitData, phi_h, u_hs, grid: GridSpec):
    stacked = np.stack([phi_h.ravel()] + [u.ravel() for u in u_hs], axis=-1)
    solved = np.einsum("mij,mj->mi", data.acoustic_inv, stacked)
    phi_out = solved[:, 0].reshape(grid.shape)
    u_out = [solved[:, 1 + j].reshape(grid.shape) for j in range(grid.dim)]
    return phi_out, u_out


def _stiff_hat(cache: _HatCache, epsilon: float, p: PhysicalParams):
    """L-hat applied to the cached state transforms."""
    sp = cache.sp
    div_h = sum(h * ik for h, ik in zip(cache.u_h, sp.ik))
    l_phi = -div_h / epsilon
    a_gamma = p.a * p.gamma
    l_u = [
        -(a_gamma / epsilon) * ik * cache.phi_h
        - p.mu1 * sp.ksq * uh
        + p.mu2 * ik * div_h
        for ik, uh in zip(sp.ik, cache.u_h)
    ]
    l_eta = -p.nu * sp.ksq * cache.eta_h
    l_tau = [(-p.nu * sp.ksq - 0.5 * p.A0) * th for th in cache.tau_h]
    return l_phi, l_u, l_eta, l_tau


def imex_step(
    s: CompressibleState, cfg: ImexConfig, p: PhysicalParams
) -> CompressibleState:
    """Advance one step; exact fixed point at the rest state."""
    grid = s.grid
    check_cfl(cfg.dt, s.u, grid, safety=1.0, time=s.time)
    data = _implicit_data(grid, cfg.dt, s.epsilon, p)
    dt = cfg.dt
    half = 0.5 * dt

    phi = s.phi.values
    u = [c.values for c in s.u.components]
    eta = s.eta.values
    tau = [c.values for c in s.tau.components]

    n_phi, n_u, n_eta, n_tau, cache = _compressible_nonstiff(
        grid, phi, u, eta, tau, s.epsilon, p
    )

    # stage 1: (I - dt/2 L) y* = y + dt/2 N(y)
    phi_s, u_s = _solve_acoustic(
        data,
        cache.phi_h + half * fftn(n_phi),
        [uh + half * fftn(nu) for uh, nu in zip(cache.u_h, n_u)],
        grid,
    )
    eta_s = data.eta_mult * (cache.eta_h + half * fftn(n_eta))
    tau_s = [
        data.tau_mult * (th + half * fftn(nt)) for th, nt in zip(cache.tau_h, n_tau)
    ]
    star = (
        ifftn(phi_s),
        [ifftn(uh) for uh in u_s],
        ifftn(eta_s),
        [ifftn(th) for th in tau_s],
    )

    # stage 2: (I - dt/2 L) y_next = y + dt N(y*) + dt/2 L y
    m_phi, m_u, m_eta, m_tau, _ = _compressible_nonstiff(
        grid, star[0], star[1], star[2], star[3], s.epsilon, p
    )
    l_phi, l_u, l_eta, l_tau = _stiff_hat(cache, s.epsilon, p)
    phi_n, u_n = _solve_acoustic(
        data,
        cache.phi_h + dt * fftn(m_phi) + half * l_phi,
        [
            uh + dt * fftn(mu) + half * lu
            for uh, mu, lu in zip(cache.u_h, m_u, l_u)
        ],
        grid,
    )
    eta_n = data.eta_mult * (cache.eta_h + dt * fftn(m_eta) + half * l_eta)
    tau_n = [
        data.tau_mult * (th + dt * fftn(mt) + half * lt)
        for th, mt, lt in zip(cache.tau_h, m_tau, l_tau)
    ]

    out = CompressibleState(
        phi=Field(grid, ifftn(phi_n)),
        u=VectorField.from_arrays(grid, [ifftn(uh) for uh in u_n]),
        eta=Field(grid, ifftn(eta_n)),
        tau=SymTensorField.from_arrays(grid, [ifftn(th) for th in tau_n]),
        epsilon=s.epsilon,
        time=s.time + dt,
    )
    violations = validate_state(out)
    if violations:
        raise StateError(f"invalid state after step to t={out.time:.6g}: "
                         + "; ".join(violations))
    return out


def record_compressible(s: CompressibleState, p: PhysicalParams) -> DiagnosticRecord:
    dev = [max_abs(s.phi), max_abs(s.u), float(np.max(np.abs(s.eta.values - 1.0)))]
    if s.tau.components:
        dev.append(max_abs(s.tau))
    return DiagnosticRecord(
        time=s.time,
        energy=energy_E(s, p),
        dissipation=dissipation_D(s, p),
        div_u_h1=sobolev_norm(divergence(s.u), 1),
        pprime_grad_phi_h1=pprime_grad_phi_h1(s, p),
        max_abs_u=max_abs(s.u),
        state_max_abs=max(dev),
    )


def run(
    s0: CompressibleState,
    cfg: ImexConfig,
    p: PhysicalParams,
    observers: Iterable[Observer] = (),
    store_stride: int | None = None,
) -> Trajectory:
    """Step to t_end, recording diagnostics every callback_stride steps."""
    violations = validate_state(s0)
    if violations:
        raise StateError("initial state invalid: " + "; ".join(violations))
    try:
        check_cfl(cfg.dt, s0.u, s0.grid, safety=2.0, time=s0.time)
    except StateError as exc:
        raise ConfigError(str(exc)) from None

    traj = Trajectory()
    traj.append(record_compressible(s0, p))
    if store_stride:
        traj.snapshots.append((s0.time, s0))
    notify(observers, s0)

    samples = sample_steps(cfg.n_steps, cfg.callback_stride)
    state = s0
    for step in range(1, cfg.n_steps + 1):
        state = imex_step(state, cfg, p)
        if store_stride and step % store_stride == 0:
            traj.snapshots.append((state.time, state))
        if step in samples:
            traj.append(record_compressible(state, p))
            notify(observers, state)
            check_cfl(cfg.dt, state.u, state.grid, safety=1.0, time=state.time)
    return traj
