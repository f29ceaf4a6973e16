"""Energy, dissipation, relative entropy, convergence gap, and monitors.

All functionals mirror the continuous definitions: weighted H^3 norms for
the compressible energy (pressure-derivative weight on phi, density weight
on u), unweighted H^3 norms in the dissipation, plain L^2 distances in the
convergence gap, and the convex relative-entropy density for the pressure
slot.  Monitors return normalized scalars so tolerances stay
grid-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, StateError
from .grid import (
    Field,
    SymTensorField,
    VectorField,
    divergence,
    gradient,
    integrate,
    sobolev_norm,
    spectral_derivative,
    sym_multiplicities,
)
from .model import (
    CompressibleState,
    IncompressibleState,
    PhysicalParams,
    pressure_prime,
    validate_state,
)
from .timestep import Trajectory


@dataclass(frozen=True)
class EnergyReport:
    time: float
    e_phi: float
    e_u: float
    e_eta: float
    e_tau: float

    @property
    def e_total(self) -> float:
        return self.e_phi + self.e_u + self.e_eta + self.e_tau


@dataclass(frozen=True)
class DissipationReport:
    time: float
    d_grad_u: float
    d_div_u: float
    d_grad_eta: float
    d_tau: float
    d_grad_tau: float

    @property
    def d_total(self) -> float:
        return self.d_grad_u + self.d_div_u + self.d_grad_eta + self.d_tau + self.d_grad_tau


@dataclass(frozen=True)
class GapReport:
    time: float
    epsilon: float
    g_u: float
    g_eta: float
    g_tau: float
    g_pi: float

    @property
    def total(self) -> float:
        return self.g_u + self.g_eta + self.g_tau + self.g_pi


@dataclass(frozen=True)
class RateFit:
    beta0_hat: float
    intercept: float
    r_squared: float
    points: tuple[tuple[float, float], ...]


def _grad_norm_sq(v: VectorField, order: int) -> float:
    """Sum_j ||d_j v||_{H^order}^2 over all components."""
    total = 0.0
    for comp in v.components:
        for axis in range(v.grid.dim):
            total += sobolev_norm(spectral_derivative(comp, axis), order) ** 2
    return total


def _tensor_grad_norm_sq(t: SymTensorField, order: int) -> float:
    total = 0.0
    mults = sym_multiplicities(t.grid.dim)
    for comp, mult in zip(t.components, mults):
        for axis in range(t.grid.dim):
            total += mult * sobolev_norm(spectral_derivative(comp, axis), order) ** 2
    return total


def energy_E(s: CompressibleState, p: PhysicalParams) -> EnergyReport:
    """Weighted H^3 energy of a compressible state."""
    violations = validate_state(s)
    if violations:
        raise StateError("; ".join(violations))
    rho = s.density()
    pprime = pressure_prime(rho, p)
    eta_dev = Field(s.grid, s.eta.values - 1.0)
    return EnergyReport(
        time=s.time,
        e_phi=sobolev_norm(s.phi, 3, weight=pprime) ** 2,
        e_u=sobolev_norm(s.u, 3, weight=rho) ** 2,
        e_eta=p.eta_weight * sobolev_norm(eta_dev, 3) ** 2,
        e_tau=(p.beta / (2.0 * p.k**2)) * sobolev_norm(s.tau, 3) ** 2,
    )


def limit_energy(s: IncompressibleState, p: PhysicalParams) -> EnergyReport:
    """Unweighted analogue of the energy for limit-system states."""
    eta_dev = Field(s.grid, s.eta.values - 1.0)
    return EnergyReport(
        time=s.time,
        e_phi=0.0,
        e_u=sobolev_norm(s.u, 3) ** 2,
        e_eta=p.eta_weight * sobolev_norm(eta_dev, 3) ** 2,
        e_tau=(p.beta / (2.0 * p.k**2)) * sobolev_norm(s.tau, 3) ** 2,
    )


def dissipation_D(
    s: CompressibleState | IncompressibleState, p: PhysicalParams
) -> DissipationReport:
    """Unweighted H^3 dissipation functional (shared by both systems)."""
    grad_eta_sq = sum(
        sobolev_norm(spectral_derivative(s.eta, axis), 3) ** 2
        for axis in range(s.grid.dim)
    )
    return DissipationReport(
        time=s.time,
        d_grad_u=p.mu1 * _grad_norm_sq(s.u, 3),
        d_div_u=p.mu2 * sobolev_norm(divergence(s.u), 3) ** 2,
        d_grad_eta=p.nu * p.eta_weight * grad_eta_sq,
        d_tau=(p.beta * p.A0 / (4.0 * p.k**2)) * sobolev_norm(s.tau, 3) ** 2,
        d_grad_tau=(p.beta * p.nu / (2.0 * p.k**2)) * _tensor_grad_norm_sq(s.tau, 3),
    )


def relative_entropy(s: CompressibleState, p: PhysicalParams) -> tuple[Field, float]:
    """Pointwise relative-entropy density and its torus integral.

    Pi = (a/(gamma-1)) * [rho^gamma - gamma*(rho-1) - 1] / eps^2, evaluated
    through expm1/log1p so the near-equilibrium cancellation stays accurate.
    """
    x = s.epsilon * s.phi.values  # rho - 1
    if np.min(1.0 + x) <= 0:
        raise StateError("density non-positive")
    h = np.expm1(p.gamma * np.log1p(x)) - p.gamma * x
    np.maximum(h, 0.0, out=h)  # convexity guarantees h >= 0; clamp round-off
    density = (p.a / (p.gamma - 1.0)) / s.epsilon**2 * h
    field = Field(s.grid, density)
    return field, integrate(field)


def sqrt_density_lemma_check(s: CompressibleState, p: PhysicalParams) -> float:
    """||sqrt(rho)-1||_{L2} / (eps * <Pi,1>^(1/2)); 0 when both vanish."""
    _, pi_int = relative_entropy(s, p)
    sqrt_dev = np.expm1(0.5 * np.log1p(s.epsilon * s.phi.values))
    norm = math.sqrt(float((sqrt_dev**2).sum()) * s.grid.cell_volume)
    if pi_int <= 0.0:
        return 0.0
    return norm / (s.epsilon * math.sqrt(pi_int))


def convergence_gap(
    sc: CompressibleState,
    si: IncompressibleState,
    p: PhysicalParams,
    time_tol: float = 1e-9,
) -> GapReport:
    """Squared L^2 distances between a compressible state and the limit."""
    if sc.grid != si.grid:
        raise ConfigError("states live on different grids")
    if abs(sc.time - si.time) >= time_tol:
        raise ConfigError(
            f"states at different times ({sc.time} vs {si.time}, tol {time_tol})"
        )
    vol = sc.grid.cell_volume
    sqrt_rho = np.sqrt(1.0 + sc.epsilon * sc.phi.values)
    g_u = sum(
        float(((sqrt_rho * ce.values - ci.values) ** 2).sum()) * vol
        for ce, ci in zip(sc.u.components, si.u.components)
    )
    g_eta = float(((sc.eta.values - si.eta.values) ** 2).sum()) * vol
    mults = sym_multiplicities(sc.grid.dim)
    g_tau = sum(
        mult * float(((ce.values - ci.values) ** 2).sum()) * vol
        for ce, ci, mult in zip(sc.tau.components, si.tau.components, mults)
    )
    _, g_pi = relative_entropy(sc, p)
    return GapReport(
        time=sc.time, epsilon=sc.epsilon, g_u=g_u, g_eta=g_eta, g_tau=g_tau, g_pi=g_pi
    )


def cumulative_dissipation(times: list[float], d_totals: list[float]) -> list[float]:
    """Right-endpoint running sum of D dt, zero at the first sample.

    The accumulation order (left to right) is part of the CSV contract so
    downstream tools can reproduce it bit for bit.
    """
    out = [0.0]
    acc = 0.0
    for m in range(1, len(times)):
        acc += d_totals[m] * (times[m] - times[m - 1])
        out.append(acc)
    return out


def energy_inequality_monitor(traj: Trajectory) -> float:
    """max_n [E(t_n) + sum_{m<=n} D dt - E(0)] / max(E(0), 1e-300)."""
    if not traj.records:
        raise ValueError("empty trajectory")
    e = [r.energy.e_total for r in traj.records]
    d = [r.dissipation.d_total for r in traj.records]
    cum = cumulative_dissipation(traj.times, d)
    e0 = e[0]
    denom = max(e0, 1e-300)
    return max((e_n + c_n - e0) / denom for e_n, c_n in zip(e, cum))


def acoustic_ratio(traj: Trajectory, epsilon: float) -> float:
    """sup over samples of (||div u||_{H1} + ||P'(rho) grad phi||_{H1}) / eps."""
    if not traj.records:
        raise ValueError("empty trajectory")
    return max(
        (r.div_u_h1 + r.pprime_grad_phi_h1) / epsilon for r in traj.records
    )


def pprime_grad_phi_h1(s: CompressibleState, p: PhysicalParams) -> float:
    """||P'(rho) grad phi||_{H^1} for the acoustic-bound monitor."""
    pprime = pressure_prime(s.density(), p)
    grad = gradient(s.phi)
    weighted = VectorField.from_arrays(
        s.grid, [pprime.values * c.values for c in grad.components]
    )
    return sobolev_norm(weighted, 1)


def fit_rate(points: list[tuple[float, float]]) -> RateFit:
    """Least-squares slope of log(gap) against log(eps)."""
    if len(points) < 3:
        raise ValueError(f"need at least 3 points, got {len(points)}")
    for eps, gap in points:
        if not (eps > 0 and gap > 0):
            raise ValueError(f"non-positive point ({eps}, {gap})")
    ordered = sorted(points, key=lambda pt: -pt[0])
    x = np.log([pt[0] for pt in ordered])
    y = np.log([pt[1] for pt in ordered])
    x_mean, y_mean = x.mean(), y.mean()
    sxx = float(((x - x_mean) ** 2).sum())
    sxy = float(((x - x_mean) * (y - y_mean)).sum())
    slope = sxy / sxx
    intercept = y_mean - slope * x_mean
    residual = y - (slope * x + intercept)
    ss_res = float((residual**2).sum())
    ss_tot = float(((y - y_mean) ** 2).sum())
    r_squared = 1.0 if ss_tot == 0.0 and ss_res == 0.0 else 1.0 - ss_res / ss_tot
    return RateFit(
        beta0_hat=slope,
        intercept=intercept,
        r_squared=r_squared,
        points=tuple((float(e), float(g)) for e, g in ordered),
    )
