"""Physical parameters, simulation states, and right-hand-side assembly.

The compressible system evolves the density perturbation phi (rho = 1 +
eps*phi), velocity u, polymer number density eta, and the shifted extra
stress tau.  The incompressible limit evolves (u, eta, tau) with a
Leray-projected momentum equation and a recovered pressure pi.

Tendencies are split into a constant-coefficient stiff part (acoustic +
viscous + diffusive + relaxation terms, diagonal per Fourier mode) and an
explicit remainder; the split sums to the full right-hand side exactly.
Every pointwise product in a right-hand side is dealiased.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, StateError
from .grid import (
    Field,
    GridSpec,
    SymTensorField,
    VectorField,
    dealias_hat,
    fftn,
    ifftn,
    leray_project_hat,
    max_abs,
    spectral,
    sym_pairs,
    sym_slot,
)

DIV_FREE_TOL = 1e-8
ETA_FLOOR = -1e-12


@dataclass(frozen=True)
class PhysicalParams:
    """Coefficients of the model; defaults match the documented config."""

    a: float = 1.0
    gamma: float = 2.0
    mu1: float = 0.1
    mu2: float = 0.1
    nu: float = 0.1
    beta: float = 0.5
    k: float = 1.0
    L_poly: float = 2.0
    zbar: float = 0.1
    A0: float = 1.0

    def __post_init__(self):
        checks = [
            (self.a > 0, "a must be positive"),
            (self.gamma > 1, "gamma must exceed 1"),
            (self.mu1 > 0, "mu1 must be positive"),
            (self.mu2 > 0, "mu2 must be positive"),
            (self.nu > 0, "nu must be positive"),
            (self.beta >= 0, "beta must be nonnegative"),
            (self.k > 0, "k must be positive"),
            (self.L_poly >= 1, "L_poly must be at least 1"),
            (self.zbar >= 0, "zbar must be nonnegative"),
            (self.A0 > 0, "A0 must be positive"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    @property
    def eta_weight(self) -> float:
        """Energy weight beta*(L-1) + 2*zbar on the eta slot."""
        return self.beta * (self.L_poly - 1.0) + 2.0 * self.zbar


@dataclass(frozen=True)
class CompressibleState:
    phi: Field
    u: VectorField
    eta: Field
    tau: SymTensorField
    epsilon: float
    time: float = 0.0

    def __post_init__(self):
        grids = {self.phi.grid, self.u.grid, self.eta.grid, self.tau.grid}
        if len(grids) != 1:
            raise ConfigError("state fields live on different grids")
        if not 0 < self.epsilon <= 1:
            raise ConfigError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if self.time < 0:
            raise ConfigError("time must be nonnegative")

    @property
    def grid(self) -> GridSpec:
        return self.phi.grid

    def density(self) -> Field:
        return Field(self.grid, 1.0 + self.epsilon * self.phi.values)

    @classmethod
    def rest(cls, grid: GridSpec, epsilon: float) -> "CompressibleState":
        return cls(
            phi=Field.zeros(grid),
            u=VectorField.zeros(grid),
            eta=Field.constant(grid, 1.0),
            tau=SymTensorField.zeros(grid),
            epsilon=epsilon,
        )


@dataclass(frozen=True)
class IncompressibleState:
    u: VectorField
    eta: Field
    tau: SymTensorField
    pi: Field
    time: float = 0.0

    def __post_init__(self):
        grids = {self.u.grid, self.eta.grid, self.tau.grid, self.pi.grid}
        if len(grids) != 1:
            raise ConfigError("state fields live on different grids")
        if self.time < 0:
            raise ConfigError("time must be nonnegative")

    @property
    def grid(self) -> GridSpec:
        return self.u.grid

    @classmethod
    def rest(cls, grid: GridSpec) -> "IncompressibleState":
        return cls(
            u=VectorField.zeros(grid),
            eta=Field.constant(grid, 1.0),
            tau=SymTensorField.zeros(grid),
            pi=Field.zeros(grid),
        )


@dataclass(frozen=True)
class TendencyParts:
    d_phi: Field
    d_u: VectorField
    d_eta: Field
    d_tau: SymTensorField


@dataclass(frozen=True)
class Tendency:
    """Full right-hand side plus its stiff/nonstiff decomposition."""

    stiff_linear: TendencyParts
    nonstiff: TendencyParts
    d_phi: Field = field(init=False)
    d_u: VectorField = field(init=False)
    d_eta: Field = field(init=False)
    d_tau: SymTensorField = field(init=False)

    def __post_init__(self):
        grid = self.stiff_linear.d_phi.grid
        add = lambda a, b: Field(grid, a.values + b.values)
        object.__setattr__(
            self, "d_phi", add(self.stiff_linear.d_phi, self.nonstiff.d_phi)
        )
        object.__setattr__(
            self,
            "d_u",
            VectorField(
                grid,
                tuple(
                    add(a, b)
                    for a, b in zip(
                        self.stiff_linear.d_u.components, self.nonstiff.d_u.components
                    )
                ),
            ),
        )
        object.__setattr__(
            self, "d_eta", add(self.stiff_linear.d_eta, self.nonstiff.d_eta)
        )
        object.__setattr__(
            self,
            "d_tau",
            SymTensorField(
                grid,
                tuple(
                    add(a, b)
                    for a, b in zip(
                        self.stiff_linear.d_tau.components,
                        self.nonstiff.d_tau.components,
                    )
                ),
            ),
        )


def pressure(rho: Field, p: PhysicalParams) -> Field:
    """Power-law pressure a*rho^gamma."""
    if not np.all(rho.values > 0):
        raise StateError("density non-positive")
    return Field(rho.grid, p.a * rho.values ** p.gamma)


def pressure_prime(rho: Field, p: PhysicalParams) -> Field:
    if not np.all(rho.values > 0):
        raise StateError("density non-positive")
    return Field(rho.grid, p.a * p.gamma * rho.values ** (p.gamma - 1.0))


def recombine_stress(tau: SymTensorField, eta: Field, p: PhysicalParams) -> SymTensorField:
    """Full extra stress: tau + k*eta on the diagonal."""
    if tau.grid != eta.grid:
        raise ConfigError("tau and eta live on different grids")
    dim = tau.grid.dim
    out = []
    for slot, (i, j) in enumerate(sym_pairs(dim)):
        values = tau.components[slot].values
        if i == j:
            values = values + p.k * eta.values
        out.append(values)
    return SymTensorField.from_arrays(tau.grid, out)


def validate_state(s: CompressibleState | IncompressibleState) -> list[str]:
    """List of invariant violations; empty iff the state is valid."""
    violations: list[str] = []
    if isinstance(s, CompressibleState):
        named = [("phi", [s.phi.values]), ("u", [c.values for c in s.u.components]),
                 ("eta", [s.eta.values]), ("tau", [c.values for c in s.tau.components])]
        for name, arrays in named:
            if not all(np.all(np.isfinite(a)) for a in arrays):
                violations.append(f"non-finite values in {name}")
        if np.isfinite(s.phi.values).all():
            if np.min(1.0 + s.epsilon * s.phi.values) <= 0:
                violations.append("density non-positive")
        if np.isfinite(s.eta.values).all() and np.min(s.eta.values) < ETA_FLOOR:
            violations.append("polymer density negative")
        return violations
    if isinstance(s, IncompressibleState):
        named = [("u", [c.values for c in s.u.components]), ("eta", [s.eta.values]),
                 ("tau", [c.values for c in s.tau.components]), ("pi", [s.pi.values])]
        for name, arrays in named:
            if not all(np.all(np.isfinite(a)) for a in arrays):
                violations.append(f"non-finite values in {name}")
        if all(np.all(np.isfinite(c.values)) for c in s.u.components):
            div_max = max_abs(_divergence_field(s.u))
            if div_max >= 1e-10:
                violations.append(f"velocity not divergence-free (max {div_max:.3e})")
        if np.isfinite(s.pi.values).all():
            scale = max(1.0, float(np.max(np.abs(s.pi.values))))
            if abs(float(s.pi.values.mean())) > 1e-12 * scale:
                violations.append("pressure mean nonzero")
        return violations
    raise ConfigError(f"unsupported state type {type(s).__name__}")


def _divergence_field(v: VectorField) -> Field:
    sp = spectral(v.grid)
    out = np.zeros(v.grid.shape, dtype=complex)
    for comp, ik in zip(v.components, sp.ik):
        out += fftn(comp.values) * ik
    return Field(v.grid, ifftn(out))


def _pressure_residue(phi: np.ndarray, epsilon: float, p: PhysicalParams) -> np.ndarray:
    """(P'(rho)/rho - a*gamma)/epsilon, evaluated without the 1/eps blowup.

    P'(rho)/rho = a*gamma*rho^(gamma-2), so the residue is
    a*gamma*expm1((gamma-2)*log1p(eps*phi))/eps = O(phi) near equilibrium.
    """
    if p.gamma == 2.0:
        return np.zeros_like(phi)
    return p.a * p.gamma * np.expm1((p.gamma - 2.0) * np.log1p(epsilon * phi)) / epsilon


class _HatCache:
    """Forward transforms and common derivatives of one state's fields."""

    def __init__(self, grid: GridSpec, phi, u, eta, tau):
        sp = spectral(grid)
        dim = grid.dim
        self.sp = sp
        self.grid = grid
        self.phi_h = fftn(phi)
        self.u_h = [fftn(c) for c in u]
        self.eta_h = fftn(eta)
        self.tau_h = [fftn(c) for c in tau]
        self.grad_phi = [ifftn(self.phi_h * ik) for ik in sp.ik]
        self.div_u = ifftn(sum(h * ik for h, ik in zip(self.u_h, sp.ik)))
        self.jac_u = [[ifftn(self.u_h[i] * sp.ik[j]) for j in range(dim)] for i in range(dim)]
        self.grad_eta = [ifftn(self.eta_h * ik) for ik in sp.ik]
        self.lap_u = [ifftn(h * (-sp.ksq)) for h in self.u_h]
        div_u_h = sum(h * ik for h, ik in zip(self.u_h, sp.ik))
        self.grad_div_u = [ifftn(div_u_h * ik) for ik in sp.ik]
        self.div_tau = []
        for i in range(dim):
            acc = np.zeros(grid.shape, dtype=complex)
            for j in range(dim):
                acc += self.tau_h[sym_slot(dim, i, j)] * sp.ik[j]
            self.div_tau.append(ifftn(acc))


def _tau_nonstiff(cache: _HatCache, u, eta, tau, p: PhysicalParams) -> list[np.ndarray]:
    """-div(u tau) + (grad_u tau + tau grad_u^T) + k eta (grad_u + grad_u^T)."""
    grid, sp, dim = cache.grid, cache.sp, cache.grid.dim
    jac = cache.jac_u
    out = []
    for slot, (i, j) in enumerate(sym_pairs(dim)):
        local = np.zeros(grid.shape)
        for l in range(dim):
            local += jac[i][l] * tau[sym_slot(dim, l, j)]
            local += tau[sym_slot(dim, i, l)] * jac[j][l]
        local += p.k * eta * (jac[i][j] + jac[j][i])
        acc = fftn(local)
        for l in range(dim):
            acc -= fftn(u[l] * tau[slot]) * sp.ik[l]
        out.append(ifftn(dealias_hat(acc, grid)))
    return out


def _compressible_nonstiff(
    grid: GridSpec, phi, u, eta, tau, epsilon: float, p: PhysicalParams,
    cache: _HatCache | None = None,
):
    """Explicit remainder of the compressible right-hand side (arrays)."""
    c = cache or _HatCache(grid, phi, u, eta, tau)
    sp, dim = c.sp, grid.dim

    inv_rho = 1.0 / (1.0 + epsilon * phi)
    inv_rho_m1 = inv_rho - 1.0
    residue = _pressure_residue(phi, epsilon, p)

    d_phi = -sum(u[j] * c.grad_phi[j] for j in range(dim)) - phi * c.div_u
    d_phi = ifftn(dealias_hat(fftn(d_phi), grid))

    # grad of the polymer pressure-like potential beta(L-1)eta + zbar eta^2
    eta_sq_h = dealias_hat(fftn(eta * eta), grid)
    pot_h = p.beta * (p.L_poly - 1.0) * c.eta_h + p.zbar * eta_sq_h
    grad_pot = [ifftn(pot_h * ik) for ik in sp.ik]

    d_u = []
    for i in range(dim):
        advect = sum(u[j] * c.jac_u[i][j] for j in range(dim))
        term = (
            -advect
            - residue * c.grad_phi[i]
            + inv_rho * ((p.beta / p.k) * c.div_tau[i] - grad_pot[i])
            + inv_rho_m1 * (p.mu1 * c.lap_u[i] + p.mu2 * c.grad_div_u[i])
        )
        d_u.append(ifftn(dealias_hat(fftn(term), grid)))

    d_eta_h = -sum(fftn(eta * u[j]) * sp.ik[j] for j in range(dim))
    d_eta = ifftn(dealias_hat(d_eta_h, grid))

    d_tau = _tau_nonstiff(c, u, eta, tau, p)
    return d_phi, d_u, d_eta, d_tau, c


def _compressible_stiff(
    grid: GridSpec, cache: _HatCache, tau, epsilon: float, p: PhysicalParams
):
    """Constant-coefficient acoustic/viscous/diffusive part (arrays)."""
    sp, dim = cache.sp, grid.dim
    d_phi = -cache.div_u / epsilon
    a_gamma = p.a * p.gamma
    d_u = [
        -(a_gamma / epsilon) * cache.grad_phi[i]
        + p.mu1 * cache.lap_u[i]
        + p.mu2 * cache.grad_div_u[i]
        for i in range(dim)
    ]
    d_eta = ifftn(cache.eta_h * (-sp.ksq)) * p.nu
    d_tau = [
        p.nu * ifftn(h * (-sp.ksq)) - 0.5 * p.A0 * t
        for h, t in zip(cache.tau_h, tau)
    ]
    return d_phi, d_u, d_eta, d_tau


def compressible_tendency(s: CompressibleState, p: PhysicalParams) -> Tendency:
    """Right-hand side of the perturbation-form compressible system."""
    violations = validate_state(s)
    if violations:
        raise StateError("; ".join(violations))
    grid = s.grid
    phi = s.phi.values
    u = [c.values for c in s.u.components]
    eta = s.eta.values
    tau = [c.values for c in s.tau.components]

    n_phi, n_u, n_eta, n_tau, cache = _compressible_nonstiff(
        grid, phi, u, eta, tau, s.epsilon, p
    )
    s_phi, s_u, s_eta, s_tau = _compressible_stiff(grid, cache, tau, s.epsilon, p)

    stiff = TendencyParts(
        d_phi=Field(grid, s_phi),
        d_u=VectorField.from_arrays(grid, s_u),
        d_eta=Field(grid, s_eta),
        d_tau=SymTensorField.from_arrays(grid, s_tau),
    )
    nonstiff = TendencyParts(
        d_phi=Field(grid, n_phi),
        d_u=VectorField.from_arrays(grid, n_u),
        d_eta=Field(grid, n_eta),
        d_tau=SymTensorField.from_arrays(grid, n_tau),
    )
    return Tendency(stiff_linear=stiff, nonstiff=nonstiff)


def _incompressible_nonstiff(
    grid: GridSpec, u, eta, tau, p: PhysicalParams, cache: _HatCache | None = None
):
    """Explicit remainder of the limit system (u part Leray-projected)."""
    c = cache or _HatCache(grid, np.zeros(grid.shape), u, eta, tau)
    sp, dim = c.sp, grid.dim

    du_hats = []
    for i in range(dim):
        advect = sum(u[j] * c.jac_u[i][j] for j in range(dim))
        term = -advect + (p.beta / p.k) * c.div_tau[i]
        du_hats.append(dealias_hat(fftn(term), grid))
    d_u = [ifftn(h) for h in leray_project_hat(du_hats, grid)]

    d_eta_h = -sum(fftn(eta * u[j]) * sp.ik[j] for j in range(dim))
    d_eta = ifftn(dealias_hat(d_eta_h, grid))

    d_tau = _tau_nonstiff(c, u, eta, tau, p)
    return d_u, d_eta, d_tau, c


def _incompressible_stiff(grid: GridSpec, cache: _HatCache, tau, p: PhysicalParams):
    sp = cache.sp
    d_u = [p.mu1 * lap for lap in cache.lap_u]
    d_eta = p.nu * ifftn(cache.eta_h * (-sp.ksq))
    d_tau = [
        p.nu * ifftn(h * (-sp.ksq)) - 0.5 * p.A0 * t
        for h, t in zip(cache.tau_h, tau)
    ]
    return d_u, d_eta, d_tau


def incompressible_tendency(s: IncompressibleState, p: PhysicalParams) -> Tendency:
    """Right-hand side of the incompressible limit system."""
    arrays = [c.values for c in s.u.components] + [s.eta.values] + [
        c.values for c in s.tau.components
    ]
    if not all(np.all(np.isfinite(a)) for a in arrays):
        raise StateError("non-finite values in state")
    div_max = max_abs(_divergence_field(s.u))
    if div_max > DIV_FREE_TOL:
        raise StateError(f"input velocity not divergence-free (max {div_max:.3e})")
    grid = s.grid
    u = [c.values for c in s.u.components]
    eta = s.eta.values
    tau = [c.values for c in s.tau.components]

    n_u, n_eta, n_tau, cache = _incompressible_nonstiff(grid, u, eta, tau, p)
    s_u, s_eta, s_tau = _incompressible_stiff(grid, cache, tau, p)

    zero = Field.zeros(grid)
    stiff = TendencyParts(
        d_phi=zero,
        d_u=VectorField.from_arrays(grid, s_u),
        d_eta=Field(grid, s_eta),
        d_tau=SymTensorField.from_arrays(grid, s_tau),
    )
    nonstiff = TendencyParts(
        d_phi=zero,
        d_u=VectorField.from_arrays(grid, n_u),
        d_eta=Field(grid, n_eta),
        d_tau=SymTensorField.from_arrays(grid, n_tau),
    )
    return Tendency(stiff_linear=stiff, nonstiff=nonstiff)


def with_time(s, time: float):
    return replace(s, time=time)
