"""Well-prepared initial data and its matched incompressible counterpart.

All randomness comes from the fixed 64-bit LCG so identical seeds give
bit-identical fields.  Draws are consumed in a fixed order: the
divergence-free stream (streamfunction in 2D, vector potential in 3D),
the gradient potential, then the phi, eta, and tau-slot streams; two
coefficients per retained mode, modes in lexicographic order with the
first nonzero index positive.  Each building block is normalized to unit
max amplitude, so the epsilon scalings below are exact:

    u0   = delta * u_divfree + eps*delta * grad q
    phi0 = eps*delta * f_phi
    eta0 = 1 + delta * f_eta          (>= 1/2 requires delta <= 1/2)
    tau0 = delta * f_tau
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import ConfigError
from .grid import (
    Field,
    GridSpec,
    SymTensorField,
    VectorField,
    coordinates,
    leray_project,
)
from .model import CompressibleState, IncompressibleState, PhysicalParams
from .rng import Lcg64

MAX_MODE = 4


def _mode_list(dim: int, max_mode: int) -> list[tuple[int, ...]]:
    """One representative per conjugate mode pair, lexicographic order."""
    modes = []
    for m in itertools.product(range(-max_mode, max_mode + 1), repeat=dim):
        if all(v == 0 for v in m):
            continue
        first = next(v for v in m if v != 0)
        if first > 0:
            modes.append(m)
    return modes


def _random_scalar_with_grad(lcg: Lcg64, grid: GridSpec):
    """Band-limited random field and its analytic gradient (unnormalized)."""
    coords = coordinates(grid)
    base = 2.0 * np.pi / grid.box_length
    f = np.zeros(grid.shape)
    grad = [np.zeros(grid.shape) for _ in range(grid.dim)]
    for m in _mode_list(grid.dim, MAX_MODE):
        a = lcg.uniform(-1.0, 1.0)
        b = lcg.uniform(-1.0, 1.0)
        theta = base * sum(mj * xj for mj, xj in zip(m, coords))
        c, s = np.cos(theta), np.sin(theta)
        f += a * c + b * s
        for j in range(grid.dim):
            grad[j] += base * m[j] * (b * c - a * s)
    return f, grad


def _normalize_scalar(f: np.ndarray) -> np.ndarray:
    peak = float(np.max(np.abs(f)))
    return f / peak if peak > 0 else f


def _normalize_vector(comps: list[np.ndarray]) -> list[np.ndarray]:
    peak = float(np.sqrt(sum(c**2 for c in comps).max()))
    return [c / peak for c in comps] if peak > 0 else comps


def _divergence_free_stream(lcg: Lcg64, grid: GridSpec) -> list[np.ndarray]:
    """Unit-amplitude solenoidal field: curl of a streamfunction/potential."""
    if grid.dim == 2:
        _, g = _random_scalar_with_grad(lcg, grid)
        return _normalize_vector([g[1], -g[0]])
    grads = [_random_scalar_with_grad(lcg, grid)[1] for _ in range(3)]
    curl = [
        grads[2][1] - grads[1][2],
        grads[0][2] - grads[2][0],
        grads[1][0] - grads[0][1],
    ]
    return _normalize_vector(curl)


def _seeded_fields(grid: GridSpec, seed: int):
    """The epsilon-independent building blocks shared by both constructors."""
    lcg = Lcg64(seed)
    u_div = _divergence_free_stream(lcg, grid)
    _, grad_q = _random_scalar_with_grad(lcg, grid)
    u_grad = _normalize_vector(grad_q)
    f_phi = _normalize_scalar(_random_scalar_with_grad(lcg, grid)[0])
    f_eta = _normalize_scalar(_random_scalar_with_grad(lcg, grid)[0])
    n_slots = grid.dim * (grid.dim + 1) // 2
    f_tau = [
        _normalize_scalar(_random_scalar_with_grad(lcg, grid)[0])
        for _ in range(n_slots)
    ]
    return u_div, u_grad, f_phi, f_eta, f_tau


def _check_amplitude(delta: float) -> None:
    if delta < 0:
        raise ConfigError(f"delta must be nonnegative, got {delta}")
    if delta > 0.5:
        raise ConfigError(
            f"delta={delta} too large: eta0 = 1 + delta*field would drop below 1/2"
        )


def well_prepared_init(
    grid: GridSpec, p: PhysicalParams, epsilon: float, delta: float, seed: int
) -> CompressibleState:
    """Seeded small data with O(eps) divergence and density gradient."""
    if not 0 < epsilon <= 1:
        raise ConfigError(f"epsilon must lie in (0, 1], got {epsilon}")
    _check_amplitude(delta)
    if delta == 0.0:
        return CompressibleState.rest(grid, epsilon)
    u_div, u_grad, f_phi, f_eta, f_tau = _seeded_fields(grid, seed)
    u0 = [delta * d + (epsilon * delta) * g for d, g in zip(u_div, u_grad)]
    return CompressibleState(
        phi=Field(grid, (epsilon * delta) * f_phi),
        u=VectorField.from_arrays(grid, u0),
        eta=Field(grid, 1.0 + delta * f_eta),
        tau=SymTensorField.from_arrays(grid, [delta * f for f in f_tau]),
        epsilon=epsilon,
    )


def matched_limit_init(
    grid: GridSpec, p: PhysicalParams, delta: float, seed: int
) -> IncompressibleState:
    """The eps -> 0 specialization of the same seeded data, Leray-projected."""
    from .incompressible import recover_pressure  # deferred to avoid a cycle

    _check_amplitude(delta)
    if delta == 0.0:
        return IncompressibleState.rest(grid)
    u_div, _, _, f_eta, f_tau = _seeded_fields(grid, seed)
    u = leray_project(VectorField.from_arrays(grid, [delta * d for d in u_div]))
    state = IncompressibleState(
        u=u,
        eta=Field(grid, 1.0 + delta * f_eta),
        tau=SymTensorField.from_arrays(grid, [delta * f for f in f_tau]),
        pi=Field.zeros(grid),
    )
    return IncompressibleState(
        u=state.u, eta=state.eta, tau=state.tau, pi=recover_pressure(state, p)
    )
