"""Periodic-torus grids, Fourier transforms, and spectral calculus.

Transform convention: forward FFT unscaled, inverse scaled by 1/n^dim
(numpy's default).  Every derivative multiplier zeroes the Nyquist mode so
odd derivatives of real data stay real; all composite operators (gradient,
divergence, Laplacian, Leray projection, Sobolev norms) are built from the
same multipliers, so identities like div(grad f) = lap f hold to round-off.

Integrals use the equal-weight trapezoidal rule, exact for band-limited
integrands on the torus.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import ConfigError, StateError


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on [0, box_length)^dim.

    Wavenumbers are k_j = 2*pi*m/box_length for integer m in [-n/2, n/2).
    ``dealias_fraction`` is the retained fraction of the Nyquist index used
    by :func:`dealias` (2/3 rule by default).
    """

    dim: int
    n: int
    box_length: float
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ConfigError(f"dim must be 2 or 3, got {self.dim}")
        if self.n % 2 != 0 or self.n < 8:
            raise ConfigError(f"n must be even and >= 8, got {self.n}")
        if not self.box_length > 0:
            raise ConfigError(f"box_length must be positive, got {self.box_length}")
        if not 0 < self.dealias_fraction <= 1:
            raise ConfigError(
                f"dealias_fraction must lie in (0, 1], got {self.dealias_fraction}"
            )

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def spacing(self) -> float:
        return self.box_length / self.n

    @property
    def cell_volume(self) -> float:
        return (self.box_length / self.n) ** self.dim

    @property
    def num_points(self) -> int:
        return self.n ** self.dim


def make_grid(dim: int, n: int, box_length: float) -> GridSpec:
    """Validated GridSpec with the default 2/3 dealias rule."""
    return GridSpec(dim=int(dim), n=int(n), box_length=float(box_length))


class _Spectral:
    """Precomputed wavenumber arrays and masks for one grid."""

    def __init__(self, grid: GridSpec):
        n, dim, length = grid.n, grid.dim, grid.box_length
        modes = np.fft.fftfreq(n, d=1.0 / n)  # integer m in fft ordering
        k_axis = 2.0 * np.pi * modes / length
        kd_axis = k_axis.copy()
        kd_axis[n // 2] = 0.0  # Nyquist derivative coefficient zeroed

        self.ik = []
        self.abs_modes = []
        for axis in range(dim):
            shape = [1] * dim
            shape[axis] = n
            self.ik.append(1j * kd_axis.reshape(shape))
            self.abs_modes.append(np.abs(modes).reshape(shape))
        self.ksq = sum((-(ik * ik)).real for ik in self.ik)
        inv = np.zeros_like(self.ksq)
        nonzero = self.ksq > 0
        inv[nonzero] = 1.0 / self.ksq[nonzero]
        self.inv_ksq = inv

        cutoff = grid.dealias_fraction * (n / 2) + 1e-9
        keep = np.ones(grid.shape, dtype=bool)
        for axis in range(dim):
            keep &= self.abs_modes[axis] <= cutoff
        self.mask = keep


@lru_cache(maxsize=None)
def spectral(grid: GridSpec) -> _Spectral:
    return _Spectral(grid)


def coordinates(grid: GridSpec) -> list[np.ndarray]:
    """Meshgrid coordinate arrays (ij indexing) for the torus."""
    x = np.arange(grid.n) * grid.spacing
    return list(np.meshgrid(*([x] * grid.dim), indexing="ij"))


def fftn(values: np.ndarray) -> np.ndarray:
    return np.fft.fftn(values)


def ifftn(hat: np.ndarray) -> np.ndarray:
    return np.fft.ifftn(hat).real


@dataclass(frozen=True)
class Field:
    """Real scalar samples on a grid, row-major by axis order."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ConfigError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )
        if self.values.dtype != np.float64:
            object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))

    @classmethod
    def zeros(cls, grid: GridSpec) -> "Field":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid: GridSpec, value: float) -> "Field":
        return cls(grid, np.full(grid.shape, float(value)))


@dataclass(frozen=True)
class VectorField:
    """dim scalar components sharing one grid."""

    grid: GridSpec
    components: tuple[Field, ...]

    def __post_init__(self):
        if len(self.components) != self.grid.dim:
            raise ConfigError(
                f"expected {self.grid.dim} components, got {len(self.components)}"
            )
        for c in self.components:
            if c.grid != self.grid:
                raise ConfigError("vector components on mismatched grids")

    @classmethod
    def zeros(cls, grid: GridSpec) -> "VectorField":
        return cls(grid, tuple(Field.zeros(grid) for _ in range(grid.dim)))

    @classmethod
    def from_arrays(cls, grid: GridSpec, arrays) -> "VectorField":
        return cls(grid, tuple(Field(grid, np.asarray(a)) for a in arrays))

    def arrays(self) -> list[np.ndarray]:
        return [c.values for c in self.components]


def sym_slot(dim: int, i: int, j: int) -> int:
    """Upper-triangle slot index for the (i, j) tensor entry."""
    if i > j:
        i, j = j, i
    if dim == 2:
        return {(0, 0): 0, (0, 1): 1, (1, 1): 2}[(i, j)]
    return {(0, 0): 0, (0, 1): 1, (0, 2): 2, (1, 1): 3, (1, 2): 4, (2, 2): 5}[(i, j)]


def sym_pairs(dim: int) -> list[tuple[int, int]]:
    """Upper-triangle (i, j) pairs in slot order."""
    return [(i, j) for i in range(dim) for j in range(i, dim)]


def sym_multiplicities(dim: int) -> list[int]:
    """Frobenius-norm weight per slot (off-diagonal entries count twice)."""
    return [1 if i == j else 2 for i, j in sym_pairs(dim)]


@dataclass(frozen=True)
class SymTensorField:
    """Symmetric tensor stored as dim*(dim+1)/2 upper-triangle components."""

    grid: GridSpec
    components: tuple[Field, ...]

    def __post_init__(self):
        expected = self.grid.dim * (self.grid.dim + 1) // 2
        if len(self.components) != expected:
            raise ConfigError(
                f"expected {expected} tensor components, got {len(self.components)}"
            )
        for c in self.components:
            if c.grid != self.grid:
                raise ConfigError("tensor components on mismatched grids")

    @classmethod
    def zeros(cls, grid: GridSpec) -> "SymTensorField":
        count = grid.dim * (grid.dim + 1) // 2
        return cls(grid, tuple(Field.zeros(grid) for _ in range(count)))

    @classmethod
    def from_arrays(cls, grid: GridSpec, arrays) -> "SymTensorField":
        return cls(grid, tuple(Field(grid, np.asarray(a)) for a in arrays))

    def component(self, i: int, j: int) -> Field:
        return self.components[sym_slot(self.grid.dim, i, j)]

    def arrays(self) -> list[np.ndarray]:
        return [c.values for c in self.components]


AnyField = Union[Field, VectorField, SymTensorField]


def _require_same_grid(*grids: GridSpec) -> GridSpec:
    first = grids[0]
    for g in grids[1:]:
        if g != first:
            raise ConfigError("operands live on different grids")
    return first


def spectral_derivative(f: Field, axis: int) -> Field:
    """Exact derivative of band-limited data along one axis."""
    if not 0 <= axis < f.grid.dim:
        raise ConfigError(f"axis {axis} out of range for dim {f.grid.dim}")
    sp = spectral(f.grid)
    return Field(f.grid, ifftn(fftn(f.values) * sp.ik[axis]))


def gradient(f: Field) -> VectorField:
    sp = spectral(f.grid)
    fh = fftn(f.values)
    return VectorField.from_arrays(f.grid, [ifftn(fh * ik) for ik in sp.ik])


def divergence(v: VectorField) -> Field:
    sp = spectral(v.grid)
    out = np.zeros(v.grid.shape, dtype=complex)
    for axis, comp in enumerate(v.components):
        out += fftn(comp.values) * sp.ik[axis]
    return Field(v.grid, ifftn(out))


def laplacian(f: Field) -> Field:
    sp = spectral(f.grid)
    return Field(f.grid, ifftn(fftn(f.values) * (-sp.ksq)))


def tensor_divergence(t: SymTensorField) -> VectorField:
    """Row-wise divergence (div t)_i = sum_j d_j t_ij."""
    sp = spectral(t.grid)
    dim = t.grid.dim
    hats = [fftn(c.values) for c in t.components]
    out = []
    for i in range(dim):
        acc = np.zeros(t.grid.shape, dtype=complex)
        for j in range(dim):
            acc += hats[sym_slot(dim, i, j)] * sp.ik[j]
        out.append(ifftn(acc))
    return VectorField.from_arrays(t.grid, out)


def dealias(f: Field) -> Field:
    """Zero Fourier modes with any |m| above the retained fraction."""
    sp = spectral(f.grid)
    return Field(f.grid, ifftn(fftn(f.values) * sp.mask))


def dealias_hat(hat: np.ndarray, grid: GridSpec) -> np.ndarray:
    return hat * spectral(grid).mask


def leray_project(v: VectorField) -> VectorField:
    """Remove the gradient part: v - grad(inv_lap(div v)); means preserved."""
    return VectorField.from_arrays(
        v.grid,
        [ifftn(h) for h in leray_project_hat([fftn(c.values) for c in v.components], v.grid)],
    )


def leray_project_hat(hats: list[np.ndarray], grid: GridSpec) -> list[np.ndarray]:
    sp = spectral(grid)
    div_hat = sum(h * ik for h, ik in zip(hats, sp.ik))
    scale = div_hat * sp.inv_ksq
    # (ik)^2 = -ksq, so adding ik*scale cancels the gradient part exactly
    return [h + ik * scale for h, ik in zip(hats, sp.ik)]


def integrate(f: Field) -> float:
    """Trapezoidal (equal-weight) integral over the torus."""
    return float(f.values.sum() * f.grid.cell_volume)


def max_abs(f: AnyField) -> float:
    comps, _ = _flatten_components(f)
    return max(float(np.max(np.abs(c))) for c in comps)


def _flatten_components(f: AnyField) -> tuple[list[np.ndarray], list[int]]:
    """Component arrays plus their norm multiplicities."""
    if isinstance(f, Field):
        return [f.values], [1]
    if isinstance(f, VectorField):
        return [c.values for c in f.components], [1] * f.grid.dim
    if isinstance(f, SymTensorField):
        return [c.values for c in f.components], sym_multiplicities(f.grid.dim)
    raise ConfigError(f"unsupported field type {type(f).__name__}")


@lru_cache(maxsize=None)
def _multi_indices(dim: int, order: int) -> tuple[tuple[int, ...], ...]:
    return tuple(
        alpha
        for alpha in itertools.product(range(order + 1), repeat=dim)
        if sum(alpha) <= order
    )


def sobolev_norm(f: AnyField, order: int, weight: Field | None = None) -> float:
    """(sum_{|alpha|<=order} integral |d^alpha f|^2 w dx)^(1/2).

    Derivatives are spectral, the integral is the equal-weight trapezoidal
    rule; ``weight`` must be strictly positive where given.
    """
    if order not in (0, 1, 2, 3, 4):
        raise ConfigError(f"sobolev order must be in 0..4, got {order}")
    grid = f.grid
    if weight is not None:
        _require_same_grid(grid, weight.grid)
        if not np.all(weight.values > 0):
            raise StateError("sobolev weight must be strictly positive")
    sp = spectral(grid)
    comps, mults = _flatten_components(f)
    w = weight.values if weight is not None else None
    total = 0.0
    for values, mult in zip(comps, mults):
        fh = fftn(values)
        for alpha in _multi_indices(grid.dim, order):
            dh = fh
            for axis, power in enumerate(alpha):
                for _ in range(power):
                    dh = dh * sp.ik[axis]
            d = ifftn(dh)
            contrib = d * d if w is None else d * d * w
            total += mult * float(contrib.sum())
    return float(np.sqrt(total * grid.cell_volume))
