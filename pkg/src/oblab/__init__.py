"""Pseudo-spectral laboratory for a compressible viscoelastic fluid model
and its low-Mach-number (incompressible) limit."""

from .config import StudyConfig, parse_config
from .compressible import imex_step, run, well_prepared_init
from .diagnostics import (
    DissipationReport,
    EnergyReport,
    GapReport,
    RateFit,
    acoustic_ratio,
    convergence_gap,
    dissipation_D,
    energy_E,
    energy_inequality_monitor,
    fit_rate,
    relative_entropy,
    sqrt_density_lemma_check,
)
from .errors import ConfigError, OblabError, SnapshotError, StateError
from .grid import (
    Field,
    GridSpec,
    SymTensorField,
    VectorField,
    dealias,
    divergence,
    gradient,
    laplacian,
    leray_project,
    make_grid,
    sobolev_norm,
    spectral_derivative,
    tensor_divergence,
)
from .incompressible import projection_step, recover_pressure, run_incompressible
from .initial_data import matched_limit_init
from .model import (
    CompressibleState,
    IncompressibleState,
    PhysicalParams,
    Tendency,
    compressible_tendency,
    incompressible_tendency,
    pressure,
    pressure_prime,
    recombine_stress,
    validate_state,
)
from .snapshot import load_snapshot, save_snapshot
from .study import run_study
from .timestep import ImexConfig, Trajectory

__version__ = "0.1.0"

__all__ = [
    "CompressibleState",
    "ConfigError",
    "DissipationReport",
    "EnergyReport",
    "Field",
    "GapReport",
    "GridSpec",
    "ImexConfig",
    "IncompressibleState",
    "OblabError",
    "PhysicalParams",
    "RateFit",
    "SnapshotError",
    "StateError",
    "StudyConfig",
    "SymTensorField",
    "Tendency",
    "Trajectory",
    "VectorField",
    "acoustic_ratio",
    "compressible_tendency",
    "convergence_gap",
    "dealias",
    "dissipation_D",
    "divergence",
    "energy_E",
    "energy_inequality_monitor",
    "fit_rate",
    "gradient",
    "imex_step",
    "incompressible_tendency",
    "laplacian",
    "leray_project",
    "load_snapshot",
    "make_grid",
    "matched_limit_init",
    "parse_config",
    "pressure",
    "pressure_prime",
    "projection_step",
    "recombine_stress",
    "recover_pressure",
    "relative_entropy",
    "run",
    "run_incompressible",
    "run_study",
    "save_snapshot",
    "sobolev_norm",
    "spectral_derivative",
    "sqrt_density_lemma_check",
    "tensor_divergence",
    "validate_state",
    "well_prepared_init",
]
