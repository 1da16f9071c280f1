"""Casimir energy and torque between aligned single-wall carbon nanotube films."""

from __future__ import annotations

__version__ = "0.1.0"

from .analysis import (
    CrossoverResult,
    ScalingResult,
    fit_sin2phi,
    local_log_slope,
    quantum_thermal_crossover,
    torque_phase_flip,
)
from .film import CNTFilm, ConductivityTensor, ConventionError, DiluteRegimeWarning, FilmSpec, rotate_tensor
from .lifshitz import (
    CasimirPoint,
    CasimirResult,
    ConstantSheet,
    LifshitzSolver,
    ReflectionMatrix,
    energy_integrand,
    fresnel_matrix,
    fresnel_n0_limit,
    reflection_derivative,
)
from .swcnt import (
    Chirality,
    ElectronicParams,
    InterbandModel,
    InterbandResponse,
    Oscillator,
    SpectralPoint,
    tube_radius,
)

__all__ = [
    "__version__",
    "CrossoverResult", "ScalingResult", "fit_sin2phi", "local_log_slope",
    "quantum_thermal_crossover", "torque_phase_flip",
    "CNTFilm", "ConductivityTensor", "ConventionError", "DiluteRegimeWarning", "FilmSpec",
    "rotate_tensor",
    "CasimirPoint", "CasimirResult", "ConstantSheet", "LifshitzSolver", "ReflectionMatrix",
    "energy_integrand", "fresnel_matrix", "fresnel_n0_limit", "reflection_derivative",
    "Chirality", "ElectronicParams", "InterbandModel", "InterbandResponse", "Oscillator",
    "SpectralPoint", "tube_radius",
]
