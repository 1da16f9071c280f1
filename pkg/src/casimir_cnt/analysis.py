"""Post-processing of energy and torque samples.

Scaling exponents, quantum-thermal crossover distances, torque phase flips and
sin(2 phi) fits.  Functions that need new evaluations take plain callables of
the separation, so they work with any solver (or with synthetic data).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

SCALING_THRESHOLD = 3.5


@dataclass(frozen=True)
class ScalingResult:
    separations_nm: np.ndarray  # interior points only
    exponent: np.ndarray  # p with E ~ D^-p
    transition_nm: float | None = None  # where p crosses SCALING_THRESHOLD


@dataclass(frozen=True)
class CrossoverResult:
    distance_nm: float | None
    bracket_nm: tuple[float, float]
    residual: float | None = None  # (|E_qm| - |E_T|) / |E_T| at the root
    message: str = ""


def local_log_slope(separations_nm: Sequence[float], energies: Sequence[float],
                    threshold: float = SCALING_THRESHOLD) -> ScalingResult:
    """p(D_i) = -d ln|E| / d ln D by three-point differences on the (non-uniform) log grid.

    The three-point formula is exact for ln|E| linear in ln D, so pure power
    laws give exact exponents for any spacing.
    """
    d = np.asarray(separations_nm, dtype=float)
    e = np.asarray(energies, dtype=float)
    if d.ndim != 1 or d.size < 3 or e.shape != d.shape:
        raise ValueError("need at least 3 (D, E) samples")
    if np.any(np.diff(d) <= 0) or d[0] <= 0:
        raise ValueError("separations must be positive and strictly increasing")
    if np.any(e == 0) or not (np.all(e > 0) or np.all(e < 0)):
        raise ValueError("energies must be nonzero and of one sign")
    x = np.log(d)
    y = np.log(np.abs(e))
    h0 = x[1:-1] - x[:-2]
    h1 = x[2:] - x[1:-1]
    slope = (h0 * h0 * y[2:] + (h1 * h1 - h0 * h0) * y[1:-1] - h1 * h1 * y[:-2]) / (h0 * h1 * (h0 + h1))
    p = -slope
    interior = d[1:-1]
    transition = None
    f = p - threshold
    for i in range(f.size - 1):
        if f[i] == 0:
            transition = float(interior[i])
            break
        if f[i] * f[i + 1] < 0:
            t = f[i] / (f[i] - f[i + 1])
            transition = float(math.exp(math.log(interior[i]) + t * (math.log(interior[i + 1]) - math.log(interior[i]))))
            break
    return ScalingResult(interior, p, transition)


def _bisect(g: Callable[[float], float], lo: float, hi: float, g_lo: float, rtol: float):
    while hi - lo > rtol * lo:
        mid = math.sqrt(lo * hi)
        g_mid = g(mid)
        if g_mid == 0:
            return mid
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


def quantum_thermal_crossover(energy_quantum: Callable[[float], float],
                              energy_thermal: Callable[[float], float],
                              bracket_nm: tuple[float, float], rtol: float = 1e-3) -> CrossoverResult:
    """Separation (nm) where |E_qm| = |E_T|, by geometric bisection.

    Both callables take D in nm.  No root is invented when |E_qm| - |E_T| keeps
    its sign over the bracket.
    """
    lo, hi = map(float, bracket_nm)
    if not 0 < lo < hi:
        raise ValueError("bracket must satisfy 0 < D_lo < D_hi")

    def g(dnm):
        return abs(energy_quantum(dnm)) - abs(energy_thermal(dnm))

    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0:
        return CrossoverResult(lo, (lo, hi), 0.0)
    if g_hi == 0:
        return CrossoverResult(hi, (lo, hi), 0.0)
    if (g_lo > 0) == (g_hi > 0):
        side = "quantum" if g_lo > 0 else "thermal"
        return CrossoverResult(None, (lo, hi), None,
                               f"no crossover in [{lo:g}, {hi:g}] nm: {side} term dominates throughout")
    root = _bisect(g, lo, hi, g_lo, rtol)
    et = abs(energy_thermal(root))
    residual = g(root) / et if et > 0 else None
    return CrossoverResult(root, (lo, hi), residual)


def torque_phase_flip(torque: Callable[[float], float], separations_nm: Sequence[float],
                      rtol: float = 1e-3, values: Sequence[float] | None = None) -> float | None:
    """Smallest D (nm) where the torque at a fixed probe angle changes sign.

    ``torque`` maps D in nm to the torque; ``values`` may supply precomputed
    samples on ``separations_nm``.  Returns None without a sign change,
    including for an identically zero torque.
    """
    d = np.asarray(separations_nm, dtype=float)
    t = np.asarray(values, dtype=float) if values is not None else np.array([torque(x) for x in d])
    if not np.any(t):
        return None
    for i in range(d.size - 1):
        if t[i] == 0:
            return float(d[i])
        if t[i] * t[i + 1] < 0:
            return _bisect(torque, float(d[i]), float(d[i + 1]), float(t[i]), rtol)
    if d.size and t[-1] == 0:
        return float(d[-1])
    return None


def fit_sin2phi(phi: Sequence[float], torque: Sequence[float]) -> tuple[float, float]:
    """Least-squares amplitude A of T ~ A sin(2 phi) and RMS(T - A sin 2phi) / RMS(T)."""
    phi = np.asarray(phi, dtype=float)
    t = np.asarray(torque, dtype=float)
    if phi.shape != t.shape or phi.size == 0:
        raise ValueError("phi and torque must be non-empty and of equal length")
    if not np.any(t):
        return 0.0, 0.0
    basis = np.sin(2.0 * phi)
    norm = float(basis @ basis)
    if norm == 0:
        raise ValueError("phi samples give sin(2 phi) = 0 everywhere")
    amplitude = float(basis @ t) / norm
    resid = t - amplitude * basis
    return amplitude, float(np.sqrt(np.mean(resid**2)) / np.sqrt(np.mean(t**2)))
