"""Modified Bessel functions I0, I1, K0, K1 for real nonnegative arguments.

Power series cover small arguments; I_n switches to its asymptotic expansion
above ``_I_ASYMPTOTIC`` and K_n uses a trapezoidal rule on the integral
representation ``exp(x) K_n(x) = int_0^inf exp(-x (cosh t - 1)) cosh(n t) dt``
above ``_K_SERIES_MAX``. Target accuracy is 1e-10 relative.
"""

from __future__ import annotations

import math

import numpy as np

from ..constants import EULER_GAMMA

_I_ASYMPTOTIC = 30.0
_K_SERIES_MAX = 2.0
_I0_OVERFLOW = 713.9  # I0(x) > float max beyond this point
_SERIES_TERMS = 80
_ASYMPTOTIC_TERMS = 18
_K_TRAPEZOID_STEPS = 40


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("Bessel argument must be finite")
    return arr


def _restore(x, out):
    return float(out) if np.ndim(x) == 0 else out


def _i_series(x: np.ndarray, order: int) -> np.ndarray:
    # sum_k (x/2)^(2k+order) / (k! (k+order)!); all terms positive
    half = 0.5 * x
    q = half * half
    term = half**order / math.factorial(order)
    total = term.copy()
    for k in range(1, _SERIES_TERMS):
        term = term * q / (k * (k + order))
        total = total + term
        if np.all(term <= 1e-17 * total):
            break
    return total


def _i_asymptotic(x: np.ndarray, order: int) -> np.ndarray:
    mu = 4.0 * order * order
    term = np.ones_like(x)
    total = term.copy()
    for k in range(1, _ASYMPTOTIC_TERMS):
        term = -term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        total = total + term
    return np.exp(x) / np.sqrt(2.0 * math.pi * x) * total


def _bessel_i(x, order: int):
    arr = _as_array(x)
    if np.any(arr < 0.0):
        raise ValueError("bessel I requires x >= 0")
    if np.any(arr > _I0_OVERFLOW):
        raise OverflowError(f"I{order}(x) overflows for x > {_I0_OVERFLOW}")
    out = np.empty_like(arr)
    small = arr <= _I_ASYMPTOTIC
    if np.any(small):
        out[small] = _i_series(arr[small], order)
    if np.any(~small):
        out[~small] = _i_asymptotic(arr[~small], order)
    return _restore(x, out)


def bessel_I0(x):
    """Modified Bessel function of the first kind, order zero."""
    return _bessel_i(x, 0)


def bessel_I1(x):
    """Modified Bessel function of the first kind, order one."""
    return _bessel_i(x, 1)


def _k_scaled_trapezoid(x: np.ndarray, order: int) -> np.ndarray:
    """exp(x) K_n(x) for x > 2 via the trapezoidal rule on an analytic integrand.

    The cutoff ``t_max`` drops the integrand below 1e-18 and the step
    ``t_max / 40`` stays under ``0.125 min(1, 2/sqrt(x))``, which keeps the
    strip of analyticity wide in units of the step for every x > 2.
    """
    t_max = np.arccosh(1.0 + 42.0 / x)
    h = t_max / _K_TRAPEZOID_STEPS
    t = h[..., None] * np.arange(_K_TRAPEZOID_STEPS + 1)
    f = np.exp(-x[..., None] * (np.cosh(t) - 1.0))
    if order:
        f = f * np.cosh(order * t)
    return h * (f.sum(axis=-1) - 0.5 * f[..., 0])


def _k0_series(x: np.ndarray) -> np.ndarray:
    q = 0.25 * x * x
    term = np.ones_like(x)
    harmonic = 0.0
    acc = np.zeros_like(x)
    for k in range(1, 40):
        term = term * q / (k * k)
        harmonic += 1.0 / k
        acc = acc + term * harmonic
        if np.all(term * harmonic <= 1e-18 * np.abs(acc) + 1e-300):
            break
    return -(np.log(0.5 * x) + EULER_GAMMA) * _i_series(x, 0) + acc


def _k1_series(x: np.ndarray) -> np.ndarray:
    q = 0.25 * x * x
    # digamma(k+1) + digamma(k+2) with digamma(1) = -gamma
    psi_a = -EULER_GAMMA
    psi_b = 1.0 - EULER_GAMMA
    term = np.ones_like(x)
    acc = term * (psi_a + psi_b)
    for k in range(1, 40):
        term = term * q / (k * (k + 1))
        psi_a += 1.0 / k
        psi_b += 1.0 / (k + 1)
        acc = acc + term * (psi_a + psi_b)
        if np.all(np.abs(term) <= 1e-18):
            break
    return 1.0 / x + np.log(0.5 * x) * _i_series(x, 1) - 0.25 * x * acc


def _bessel_k(x, order: int):
    arr = _as_array(x)
    if np.any(arr <= 0.0):
        raise ValueError(f"K{order}(x) is defined for x > 0 only")
    out = np.empty_like(arr)
    small = arr <= _K_SERIES_MAX
    if np.any(small):
        out[small] = _k0_series(arr[small]) if order == 0 else _k1_series(arr[small])
    if np.any(~small):
        big = arr[~small]
        out[~small] = _k_scaled_trapezoid(big, order) * np.exp(-big)
    return _restore(x, out)


def bessel_K0(x):
    """Modified Bessel function of the second kind, order zero (x > 0)."""
    return _bessel_k(x, 0)


def bessel_K1(x):
    """Modified Bessel function of the second kind, order one (x > 0)."""
    return _bessel_k(x, 1)
