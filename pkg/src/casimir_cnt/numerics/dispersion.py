"""Transform of sampled Re sigma(omega) to the imaginary frequency axis."""

from __future__ import annotations

import math
import warnings

import numpy as np


class CoverageWarning(UserWarning):
    """The sampled spectrum does not reach the requested imaginary frequency."""


def _linear_product_integral(omega: np.ndarray, f: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Exact int of the piecewise-linear interpolant of f times xi/(w^2+xi^2)."""
    a = omega[:-1][None, :]
    b = omega[1:][None, :]
    fa = f[:-1][None, :]
    slope = (np.diff(f) / np.diff(omega))[None, :]
    x = xi[:, None]
    # atan(b/x) - atan(a/x) and log((b^2+x^2)/(a^2+x^2)) without cancellation
    angle = np.arctan2((b - a) * x, x * x + a * b)
    logs = np.log1p((b - a) * (b + a) / (a * a + x * x))
    seg = (fa - slope * a) * angle + 0.5 * slope * x * logs
    return seg.sum(axis=1)


def _tail(omega_max: float, f_max: float, xi: np.ndarray) -> np.ndarray:
    # f ~ f_max (omega_max/omega)^2 beyond the grid:
    # int = f_max (1 - atan(y)/y) / y,  y = xi / omega_max
    y = xi / omega_max
    small = y < 1e-3
    ys = np.where(small, 1.0, y)
    exact = (1.0 - np.arctan(ys) / ys) / ys
    series = y / 3.0 - y**3 / 5.0 + y**5 / 7.0
    return f_max * np.where(small, series, exact)


def kk_to_imaginary_axis(omega, re_sigma, xi, tail="inverse_square", richardson=True):
    """sigma(i xi) = (2/pi) int_0^inf Re sigma(w) xi / (w^2 + xi^2) dw.

    ``omega`` is a strictly increasing grid (rad/s, or any unit shared with
    ``xi``) and ``re_sigma`` holds nonnegative samples on it.  Between samples
    the data are interpolated linearly and integrated exactly against the
    kernel; with ``richardson`` the result is extrapolated from the full grid
    and its every-other-point subgrid, cancelling the O(h^2) interpolation
    error.  Beyond the last sample a ``w^-2`` tail is assumed unless
    ``tail="none"``.  At xi = 0 the transform returns Re sigma(0).
    """
    omega = np.asarray(omega, dtype=float)
    f = np.asarray(re_sigma, dtype=float)
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if omega.ndim != 1 or omega.shape != f.shape or omega.size < 2:
        raise ValueError("omega and re_sigma must be matching 1-D arrays with >= 2 samples")
    if np.any(np.diff(omega) <= 0) or omega[0] < 0:
        raise ValueError("omega grid must be nonnegative and strictly increasing")
    if np.any(f < 0):
        raise ValueError("Re sigma samples must be nonnegative")
    if np.any(xi_arr < 0):
        raise ValueError("imaginary frequency must be >= 0")
    if tail not in ("inverse_square", "none"):
        raise ValueError(f"unknown tail model {tail!r}")
    if np.any(xi_arr > omega[-1]):
        warnings.warn("imaginary frequency beyond the sampled spectrum; result relies on "
                      "the tail model", CoverageWarning, stacklevel=2)

    out = np.empty_like(xi_arr)
    zero = xi_arr == 0.0
    if np.any(zero):
        out[zero] = f[0] if omega[0] == 0.0 else 0.0
    pos = ~zero
    if np.any(pos):
        x = xi_arr[pos]
        fine = _linear_product_integral(omega, f, x)
        if richardson and omega.size >= 5 and omega.size % 2 == 1:
            coarse = _linear_product_integral(omega[::2], f[::2], x)
            fine = (4.0 * fine - coarse) / 3.0
        if tail == "inverse_square":
            fine = fine + _tail(omega[-1], f[-1], x)
        out[pos] = 2.0 / math.pi * fine
    return float(out[0]) if np.ndim(xi) == 0 else out
