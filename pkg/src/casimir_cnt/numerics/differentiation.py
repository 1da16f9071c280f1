"""Finite-difference derivatives."""

from __future__ import annotations


def central_derivative(f, x: float, h: float):
    """Five-point central difference of ``f`` at ``x``.

    Returns ``(derivative, error_estimate)``.  The estimate is the distance to
    the three-point stencil, a conservative bound on the O(h^4) truncation
    error of the five-point value.
    """
    if not h > 0:
        raise ValueError("step must be > 0")
    fm2, fm1, fp1, fp2 = f(x - 2 * h), f(x - h), f(x + h), f(x + 2 * h)
    d5 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h)
    d3 = (fp1 - fm1) / (2.0 * h)
    return d5, abs(d5 - d3)
