"""Special functions, quadrature, summation and differentiation primitives."""

from .bessel import bessel_I0, bessel_I1, bessel_K0, bessel_K1
from .differentiation import central_derivative
from .dispersion import CoverageWarning, kk_to_imaginary_axis
from .quadrature import (
    ConvergenceError,
    QuadratureSpec,
    azimuthal_rule,
    gauss_legendre_panels,
    integrate_interval,
    integrate_polar_2d,
    integrate_semi_infinite,
)
from .summation import MatsubaraSpec, SumResult, matsubara_sum

__all__ = [
    "bessel_I0", "bessel_I1", "bessel_K0", "bessel_K1",
    "central_derivative",
    "CoverageWarning", "kk_to_imaginary_axis",
    "ConvergenceError", "QuadratureSpec", "azimuthal_rule", "gauss_legendre_panels",
    "integrate_interval", "integrate_polar_2d", "integrate_semi_infinite",
    "MatsubaraSpec", "SumResult", "matsubara_sum",
]
