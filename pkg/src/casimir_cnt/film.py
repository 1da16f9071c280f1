"""In-plane conductivity tensor of a dilute aligned-SWCN film.

Tubes lie along y.  All tensor entries are reduced conductivities
2 pi sigma / c; on the imaginary axis they are real.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .constants import ALPHA, C, E_CHARGE, EPS0, M_E, NM
from .numerics import bessel_I0, bessel_I1, bessel_K0, bessel_K1
from .swcnt import (
    Chirality,
    ElectronicParams,
    InterbandModel,
    InterbandResponse,
    sigma_intra,
    sigma_intra_dk,
    sigma_intra_real,
    thermal_intra_factor,
    thermal_intra_factor_dk,
)

SIGMA0 = ALPHA * C / 4.0  # Gaussian sigma0 = alpha c / 4 in m/s
DILUTE_FACTOR = 5.0


class DiluteRegimeWarning(UserWarning):
    """Intertube spacing too small for the dilute-film response model."""


class ConventionError(ArithmeticError):
    """The collective interband term has a pole on the positive imaginary axis."""


@dataclass(frozen=True)
class FilmSpec:
    """Geometry, environment and electronic parameters of one film (SI units)."""

    chirality: Chirality = Chirality(12, 0)
    spacing: float | None = None  # Delta, m; default 10 R
    thickness: float | None = None  # d, m; default 2 R
    eps_b: float = 2.0
    eps_s: float = 1.0
    electronic: ElectronicParams = field(default_factory=ElectronicParams)
    interband: InterbandModel = field(default_factory=InterbandModel)
    collective_convention: str = "passive"
    thermal_convention: str = "fermi"

    def __post_init__(self):
        radius = self.chirality.radius
        if self.spacing is None:
            object.__setattr__(self, "spacing", 10.0 * radius)
        if self.thickness is None:
            object.__setattr__(self, "thickness", 2.0 * radius)
        if not self.spacing > 0 or not self.thickness > 0:
            raise ValueError("spacing and thickness must be > 0")
        if not self.eps_b > 0 or not self.eps_s > 0:
            raise ValueError("permittivities must be > 0")
        if not 0.0 < self.volume_fraction < 1.0:
            raise ValueError(f"volume fraction {self.volume_fraction:.3g} outside (0, 1)")
        if self.collective_convention not in ("passive", "literal"):
            raise ValueError("collective_convention must be 'passive' or 'literal'")
        if not self.is_dilute:
            warnings.warn(
                f"Delta - 2R = {(self.spacing - 2 * radius) / NM:.3g} nm is below "
                f"{DILUTE_FACTOR:g} eps_b d / (2 eps_s) = {self.dilute_threshold / NM:.3g} nm; "
                "the dilute-film model may not apply",
                DiluteRegimeWarning,
                stacklevel=3,
            )

    @classmethod
    def from_units(cls, chirality=(12, 0), delta_over_R=10.0, thickness_over_R=2.0, **kwargs):
        ch = chirality if isinstance(chirality, Chirality) else Chirality(*chirality)
        r = ch.radius
        return cls(chirality=ch, spacing=delta_over_R * r, thickness=thickness_over_R * r, **kwargs)

    @property
    def radius(self) -> float:
        return self.chirality.radius

    @property
    def volume_fraction(self) -> float:
        return math.pi * self.radius**2 / (self.spacing * self.thickness)

    @property
    def dilute_threshold(self) -> float:
        return DILUTE_FACTOR * self.eps_b * self.thickness / (2.0 * self.eps_s)

    @property
    def is_dilute(self) -> bool:
        return self.spacing - 2.0 * self.radius >= self.dilute_threshold

    def with_spacing(self, delta_over_R: float) -> "FilmSpec":
        return replace(self, spacing=delta_over_R * self.radius)


@dataclass(frozen=True)
class ConductivityTensor:
    xx: object
    yy: object
    xy: object = 0.0
    yx: object = 0.0
    k_y: object = None
    xi: object = None
    phi: float = 0.0

    @property
    def det(self):
        return self.xx * self.yy - self.xy * self.yx

    @property
    def trace(self):
        return self.xx + self.yy

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.xx, self.xy], [self.yx, self.yy]])


def rotate_tensor(t: ConductivityTensor, phi: float) -> ConductivityTensor:
    """sigma^phi = R^{-1} sigma R for a diagonal input, R the z-rotation by phi."""
    if np.any(np.asarray(t.xy) != 0) or np.any(np.asarray(t.yx) != 0):
        raise ValueError("rotate_tensor expects the unrotated (diagonal) tensor")
    c, s = np.cos(phi), np.sin(phi)
    a, b = t.xx, t.yy
    off = (b - a) * s * c
    return ConductivityTensor(a * c * c + b * s * s, a * s * s + b * c * c, off, off,
                              k_y=t.k_y, xi=t.xi, phi=t.phi + phi)


class CNTFilm:
    """Conductivity response of one film described by a FilmSpec."""

    def __init__(self, spec: FilmSpec, response: InterbandResponse | None = None):
        self.spec = spec
        self.interband = response or InterbandResponse(spec.chirality, spec.electronic, spec.interband)

    # collective coupling -----------------------------------------------
    def _screening(self, k):
        s = self.spec
        ebkd = s.eps_b * k * s.thickness
        return ebkd / (ebkd + 2.0 * s.eps_s)

    def _shape_function(self, k, derivative=False):
        """G(k) = 2 kR I0(kR) K0(kR) / (1 + 2 eps_s / (eps_b k d)) and dG/dk."""
        k = np.asarray(k, dtype=float)
        r = self.spec.radius
        x = k * r
        pos = x > 0
        xs = np.where(pos, x, 1.0)
        i0, k0 = bessel_I0(xs), bessel_K0(xs)
        p = np.where(pos, xs * i0 * k0, 0.0)
        h = self._screening(k)
        g = 2.0 * p * h
        if not derivative:
            return g
        dp = i0 * k0 + xs * (bessel_I1(xs) * k0 - i0 * bessel_K1(xs))
        s = self.spec
        dh = 2.0 * s.eps_s * s.eps_b * s.thickness / (s.eps_b * k * s.thickness + 2.0 * s.eps_s) ** 2
        dg = np.where(pos, 2.0 * (r * dp * h + p * dh), 0.0)
        return g, dg

    def plasma_frequency(self, k_y):
        """Nonlocal plasma frequency omega_p(k_y) in rad/s (0 at k_y = 0)."""
        s = self.spec
        ep = s.electronic
        pref = E_CHARGE**2 * ep.n_2d / (EPS0 * ep.m_eff * M_E * s.eps_b * s.thickness)
        return np.sqrt(pref * self._shape_function(k_y))

    def coupling_K(self, k_y):
        """K(k_y) = f_CN m* omega_p^2 d / (e^2 N_2D R), Gaussian e^2 (units 1/m)."""
        s = self.spec
        ep = s.electronic
        e2_gauss = E_CHARGE**2 / (4.0 * math.pi * EPS0)
        wp2 = self.plasma_frequency(k_y) ** 2
        return s.volume_fraction * ep.m_eff * M_E * wp2 * s.thickness / (e2_gauss * ep.n_2d * s.radius)

    def coupling_K_closed(self, k_y, derivative=False):
        """Same K via f_CN 4 pi G(k) / (eps_b R), where m* and N_2D cancel."""
        s = self.spec
        pref = s.volume_fraction * 4.0 * math.pi / (s.eps_b * s.radius)
        if derivative:
            g, dg = self._shape_function(k_y, derivative=True)
            return pref * g, pref * dg
        return pref * self._shape_function(k_y)

    # imaginary axis -----------------------------------------------------
    def sigma_xx(self, xi):
        """Reduced transverse conductivity d xi (eps_b - eps_s) / (2c)."""
        s = self.spec
        return s.thickness * np.asarray(xi, dtype=float) * (s.eps_b - s.eps_s) / (2.0 * C)

    def sigma_yy_parts(self, xi, k_y, temperature=0.0, derivative=False):
        """Intraband and collective-interband reduced contributions to sigma_yy.

        Returns ``(intra, collective)`` or, with ``derivative``, also their
        k_y-derivatives ``(intra, collective, d_intra, d_collective)``.
        """
        s = self.spec
        ch, ep = s.chirality, s.electronic
        xi = np.asarray(xi, dtype=float)
        k = np.asarray(k_y, dtype=float)
        frac = 2.0 * math.pi * s.radius / (s.eps_s * s.spacing)
        intra = frac * sigma_intra(xi, k, ch, ep)
        if derivative:
            d_intra = frac * sigma_intra_dk(xi, k, ch, ep)
        if temperature > 0:
            f = thermal_intra_factor(k, temperature, ep.mu, ep.v_fermi, s.thermal_convention)
            if derivative:
                df = thermal_intra_factor_dk(k, temperature, ep.mu, ep.v_fermi)
                d_intra = d_intra * f + intra * df
            intra = intra * f

        inter = self.interband.imag_axis(xi) * SIGMA0  # Gaussian, m/s
        if derivative:
            kk, dkk = self.coupling_K_closed(k, derivative=True)
        else:
            kk = self.coupling_K_closed(k)
        u = kk * inter
        pref = s.eps_b * s.thickness / C
        if s.collective_convention == "passive":
            with np.errstate(invalid="ignore", divide="ignore"):
                coll = np.where(u > 0, pref * xi * u / (xi + u), 0.0)
            if derivative:
                with np.errstate(invalid="ignore", divide="ignore"):
                    dcoll = np.where(u > 0, pref * xi * xi / (xi + u) ** 2 * inter * dkk, 0.0)
        else:
            denom = u - xi
            if np.any(denom == 0) or (np.any(denom > 0) and np.any(denom < 0)):
                raise ConventionError(
                    "literal i*omega -> -xi continuation of the collective term crosses a "
                    "pole (K sigma_inter = xi) on this grid; use collective_convention='passive'")
            coll = pref * (-xi) * u / denom
            if derivative:
                dcoll = pref * (-xi) * (-xi) / denom**2 * inter * dkk
        if derivative:
            return intra, coll, d_intra, dcoll
        return intra, coll

    def sigma_yy(self, xi, k_y, temperature=0.0):
        intra, coll = self.sigma_yy_parts(xi, k_y, temperature)
        return intra + coll

    def tensor(self, xi, k_y, temperature=0.0) -> ConductivityTensor:
        """Unrotated diagonal tensor at (k_y, i xi)."""
        xx = self.sigma_xx(xi)
        yy = self.sigma_yy(xi, k_y, temperature)
        return ConductivityTensor(xx, yy, 0.0 * xx, 0.0 * xx, k_y=k_y, xi=xi)

    def principal(self, xi, k_axis, temperature=0.0):
        """(sigma_xx, sigma_yy, d sigma_yy / d k_y) broadcast over the inputs."""
        intra, coll, di, dc = self.sigma_yy_parts(xi, k_axis, temperature, derivative=True)
        return self.sigma_xx(xi), intra + coll, di + dc

    # real axis ----------------------------------------------------------
    def sigma_yy_real(self, omega, k_y):
        """Complex reduced sigma_yy at real omega (rad/s), exp(-i omega t)."""
        s = self.spec
        omega = np.asarray(omega, dtype=float)
        frac = 2.0 * math.pi * s.radius / (s.eps_s * s.spacing)
        intra = frac * sigma_intra_real(omega, k_y, s.chirality, s.electronic)
        u = self.coupling_K_closed(k_y) * self.interband.real_axis(omega) * SIGMA0
        z = -1j * omega
        coll = s.eps_b * s.thickness / C * z * u / (z + u)
        return intra + coll

    def sigma_xx_real(self, omega):
        s = self.spec
        return -1j * np.asarray(omega, dtype=float) * s.thickness * (s.eps_b - s.eps_s) / (2.0 * C)
