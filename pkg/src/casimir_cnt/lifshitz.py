"""Lifshitz energy and torque between two parallel anisotropic conducting sheets.

Frame conventions
-----------------
For an in-plane wave vector k at azimuth theta, each sheet's conductivity is
expressed in the frame whose first axis is along k.  A sheet whose tubes are
rotated by ``alpha`` then looks like the unrotated sheet rotated by
``psi = theta + alpha``, and its tube-axis wavenumber is ``k |sin psi|``.  The
reflection matrix below (first index: the TE-like component transverse to k,
second: the TM-like component along k) is written in that frame, with
``lam = sqrt(k^2 + kappa^2) / kappa`` and reduced conductivities
``s = 2 pi sigma / c``:

    delta = 1 + s_xx lam + s_yy / lam + det s
    R = [[-(s_yy / lam + det s), -s_yx], [s_xy, s_xx lam + det s]] / delta

Sheet 0 has ``alpha = 0`` and sheet 1 ``alpha = phi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .constants import C, HBAR, KB, NM, ZETA3, casimir_ideal_energy, thermal_energy_closed_form
from .film import ConductivityTensor
from .numerics import (
    MatsubaraSpec,
    QuadratureSpec,
    azimuthal_rule,
    integrate_semi_infinite,
    matsubara_sum,
)

Mode = Literal["matsubara", "quantum", "thermal"]
MODES = ("matsubara", "quantum", "thermal")
FRAMES = ("k_aligned", "fixed")


class FresnelError(ArithmeticError):
    """Singular reflection denominator or Lifshitz determinant."""


# ------------------------------------------------------------- reflection

@dataclass(frozen=True)
class ReflectionMatrix:
    xx: object
    xy: object
    yx: object
    yy: object
    delta: object = 1.0
    lam: object = math.inf

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.xx, self.xy], [self.yx, self.yy]])


def _reflection(sxx, syy, sxy, syx, lam):
    det = sxx * syy - sxy * syx
    delta = 1.0 + sxx * lam + syy / lam + det
    if np.any(delta == 0):
        raise FresnelError("reflection denominator delta vanished")
    return (-(syy / lam + det) / delta, -syx / delta, sxy / delta,
            (sxx * lam + det) / delta, delta, det)


def _reflection_derivative(sxx, syy, sxy, dsxx, dsyy, dsxy, lam, delta, det):
    """d R / d psi for a symmetric tensor (s_xy = s_yx) with entry derivatives ds."""
    ddet = dsxx * syy + sxx * dsyy - 2.0 * sxy * dsxy
    ddelta = dsxx * lam + dsyy / lam + ddet
    n_xx = -(syy / lam + det)
    n_yy = sxx * lam + det
    inv = 1.0 / delta
    q = ddelta * inv * inv
    return (-(dsyy / lam + ddet) * inv - n_xx * q,
            -dsxy * inv + sxy * q,
            dsxy * inv - sxy * q,
            (dsxx * lam + ddet) * inv - n_yy * q)


def _lambda(kappa, k):
    kappa = np.asarray(kappa, dtype=float)
    if np.any(kappa <= 0):
        raise ValueError("fresnel_matrix needs kappa > 0; use fresnel_n0_limit at n = 0")
    return np.sqrt(1.0 + (np.asarray(k, dtype=float) / kappa) ** 2)


def fresnel_matrix(sigma: ConductivityTensor, kappa, k) -> ReflectionMatrix:
    """Reflection matrix of a sheet whose tensor is given in the k-aligned frame.

    ``sigma`` holds reduced conductivities evaluated at xi = c kappa; ``k`` is
    the in-plane wavenumber magnitude.
    """
    lam = _lambda(kappa, k)
    rxx, rxy, ryx, ryy, delta, _ = _reflection(sigma.xx, sigma.yy, sigma.xy, sigma.yx, lam)
    return ReflectionMatrix(rxx, rxy, ryx, ryy, delta, lam)


def fresnel_n0_limit(phi: float = 0.0) -> ReflectionMatrix:
    """Zero-frequency reflection matrix diag(0, 1), independent of orientation."""
    return ReflectionMatrix(0.0, 0.0, 0.0, 1.0)


def rotated_tensor_derivative(a, b, db_dpsi, psi):
    """(sigma^psi, d sigma^psi / d psi) for diag(a, b) where b may depend on psi."""
    c, s = np.cos(psi), np.sin(psi)
    sxx = a * c * c + b * s * s
    syy = a * s * s + b * c * c
    sxy = (b - a) * s * c
    dsxx = 2.0 * (b - a) * s * c + db_dpsi * s * s
    dsyy = -2.0 * (b - a) * s * c + db_dpsi * c * c
    dsxy = (b - a) * (c * c - s * s) + db_dpsi * s * c
    return (sxx, syy, sxy), (dsxx, dsyy, dsxy)


def reflection_derivative(sigma: ConductivityTensor, dsigma: ConductivityTensor, kappa, k):
    """d R / d phi given the rotated tensor and its phi-derivative (symmetric tensors)."""
    lam = _lambda(kappa, k)
    _, _, _, _, delta, det = _reflection(sigma.xx, sigma.yy, sigma.xy, sigma.yx, lam)
    d = _reflection_derivative(sigma.xx, sigma.yy, sigma.xy, dsigma.xx, dsigma.yy, dsigma.xy,
                               lam, delta, det)
    return np.array([[d[0], d[1]], [d[2], d[3]]])


def energy_integrand(separation, kappa, k, r0: ReflectionMatrix, r1: ReflectionMatrix):
    """ln det(1 - exp(-2 D q) R0 R1), q = sqrt(kappa^2 + k^2)."""
    q = np.sqrt(np.asarray(kappa, dtype=float) ** 2 + np.asarray(k, dtype=float) ** 2)
    e = np.exp(-2.0 * separation * q)
    return _log_det(e, r0.xx, r0.xy, r0.yx, r0.yy, r1.xx, r1.xy, r1.yx, r1.yy)


def _product(a, b):
    axx, axy, ayx, ayy = a
    bxx, bxy, byx, byy = b
    return (axx * bxx + axy * byx, axx * bxy + axy * byy,
            ayx * bxx + ayy * byx, ayx * bxy + ayy * byy)


def _log_det(e, *entries):
    mxx, mxy, myx, myy = _product(entries[:4], entries[4:])
    arg = -e * (mxx + myy) + e * e * (mxx * myy - mxy * myx)
    if np.any(arg <= -1.0):
        raise FresnelError("Lifshitz determinant is not positive")
    return np.log1p(arg)


def torque_integrand(separation, kappa, k, r0: ReflectionMatrix, r1: ReflectionMatrix, dr1):
    """e tr[(1 - e R0 R1)^{-1} R0 dR1/dphi] with e = exp(-2 D q) (its k-integral is -dE/dphi)."""
    q = np.sqrt(np.asarray(kappa, dtype=float) ** 2 + np.asarray(k, dtype=float) ** 2)
    e = np.exp(-2.0 * separation * q)
    a = (r0.xx, r0.xy, r0.yx, r0.yy)
    b = (r1.xx, r1.xy, r1.yx, r1.yy)
    db = (dr1[0][0], dr1[0][1], dr1[1][0], dr1[1][1])
    return _torque_trace(e, a, b, db)


def _torque_trace(e, a, b, db):
    mxx, mxy, myx, myy = _product(a, b)
    nxx, nxy, nyx, nyy = _product(a, db)
    bxx, bxy, byx, byy = 1.0 - e * mxx, -e * mxy, -e * myx, 1.0 - e * myy
    det = bxx * byy - bxy * byx
    return e * (byy * nxx - bxy * nyx - byx * nxy + bxx * nyy) / det


# ------------------------------------------------------------------ sheets

class ConstantSheet:
    """Frequency- and wavevector-independent diagonal reduced conductivity.

    ``ConstantSheet(1e6, 1e6)`` is a perfect-conductor surrogate.
    """

    def __init__(self, sxx: float, syy: float):
        self.sxx = float(sxx)
        self.syy = float(syy)

    def principal(self, xi, k_axis, temperature=0.0):
        shape = np.broadcast(np.asarray(xi), np.asarray(k_axis)).shape
        return (np.full(np.shape(xi), self.sxx), np.full(shape, self.syy), np.zeros(shape))


# ------------------------------------------------------------------ points

@dataclass(frozen=True)
class CasimirPoint:
    separation_nm: float
    phi: float = 0.0
    temperature: float = 0.0
    mode: Mode = "quantum"

    def __post_init__(self):
        if not self.separation_nm > 0:
            raise ValueError("separation must be > 0")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.mode in ("matsubara", "thermal") and self.temperature <= 0:
            raise ValueError(f"{self.mode} mode needs T > 0")

    @property
    def separation(self) -> float:
        return self.separation_nm * NM


@dataclass
class CasimirResult:
    point: CasimirPoint
    energy: float | None = None
    torque: float | None = None
    n_terms: int = 0
    extras: dict = field(default_factory=dict)

    @property
    def energy_ideal(self) -> float:
        return casimir_ideal_energy(self.point.separation)

    @property
    def energy_thermal(self) -> float:
        return thermal_energy_closed_form(self.point.separation, self.point.temperature)

    @property
    def energy_normalized(self):
        return None if self.energy is None else self.energy / self.energy_ideal

    @property
    def torque_normalized(self):
        return None if self.torque is None else self.torque / self.energy_ideal


# ------------------------------------------------------------------ solver

def thermal_n0_energy(separation, temperature, spec: QuadratureSpec | None = None):
    """Half the n = 0 Matsubara term with R = diag(0, 1) on both sheets.

    Evaluated by quadrature of the Lifshitz integrand (the closed form
    -zeta(3) k_B T / (16 pi D^2) serves as its check).
    """
    spec = spec or QuadratureSpec(relative_tolerance=1e-11, semi_infinite_scale=1.0)

    def radial(x):
        # x = 2 D k; (1/4 pi^2) int k dk 2 pi ln(1 - e^{-2Dk}) = (1/(8 pi D^2)) int x ln(1-e^-x) dx
        with np.errstate(over="ignore"):
            return x * np.log1p(-np.exp(-np.maximum(x, 1e-300)))

    integral = integrate_semi_infinite(radial, spec, vectorized=True)
    return 0.5 * KB * temperature * integral / (8.0 * math.pi * separation**2)


class LifshitzSolver:
    """Energy and torque per unit area between two sheets.

    ``sheet1`` defaults to ``sheet0`` (identical films); it is rotated by phi.
    Sheets only need a ``principal(xi, k_axis, temperature)`` method returning
    reduced (sigma_xx, sigma_yy, d sigma_yy / d k_axis).
    """

    def __init__(self, sheet0, sheet1=None, quadrature: QuadratureSpec | None = None,
                 angular_order: int = 8, tail_tolerance: float = 1e-8,
                 stop_window: float = 20.0, n0_branch: str = "closed_form",
                 frame: str = "k_aligned", angular_grading: int = 3, angular_ratio: float = 0.1):
        if n0_branch not in ("closed_form", "numeric"):
            raise ValueError("n0_branch must be 'closed_form' or 'numeric'")
        if frame not in FRAMES:
            raise ValueError(f"frame must be one of {FRAMES}")
        self.frame = frame
        self.angular_grading = angular_grading
        self.angular_ratio = angular_ratio
        self.sheet0 = sheet0
        self.sheet1 = sheet1 if sheet1 is not None else sheet0
        self.quadrature = quadrature or QuadratureSpec()
        self.angular_order = angular_order
        self.tail_tolerance = tail_tolerance
        self.stop_window = stop_window
        self.n0_branch = n0_branch

    # -- building blocks ----------------------------------------------------
    def _sheet_entries(self, sheet, xi, k, theta, alpha, temperature, derivative):
        """Tensor entries (xx, yy, xy) of a sheet rotated by alpha, and d/d alpha."""
        if self.frame == "k_aligned":
            psi = theta + alpha
            axis = psi
            sign = 1.0
        else:
            psi = -alpha + 0.0 * theta
            axis = theta - alpha
            sign = -1.0
        sa = np.sin(axis)
        k_axis = k * np.abs(sa)
        a, b, db = sheet.principal(xi, k_axis, temperature)
        if not derivative:
            c, s = np.cos(psi), np.sin(psi)
            return (a * c * c + b * s * s, a * s * s + b * c * c, (b - a) * s * c), None
        # d b / d psi along the path psi(alpha); dpsi/dalpha = sign
        db_dpsi = db * k * np.sign(sa) * np.cos(axis)
        ent, der = rotated_tensor_derivative(a, b, db_dpsi, psi)
        return ent, tuple(sign * d for d in der)

    def _angular_sum(self, separation, phi, kappa, x, temperature, want_torque):
        """theta-integrated energy (and torque) integrands, shape (m, B[, 2])."""
        kinks = (0.0, -phi) if self.frame == "k_aligned" else (0.0, phi)
        theta, w = azimuthal_rule(kinks, self.angular_order, half_period=True,
                                  grading=self.angular_grading, ratio=self.angular_ratio)
        kap = kappa[None, :, None]
        xs = x[:, None, None]
        shift = xs / (2.0 * separation)
        q = kap + shift
        k = np.sqrt(shift * (2.0 * kap + shift))
        lam = q / kap
        e = np.exp(-2.0 * separation * q)
        xi = C * kap
        th = theta[None, None, :]

        s0, _ = self._sheet_entries(self.sheet0, xi, k, th, 0.0, temperature, False)
        s1, ds1 = self._sheet_entries(self.sheet1, xi, k, th, phi, temperature, want_torque)
        r0 = _reflection(s0[0], s0[1], s0[2], s0[2], lam)
        r1 = _reflection(s1[0], s1[1], s1[2], s1[2], lam)
        energy = _log_det(e, *r0[:4], *r1[:4]) @ w
        if not want_torque:
            return energy
        dr1 = _reflection_derivative(s1[0], s1[1], s1[2], ds1[0], ds1[1], ds1[2],
                                     lam, r1[4], r1[5])
        torque = _torque_trace(e, r0[:4], r1[:4], dr1) @ w
        return np.stack([energy, torque], axis=-1)

    def k_integral(self, separation, phi, kappa, temperature=0.0, want_torque=True):
        """(1/4 pi^2) int d^2k of the energy [and torque] integrands for each kappa > 0.

        Returns shape (B,) or (B, 2).
        """
        kappa = np.atleast_1d(np.asarray(kappa, dtype=float))
        if np.any(kappa <= 0):
            raise ValueError("k_integral needs kappa > 0")
        b = kappa.size
        spec = QuadratureSpec(
            relative_tolerance=self.quadrature.relative_tolerance,
            absolute_floor=self.quadrature.absolute_floor,
            max_subdivisions=self.quadrature.max_subdivisions,
            semi_infinite_scale=1.0,
            initial_panels=self.quadrature.initial_panels,
        )

        def f(x):
            vals = self._angular_sum(separation, phi, kappa, x, temperature, want_torque)
            q = kappa[None, :] + x[:, None] / (2.0 * separation)
            if want_torque:
                vals = vals * q[..., None]
            else:
                vals = vals * q
            return vals.reshape(x.size, -1)

        target = _torque_floor(self.quadrature.relative_tolerance) if want_torque else None
        out = integrate_semi_infinite(f, spec, vectorized=True, target=target)
        out = np.asarray(out).reshape(b, 2 if want_torque else 1) / (8.0 * math.pi**2 * separation)
        return out if want_torque else out[:, 0]

    # -- modes --------------------------------------------------------------
    def evaluate(self, point: CasimirPoint, want_torque: bool = True) -> CasimirResult:
        d = point.separation
        if point.mode == "thermal":
            energy = self.n0_energy(d, point.phi, point.temperature)
            return CasimirResult(point, energy, 0.0 if want_torque else None, n_terms=1)
        if point.mode == "quantum":
            return self._quantum(point, want_torque)
        return self._matsubara(point, want_torque)

    def energy(self, point: CasimirPoint) -> float:
        return self.evaluate(point, want_torque=False).energy

    def torque(self, point: CasimirPoint) -> float:
        return self.evaluate(point).torque

    def n0_energy(self, separation, phi, temperature):
        if self.n0_branch == "closed_form":
            return thermal_n0_energy(separation, temperature)
        return 0.5 * KB * temperature * self.n0_limit(separation, phi)["extrapolated"]

    def n0_limit(self, separation, phi, temperature=0.0, decades=(3, 4, 5, 6)):
        """Numerical kappa -> 0 limit of the n = 0 k-integral versus the diag(0,1) branch.

        Evaluates the k-integral at kappa = 10^-j / D and extrapolates linearly
        in kappa from the two smallest values.
        """
        kappas = np.array([10.0 ** (-j) / separation for j in decades])
        vals = self.k_integral(separation, phi, kappas, temperature, want_torque=False)
        k1, k2 = kappas[-2], kappas[-1]
        v1, v2 = vals[-2], vals[-1]
        extrapolated = v2 - (v1 - v2) * k2 / (k1 - k2)
        closed = -ZETA3 / (8.0 * math.pi * separation**2)
        return {
            "kappa": kappas,
            "values": vals,
            "extrapolated": extrapolated,
            "closed_form": closed,
            "relative_discrepancy": extrapolated / closed - 1.0,
        }

    def _quantum(self, point: CasimirPoint, want_torque: bool) -> CasimirResult:
        d = point.separation
        spec = QuadratureSpec(
            relative_tolerance=self.quadrature.relative_tolerance,
            absolute_floor=self.quadrature.absolute_floor,
            max_subdivisions=self.quadrature.max_subdivisions,
            semi_infinite_scale=1.0 / (2.0 * d),
            initial_panels=self.quadrature.initial_panels,
        )

        def f(kappa):
            vals = self.k_integral(d, point.phi, kappa, 0.0, want_torque)
            return vals if want_torque else vals.reshape(-1, 1)

        target = _torque_floor(self.quadrature.relative_tolerance) if want_torque else None
        out = np.atleast_1d(integrate_semi_infinite(f, spec, vectorized=True, target=target))
        out = HBAR * C / (2.0 * math.pi) * out
        return CasimirResult(point, float(out[0]), float(out[1]) if want_torque else None)

    def _matsubara(self, point: CasimirPoint, want_torque: bool) -> CasimirResult:
        d, t = point.separation, point.temperature
        ms = MatsubaraSpec(t, tail_tolerance=self.tail_tolerance)
        kappa1 = float(ms.kappa(1))
        n0 = self.n0_energy(d, point.phi, t) * 2.0 / (KB * t)  # full n = 0 k-integral
        ncols = 2 if want_torque else 1

        def term(ns):
            out = np.zeros((ns.size, ncols))
            pos = ns > 0
            if np.any(pos):
                vals = self.k_integral(d, point.phi, ms.kappa(ns[pos]), t, want_torque)
                out[pos] = np.asarray(vals).reshape(-1, ncols)
            if ns[0] == 0:
                out[0, 0] = n0
            return out

        min_index = int(math.ceil(self.stop_window / (kappa1 * d)))
        res = matsubara_sum(term, ms, vectorized=True, min_index=min_index, full_output=True)
        value = np.atleast_1d(res.value)
        return CasimirResult(point, float(value[0]), float(value[1]) if want_torque else None,
                             n_terms=res.n_terms)


def _torque_floor(rtol):
    """Error allowance for torque components: rtol times the paired energy value."""

    def target(total):
        total = np.asarray(total).reshape(-1, 2)
        floor = np.zeros_like(total)
        floor[:, 1] = rtol * np.abs(total[:, 0])
        return floor.ravel()

    return target
