"""Single-wall carbon nanotube geometry and surface conductivity.

Conductivities returned here are *reduced*: the dimensionless combination
2 pi sigma / c of the Gaussian surface conductivity sigma, unless a function
says it returns sigma / sigma0 with sigma0 = alpha c / 4.
"""

from __future__ import annotations

import csv
import functools
import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .constants import ALPHA, BOND_LENGTH, C, EV, HBAR, KB, NM, hbar_omega_to_rad
from .numerics import CoverageWarning, kk_to_imaginary_axis

SPIN_DEGENERACY = 2


@dataclass(frozen=True)
class Chirality:
    n: int
    m: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or int(self.m) != self.m:
            raise ValueError("chirality indices must be integers")
        if self.n < 1 or self.m < 0 or self.m > self.n:
            raise ValueError(f"invalid chirality ({self.n},{self.m}); need n >= 1, 0 <= m <= n")

    @property
    def radius(self) -> float:
        """Tube radius in metres."""
        return math.sqrt(3.0) * BOND_LENGTH / (2.0 * math.pi) * math.sqrt(
            self.m**2 + self.n * self.m + self.n**2)

    @property
    def metallic(self) -> bool:
        return (self.n - self.m) % 3 == 0


def tube_radius(ch: Chirality) -> float:
    """Radius in nm."""
    return ch.radius / NM


@dataclass(frozen=True)
class ElectronicParams:
    """Carrier parameters of one tube.

    tau in s, v_fermi in m/s, mu and gamma0 in eV, m_eff in electron masses,
    n_2d in m^-2.  The defaults of m_eff and n_2d only enter the plasma
    frequency itself; the collective coupling K is independent of both.
    """

    tau: float = HBAR / (6.61e-3 * EV)
    v_fermi: float = C / 300.0
    mu: float = 0.5
    m_eff: float = 0.1
    n_2d: float = 1.0e17
    gamma0: float = 2.7

    def __post_init__(self):
        if not self.tau > 0 or not self.v_fermi > 0:
            raise ValueError("tau and v_fermi must be positive")
        if not self.m_eff > 0 or not self.n_2d > 0:
            raise ValueError("m_eff and n_2d must be positive")


@dataclass(frozen=True)
class SpectralPoint:
    k_y: float
    frequency: float
    axis: Literal["real", "imag"] = "imag"
    temperature: float = 0.0

    def __post_init__(self):
        if self.axis not in ("real", "imag"):
            raise ValueError("axis must be 'real' or 'imag'")
        if self.k_y < 0:
            raise ValueError("k_y is the magnitude of the axial quasi-momentum (>= 0)")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


# ---------------------------------------------------------------- intraband

def _intra_prefactor(ch: Chirality, ep: ElectronicParams) -> float:
    # 2 pi / c * 2 alpha c v_F / (pi^2 R)
    return 4.0 * ALPHA * ep.v_fermi / (math.pi * ch.radius)


def sigma_intra(xi, k_y, ch: Chirality, ep: ElectronicParams):
    """Reduced single-tube intraband conductivity on the imaginary axis.

    Nonlocal Drude form with i omega -> -xi:
    prefactor * (xi + 1/tau) / ((xi + 1/tau)^2 + (v_F k_y)^2).
    """
    g = np.asarray(xi, dtype=float) + 1.0 / ep.tau
    vk = ep.v_fermi * np.asarray(k_y, dtype=float)
    return _intra_prefactor(ch, ep) * g / (g * g + vk * vk)


def sigma_intra_dk(xi, k_y, ch: Chirality, ep: ElectronicParams):
    """d sigma_intra / d k_y (reduced units times metres)."""
    g = np.asarray(xi, dtype=float) + 1.0 / ep.tau
    k = np.asarray(k_y, dtype=float)
    v2 = ep.v_fermi**2
    den = g * g + v2 * k * k
    return -_intra_prefactor(ch, ep) * 2.0 * g * v2 * k / (den * den)


def sigma_intra_real(omega, k_y, ch: Chirality, ep: ElectronicParams):
    """Complex reduced intraband conductivity on the real axis (exp(-i w t))."""
    z = -1j * np.asarray(omega, dtype=float) + 1.0 / ep.tau
    vk = ep.v_fermi * np.asarray(k_y, dtype=float)
    return _intra_prefactor(ch, ep) * z / (z * z + vk * vk)


def thermal_intra_factor(k_y, temperature, mu, v_fermi=C / 300.0, convention="fermi"):
    """Finite-temperature multiplier of the intraband conductivity.

    With ``eps = hbar v_F k_y`` the default (``"fermi"``) form is

        F = (k_B T / eps) [ln(1 + e^{mu/k_B T}) - ln(1 + e^{(mu - eps)/k_B T})],

    the mean Fermi occupation over [0, eps]: F -> 1 as T -> 0 when eps < mu,
    F -> mu/eps when eps > mu, and eps -> 0 is taken by its limit.
    ``"printed"`` evaluates |(k_B T/eps) ln|(e^{(mu-eps)/k_B T} - 1)/(e^{mu/k_B T} - 1)||,
    which agrees for eps < mu at low T but is log-singular at eps = mu.
    """
    k = np.asarray(k_y, dtype=float)
    if temperature <= 0:
        raise ValueError("thermal factor needs T > 0")
    kt = KB * temperature / EV
    eps = HBAR * v_fermi * k / EV
    a = mu / kt
    b = (mu - eps) / kt
    if convention == "fermi":
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (np.logaddexp(0.0, a) - np.logaddexp(0.0, b)) * kt / eps
        small = eps < 1e-9 * kt
        limit = 0.5 * (1.0 + np.tanh(0.5 * a))
        out = np.where(small, limit, out)
    elif convention == "printed":
        with np.errstate(divide="ignore", invalid="ignore"):
            num = np.log(np.abs(np.expm1(b)))
            den = np.log(np.expm1(a)) if a < 700 else a
            out = np.abs((num - den) * kt / eps)
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return float(out) if np.ndim(k_y) == 0 else out


def thermal_intra_factor_dk(k_y, temperature, mu, v_fermi=C / 300.0):
    """d F / d k_y for the ``"fermi"`` convention (1/m)."""
    k = np.asarray(k_y, dtype=float)
    kt = KB * temperature / EV
    deps = HBAR * v_fermi / EV
    eps = deps * k
    f = thermal_intra_factor(k, temperature, mu, v_fermi)
    occ = 0.5 * (1.0 + np.tanh(0.5 * (mu - eps) / kt))  # overflow-free logistic
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (occ - f) / eps * deps
    # F'(0) = -f'(mu)/2 in energy units
    occ0 = 0.5 * (1.0 + math.tanh(0.5 * mu / kt))
    slope0 = -0.5 * occ0 * (1.0 - occ0) / kt * deps
    return np.where(eps < 1e-9 * kt, slope0, out)


# ---------------------------------------------------------- tight binding

def translation_period(ch: Chirality) -> float:
    """Axial lattice period of a zigzag tube, 3 b (m)."""
    _require_zigzag(ch)
    return 3.0 * BOND_LENGTH


def _require_zigzag(ch: Chirality):
    if ch.m != 0:
        raise ValueError("the zone-folding tight-binding model supports zigzag (n,0) tubes only")


def _structure_factor(ch: Chirality, k):
    """Nearest-neighbour sum f_q(k) with true axial bond projections, shape (2n, ...)."""
    _require_zigzag(ch)
    k = np.asarray(k, dtype=float)
    q = np.arange(1, 2 * ch.n + 1).reshape((-1,) + (1,) * k.ndim)
    cq = np.cos(q * math.pi / ch.n)
    b = BOND_LENGTH
    f = np.exp(1j * k * b) + 2.0 * cq * np.exp(-0.5j * k * b)
    df = 1j * b * np.exp(1j * k * b) - 1j * b * cq * np.exp(-0.5j * k * b)
    return f, df


def tb_subbands(ch: Chirality, k, gamma0: float = 2.7):
    """Conduction subband energies E_q(k) >= 0 (eV) for q = 1..2n, shape (2n, ...).

    The valence partners are -E_q(k).  E_q(k) = gamma0 sqrt(1 + 4 cos(q pi/n)
    cos(k T/2) + 4 cos^2(q pi/n)) with T = 3b the axial period.
    """
    k = np.asarray(k, dtype=float)
    if np.any(np.abs(k) > math.pi / translation_period(ch) * (1 + 1e-12)):
        raise ValueError("k outside the first Brillouin zone")
    f, _ = _structure_factor(ch, k)
    return gamma0 * np.abs(f)


def tb_transitions(ch: Chirality, gamma0: float = 2.7, nk: int = 1600):
    """Vertical interband transitions of the undoped tube.

    Returns energies 2E_q(k) (eV) and weights |hbar v_cv|^2 dk (eV^2 m) on a
    uniform periodic k grid (trapezoid rule over the Brillouin zone).
    """
    period = translation_period(ch)
    k = -math.pi / period + (np.arange(nk) + 0.5) * (2.0 * math.pi / period / nk)
    f, df = _structure_factor(ch, k)
    mag = np.abs(f)
    with np.errstate(divide="ignore", invalid="ignore"):
        hv = np.where(mag > 1e-12, np.abs(np.imag(df * np.conj(f))) / mag, 0.0) * gamma0
    dk = 2.0 * math.pi / period / nk
    return (2.0 * gamma0 * mag).ravel(), (hv * hv * dk).ravel()


# ---------------------------------------------------------------- interband

@dataclass(frozen=True)
class Oscillator:
    center_ev: float
    strength: float
    width_ev: float

    def __post_init__(self):
        if self.strength < 0:
            raise ValueError("oscillator strength must be >= 0")
        if not self.width_ev > 0 or not self.center_ev > 0:
            raise ValueError("oscillator center and width must be > 0")


@dataclass(frozen=True)
class ConductivityTable:
    """Tabulated sigma/sigma0 versus hbar omega (eV)."""

    omega_ev: tuple
    re: tuple
    im: tuple

    def __post_init__(self):
        w = np.asarray(self.omega_ev)
        if w.size < 2 or np.any(np.diff(w) <= 0):
            raise ValueError("table rows must be strictly increasing in omega")
        if np.any(np.asarray(self.re) < 0):
            raise ValueError("tabulated Re sigma must be >= 0")


def read_conductivity_table(path) -> ConductivityTable:
    """Read ``omega_eV, re_sigma_over_sigma0, im_sigma_over_sigma0`` rows."""
    rows = []
    with open(path, newline="") as fh:
        sample = fh.read(2048)
        fh.seek(0)
        dialect = csv.Sniffer().sniff(sample, delimiters=",;\t ")
        reader = csv.reader(fh, dialect)
        header = [h.strip() for h in next(reader)]
        want = ["omega_eV", "re_sigma_over_sigma0", "im_sigma_over_sigma0"]
        if header[:3] != want:
            raise ValueError(f"{path}: expected header {want}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            cells = [c for c in row if c.strip()]
            if not cells:
                continue
            try:
                rows.append([float(c) for c in cells[:3]])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    arr = np.asarray(rows)
    return ConductivityTable(tuple(arr[:, 0]), tuple(arr[:, 1]), tuple(arr[:, 2]))


def write_conductivity_table(path, omega_ev, re, im):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["omega_eV", "re_sigma_over_sigma0", "im_sigma_over_sigma0"])
        for row in zip(omega_ev, re, im):
            w.writerow([repr(float(v)) for v in row])


@dataclass(frozen=True)
class InterbandModel:
    variant: Literal["tight_binding_kubo", "lorentz_oscillators", "tabulated"] = "tight_binding_kubo"
    oscillators: tuple = ()
    table: ConductivityTable | None = None
    broadening_ev: float = 0.05
    nk: int = 1600
    # real-axis sampling used for the dispersion transform
    omega_max_ev: float | None = None
    samples_per_width: int = 8

    def __post_init__(self):
        if self.variant not in ("tight_binding_kubo", "lorentz_oscillators", "tabulated"):
            raise ValueError(f"unknown interband variant {self.variant!r}")
        if self.variant == "tabulated" and self.table is None:
            raise ValueError("tabulated variant needs a table")
        if not self.broadening_ev > 0:
            raise ValueError("broadening must be > 0")


class InterbandResponse:
    """Interband sigma/sigma0 of one tube for a given model.

    The imaginary-axis values come from the dispersion transform of the
    sampled real-axis spectrum and are memoised per frequency; the instance
    is otherwise immutable and safe to share.
    """

    def __init__(self, ch: Chirality, ep: ElectronicParams, model: InterbandModel):
        self.ch = ch
        self.ep = ep
        self.model = model
        self._cache: dict[float, float] = {}
        if model.variant == "tight_binding_kubo":
            self._energies, self._weights = _cached_transitions(ch.n, ch.m, ep.gamma0, model.nk)
        elif model.variant == "lorentz_oscillators" and not any(o.strength > 0 for o in model.oscillators):
            warnings.warn("interband oscillator list is empty or has zero strength; "
                          "interband conductivity is zero", stacklevel=2)
        self._grid_ev, self._grid_re = self._sample_grid()

    # real axis ---------------------------------------------------------
    def real_axis(self, omega):
        """Complex sigma/sigma0 at real angular frequencies (rad/s), omega > 0."""
        x = np.asarray(omega, dtype=float) * HBAR / EV
        variant = self.model.variant
        if variant == "tight_binding_kubo":
            return self._kubo(x.astype(complex))
        if variant == "lorentz_oscillators":
            out = np.zeros(np.shape(x), dtype=complex)
            for o in self.model.oscillators:
                out = out + o.strength * (-1j * x * o.width_ev) / (
                    o.center_ev**2 - x * x - 1j * x * o.width_ev)
            return out
        t = self.model.table
        return np.interp(x, t.omega_ev, t.re) + 1j * np.interp(x, t.omega_ev, t.im)

    def _kubo(self, x):
        """Lorentzian-broadened Kubo sum at complex energy x (eV), x != 0."""
        gam = self.model.broadening_ev
        e = self._energies
        amp = SPIN_DEGENERACY * self._weights / (math.pi * self.ch.radius)
        xs = np.atleast_1d(x)
        out = np.empty(xs.shape, dtype=complex)
        chi0 = 2.0 * e / (e * e + gam * gam)
        for idx, xv in np.ndenumerate(xs):
            chi = -1.0 / (xv - e + 1j * gam) + 1.0 / (xv + e + 1j * gam)
            out[idx] = 1j * np.sum(amp * (chi0 - chi)) / (math.pi * xv)
        return out.reshape(np.shape(x)) if np.ndim(x) else complex(out[0])

    def _sample_grid(self):
        model = self.model
        if model.variant == "tabulated":
            t = model.table
            return np.asarray(t.omega_ev, dtype=float), np.asarray(t.re, dtype=float)
        gam = model.broadening_ev
        if model.variant == "tight_binding_kubo":
            top = float(self._energies.max()) if self._energies.size else 1.0
            widths = [gam]
        else:
            top = max((o.center_ev for o in model.oscillators), default=1.0)
            widths = [o.width_ev for o in model.oscillators] or [gam]
        omega_max = model.omega_max_ev or (top + 40.0 * max(widths))
        step = min(widths) / model.samples_per_width
        count = int(math.ceil(omega_max / step))
        count += count % 2  # odd number of samples for the extrapolated transform
        grid = np.linspace(0.0, omega_max, count + 1)
        re = np.empty_like(grid)
        re[1:] = self._re_real(grid[1:])
        re[0] = self._re_real(np.array([1e-9 * step]))[0]
        return grid, np.maximum(re, 0.0)

    def _re_real(self, x_ev):
        if self.model.variant != "tight_binding_kubo":
            return np.real(self.real_axis(x_ev * EV / HBAR))
        gam = self.model.broadening_ev
        e = self._energies
        amp = SPIN_DEGENERACY * self._weights / (math.pi * self.ch.radius)
        out = np.empty_like(x_ev)
        for start in range(0, x_ev.size, 64):
            xv = x_ev[start:start + 64, None]
            lor = gam / math.pi * (1.0 / ((xv - e) ** 2 + gam**2) - 1.0 / ((xv + e) ** 2 + gam**2))
            out[start:start + 64] = (lor * amp).sum(axis=1) / xv[:, 0]
        return out

    @property
    def real_axis_samples(self):
        """(hbar omega in eV, Re sigma/sigma0) on the transform grid."""
        return self._grid_ev.copy(), self._grid_re.copy()

    # imaginary axis -----------------------------------------------------
    def imag_axis(self, xi):
        """sigma/sigma0 at imaginary frequencies xi (rad/s), real and >= 0."""
        xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
        flat = xi_arr.ravel()
        missing = np.array(sorted({float(v) for v in flat if float(v) not in self._cache}))
        if missing.size:
            with warnings.catch_warnings():
                # beyond the sampled spectrum the declared w^-2 tail is intended
                warnings.simplefilter("ignore", CoverageWarning)
                vals = kk_to_imaginary_axis(self._grid_ev, self._grid_re, missing * HBAR / EV)
            for key, val in zip(missing, np.atleast_1d(vals)):
                self._cache[float(key)] = float(val)
        out = np.array([self._cache[float(v)] for v in flat]).reshape(xi_arr.shape)
        return float(out[0]) if np.ndim(xi) == 0 else out

    def imag_axis_closed_form(self, xi):
        """Analytic continuation of the model itself (validation route)."""
        y = np.asarray(xi, dtype=float) * HBAR / EV
        variant = self.model.variant
        if variant == "tight_binding_kubo":
            gam = self.model.broadening_ev
            e = self._energies
            amp = SPIN_DEGENERACY * self._weights / (math.pi * self.ch.radius)
            ys = np.atleast_1d(y)
            out = np.array([
                np.sum(amp * 2.0 * e * (1.0 / (e * e + gam * gam) - 1.0 / (e * e + (yv + gam) ** 2)))
                / (math.pi * yv) if yv > 0 else self._grid_re[0]
                for yv in ys
            ])
            return float(out[0]) if np.ndim(xi) == 0 else out
        if variant == "lorentz_oscillators":
            out = np.zeros(np.shape(y))
            for o in self.model.oscillators:
                out = out + o.strength * y * o.width_ev / (o.center_ev**2 + y * y + y * o.width_ev)
            return out
        raise ValueError("tabulated data has no closed-form continuation")


@functools.lru_cache(maxsize=16)
def _cached_transitions(n, m, gamma0, nk):
    return tb_transitions(Chirality(n, m), gamma0, nk)


def sigma_inter_real_axis(pt: SpectralPoint, response: InterbandResponse):
    """Complex interband sigma/sigma0 at a real frequency (k_y-local model)."""
    if pt.axis != "real" or not pt.frequency > 0:
        raise ValueError("need a real-axis point with omega > 0")
    return response.real_axis(pt.frequency)


def sigma_inter_imag_axis(pt: SpectralPoint, response: InterbandResponse):
    """Interband sigma/sigma0 at an imaginary frequency (k_y-local model)."""
    if pt.axis != "imag" or pt.frequency < 0:
        raise ValueError("need an imaginary-axis point with xi >= 0")
    return response.imag_axis(pt.frequency)
