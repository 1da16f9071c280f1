"""Command-line front end: config loading, grid runs, export and analysis.

Configuration is TOML.  Every physical quantity carries its unit in the key
name.  A minimal energy run::

    mode = "matsubara"

    [film]
    chirality = [12, 0]

    [grid]
    T_K = [10.0]
    Delta_over_R = [10.0]
    D_nm = { min = 32.0, max = 316.0, count = 5 }
    phi_rad = [0.0, 0.3927]

Grids are either explicit lists or ``{min, max, count}`` tables (log-spaced
for ``D_nm``, linear otherwise).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .analysis import fit_sin2phi, local_log_slope, quantum_thermal_crossover, torque_phase_flip
from .constants import C, EV, HBAR, thermal_energy_closed_form
from .film import SIGMA0, CNTFilm, DiluteRegimeWarning, FilmSpec
from .lifshitz import FRAMES, MODES, CasimirPoint, LifshitzSolver
from .numerics import ConvergenceError, QuadratureSpec, central_derivative
from .swcnt import Chirality, ElectronicParams, InterbandModel, Oscillator, read_conductivity_table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VALIDATION = 4

CSV_COLUMNS = ["T_K", "Delta_over_R", "D_nm", "phi_rad", "E_J_per_m2", "E_over_EM",
               "torque_Nm_per_m2", "torque_over_EM", "mode", "n_terms_used", "config_hash", "status"]


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


# ------------------------------------------------------------------ config

FILM_KEYS = {
    "chirality", "thickness_over_R", "eps_b", "eps_s", "m_eff_me", "N2D_per_m2", "mu_eV",
    "hbar_over_tau_meV", "v_fermi_m_per_s", "gamma0_eV", "interband", "broadening_eV",
    "oscillators", "table_path", "collective_convention", "thermal_convention",
}
GRID_KEYS = {"T_K", "Delta_over_R", "D_nm", "phi_rad"}
COND_KEYS = {"k_y_per_R", "hbar_omega_eV", "hbar_xi_eV", "Delta_over_R", "T_K"}
TOP_KEYS = {"mode", "frame", "workers", "out", "tolerance", "film", "grid", "conductivity"}


@dataclass(frozen=True)
class RunConfig:
    film: dict = field(default_factory=dict)
    mode: str = "matsubara"
    temperatures_K: tuple = (300.0,)
    separations_nm: tuple = (50.0,)
    angles_rad: tuple = (0.0,)
    deltas_over_R: tuple = (10.0,)
    out: str = "results.csv"
    workers: int = 1
    tolerance: float = 1e-7
    conductivity: dict = field(default_factory=dict)
    frame: str = "k_aligned"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode: expected one of {MODES}, got {self.mode!r}")
        if self.frame not in FRAMES:
            raise ConfigError(f"frame: expected one of {FRAMES}, got {self.frame!r}")
        if self.workers < 1:
            raise ConfigError("workers: must be >= 1")
        if not self.tolerance > 0:
            raise ConfigError("tolerance: must be > 0")
        for name in ("temperatures_K", "separations_nm", "angles_rad", "deltas_over_R"):
            if len(getattr(self, name)) == 0:
                raise ConfigError(f"{name}: grid is empty")
        if min(self.separations_nm) <= 0:
            raise ConfigError("grid.D_nm: separations must be > 0")
        if min(self.temperatures_K) < 0:
            raise ConfigError("grid.T_K: temperatures must be >= 0")
        if min(self.deltas_over_R) <= 0:
            raise ConfigError("grid.Delta_over_R: must be > 0")

    def physics(self) -> dict:
        """Everything that determines the numbers (excludes workers and output path)."""
        data = asdict(self)
        data.pop("workers")
        data.pop("out")
        return data

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.physics(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def points(self):
        """Grid points ordered by (T, Delta, D, phi)."""
        temps = (0.0,) if self.mode == "quantum" else tuple(sorted(set(self.temperatures_K)))
        out = []
        for t in temps:
            for delta in sorted(set(self.deltas_over_R)):
                for d in sorted(set(self.separations_nm)):
                    for phi in sorted(set(self.angles_rad)):
                        out.append((float(t), float(delta), float(d), float(phi)))
        return out


def _grid(section: dict, key: str, log: bool = False, prefix: str = "grid") -> tuple:
    value = section[key]
    where = f"{prefix}.{key}"
    if isinstance(value, (int, float)):
        return (float(value),)
    if isinstance(value, list):
        try:
            return tuple(float(v) for v in value)
        except (TypeError, ValueError):
            raise ConfigError(f"{where}: list entries must be numbers") from None
    if isinstance(value, dict):
        extra = set(value) - {"min", "max", "count"}
        if extra or not {"min", "max", "count"} <= set(value):
            raise ConfigError(f"{where}: range tables need exactly min, max, count")
        lo, hi, n = float(value["min"]), float(value["max"]), int(value["count"])
        if n < 1:
            raise ConfigError(f"{where}: count must be >= 1")
        if n == 1:
            return (lo,)
        if log:
            if lo <= 0 or hi <= 0:
                raise ConfigError(f"{where}: log-spaced range needs positive bounds")
            return tuple(float(v) for v in np.geomspace(lo, hi, n))
        return tuple(float(v) for v in np.linspace(lo, hi, n))
    raise ConfigError(f"{where}: expected a number, list or {{min, max, count}} table")


def _check_keys(section: dict, allowed: set, name: str):
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"{name}: unknown key(s) {', '.join(unknown)}; allowed: {', '.join(sorted(allowed))}")


def parse_config(data: dict) -> RunConfig:
    _check_keys(data, TOP_KEYS, "config")
    film = dict(data.get("film", {}))
    _check_keys(film, FILM_KEYS, "film")
    grid = dict(data.get("grid", {}))
    _check_keys(grid, GRID_KEYS, "grid")
    cond = dict(data.get("conductivity", {}))
    _check_keys(cond, COND_KEYS, "conductivity")
    kwargs = {"film": film, "conductivity": cond}
    for key in ("mode", "out", "frame"):
        if key in data:
            kwargs[key] = str(data[key])
    if "workers" in data:
        kwargs["workers"] = int(data["workers"])
    if "tolerance" in data:
        kwargs["tolerance"] = float(data["tolerance"])
    if "T_K" in grid:
        kwargs["temperatures_K"] = _grid(grid, "T_K")
    if "Delta_over_R" in grid:
        kwargs["deltas_over_R"] = _grid(grid, "Delta_over_R")
    if "D_nm" in grid:
        kwargs["separations_nm"] = _grid(grid, "D_nm", log=True)
    if "phi_rad" in grid:
        kwargs["angles_rad"] = _grid(grid, "phi_rad")
    cfg = RunConfig(**kwargs)
    build_film_spec(cfg.film, cfg.deltas_over_R[0])  # validate film parameters early
    return cfg


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such file") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    try:
        return parse_config(data)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def build_film_spec(film: dict, delta_over_R: float) -> FilmSpec:
    try:
        ch = Chirality(*film.get("chirality", (12, 0)))
        ep_kwargs = {}
        if "m_eff_me" in film:
            ep_kwargs["m_eff"] = float(film["m_eff_me"])
        if "N2D_per_m2" in film:
            ep_kwargs["n_2d"] = float(film["N2D_per_m2"])
        if "mu_eV" in film:
            ep_kwargs["mu"] = float(film["mu_eV"])
        if "hbar_over_tau_meV" in film:
            ep_kwargs["tau"] = HBAR / (float(film["hbar_over_tau_meV"]) * 1e-3 * EV)
        if "v_fermi_m_per_s" in film:
            ep_kwargs["v_fermi"] = float(film["v_fermi_m_per_s"])
        if "gamma0_eV" in film:
            ep_kwargs["gamma0"] = float(film["gamma0_eV"])
        variant = film.get("interband", "tight_binding_kubo")
        oscillators = tuple(
            Oscillator(float(o["center_eV"]), float(o["strength"]), float(o["width_eV"]))
            for o in film.get("oscillators", ())
        )
        table = read_conductivity_table(film["table_path"]) if "table_path" in film else None
        model_kwargs = {"variant": variant, "oscillators": oscillators, "table": table}
        if "broadening_eV" in film:
            model_kwargs["broadening_ev"] = float(film["broadening_eV"])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DiluteRegimeWarning)
            return FilmSpec.from_units(
                ch, delta_over_R, float(film.get("thickness_over_R", 2.0)),
                eps_b=float(film.get("eps_b", 2.0)),
                eps_s=float(film.get("eps_s", 1.0)),
                electronic=ElectronicParams(**ep_kwargs),
                interband=InterbandModel(**model_kwargs),
                collective_convention=film.get("collective_convention", "passive"),
                thermal_convention=film.get("thermal_convention", "fermi"),
            )
    except (TypeError, ValueError, KeyError, OSError) as exc:
        raise ConfigError(f"film: {exc}") from None


# ---------------------------------------------------------------- workers

_FILMS: dict = {}


def _film(film: dict, delta: float) -> CNTFilm:
    key = (json.dumps(film, sort_keys=True), delta)
    if key not in _FILMS:
        _FILMS[key] = CNTFilm(build_film_spec(film, delta))
    return _FILMS[key]


def _solver(film: dict, delta: float, tolerance: float, frame: str = "k_aligned") -> LifshitzSolver:
    return LifshitzSolver(_film(film, delta), quadrature=QuadratureSpec(relative_tolerance=tolerance),
                          tail_tolerance=min(1e-8, 0.1 * tolerance), frame=frame)


def evaluate_task(task):
    """Evaluate one grid point; returns a record dict (never raises on numeric failure)."""
    film, (t, delta, d, phi), mode, tolerance, frame, want_torque, debug = task
    rec = {"T_K": t, "Delta_over_R": delta, "D_nm": d, "phi_rad": phi, "mode": mode,
           "E_J_per_m2": math.nan, "E_over_EM": math.nan, "torque_Nm_per_m2": math.nan,
           "torque_over_EM": math.nan, "n_terms_used": 0, "status": "ok"}
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            solver = _solver(film, delta, tolerance, frame)
            point = CasimirPoint(d, phi, t, mode)
            res = solver.evaluate(point, want_torque=want_torque)
            rec.update(E_J_per_m2=res.energy, E_over_EM=res.energy_normalized, n_terms_used=res.n_terms)
            if want_torque:
                rec.update(torque_Nm_per_m2=res.torque, torque_over_EM=res.torque_normalized)
                if debug and mode != "thermal":
                    deriv, _ = central_derivative(
                        lambda p: solver.energy(CasimirPoint(d, p, t, mode)), phi, 1e-2)
                    scale = max(abs(res.torque), 1e-3 * abs(res.energy))
                    if abs(res.torque + deriv) > 1e-3 * scale:
                        rec["status"] = f"debug-check: torque {res.torque!r} vs -dE/dphi {-deriv!r}"
    except (ConvergenceError, ArithmeticError, ValueError) as exc:
        rec["status"] = f"error: {type(exc).__name__}: {exc}".replace("\n", " ")
    return rec


def run_grid(cfg: RunConfig, want_torque: bool, debug: bool = False):
    tasks = [(cfg.film, p, cfg.mode, cfg.tolerance, cfg.frame, want_torque, debug) for p in cfg.points()]
    if cfg.workers == 1 or len(tasks) == 1:
        records = [evaluate_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(evaluate_task, tasks, chunksize=1))
    records.sort(key=lambda r: (r["T_K"], r["Delta_over_R"], r["D_nm"], r["phi_rad"]))
    for r in records:
        r["config_hash"] = cfg.config_hash
    return records


def _fmt(value) -> str:
    if isinstance(value, float):
        return "" if math.isnan(value) else repr(value)
    return str(value)


def write_records(path: str, records, cfg: RunConfig, extra_meta: dict | None = None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow([_fmt(r[c]) for c in CSV_COLUMNS])
    meta = {
        "version": __version__,
        "config_hash": cfg.config_hash,
        "config": cfg.physics(),
        "defaults": default_parameters(cfg),
        "n_records": len(records),
        "n_failures": sum(r["status"] != "ok" and not r["status"].startswith("debug") for r in records),
    }
    meta.update(extra_meta or {})
    with open(path + ".json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_records(paths: Sequence[str]):
    records = []
    for path in paths:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            missing = set(CSV_COLUMNS) - set(reader.fieldnames or ())
            if missing:
                raise ConfigError(f"{path}: missing columns {', '.join(sorted(missing))}")
            for row in reader:
                rec = dict(row)
                for key in ("T_K", "Delta_over_R", "D_nm", "phi_rad", "E_J_per_m2", "E_over_EM",
                            "torque_Nm_per_m2", "torque_over_EM"):
                    rec[key] = float(row[key]) if row[key] != "" else math.nan
                rec["n_terms_used"] = int(row["n_terms_used"])
                records.append(rec)
    return records


def default_parameters(cfg: RunConfig) -> dict:
    """Resolved film parameters (in config units) for the first spacing."""
    spec = build_film_spec(cfg.film, cfg.deltas_over_R[0])
    ep = spec.electronic
    return {
        "chirality": [spec.chirality.n, spec.chirality.m],
        "radius_nm": spec.radius * 1e9,
        "thickness_over_R": spec.thickness / spec.radius,
        "eps_b": spec.eps_b,
        "eps_s": spec.eps_s,
        "m_eff_me": ep.m_eff,
        "N2D_per_m2": ep.n_2d,
        "mu_eV": ep.mu,
        "hbar_over_tau_meV": HBAR / ep.tau / EV * 1e3,
        "v_fermi_m_per_s": ep.v_fermi,
        "gamma0_eV": ep.gamma0,
        "interband": spec.interband.variant,
        "broadening_eV": spec.interband.broadening_ev,
        "collective_convention": spec.collective_convention,
        "thermal_convention": spec.thermal_convention,
    }


# ---------------------------------------------------------------- commands

def cmd_points(cfg: RunConfig, want_torque: bool, debug: bool) -> int:
    records = run_grid(cfg, want_torque, debug)
    write_records(cfg.out, records, cfg)
    failures = [r for r in records if r["status"].startswith("error")]
    for r in failures:
        print(f"T={r['T_K']} K Delta={r['Delta_over_R']} R D={r['D_nm']} nm phi={r['phi_rad']}: "
              f"{r['status']}", file=sys.stderr)
    checks = [r for r in records if r["status"].startswith("debug")]
    for r in checks:
        print(f"D={r['D_nm']} nm phi={r['phi_rad']}: {r['status']}", file=sys.stderr)
    print(f"wrote {len(records)} records to {cfg.out}")
    if failures:
        return EXIT_NUMERIC
    return EXIT_VALIDATION if checks else EXIT_OK


def cmd_conductivity(cfg: RunConfig) -> int:
    cond = cfg.conductivity
    omegas = _grid(cond, "hbar_omega_eV", prefix="conductivity") if "hbar_omega_eV" in cond else ()
    xis = _grid(cond, "hbar_xi_eV", prefix="conductivity") if "hbar_xi_eV" in cond else ()
    if not omegas and not xis:
        raise ConfigError("conductivity: frequency grid is empty; set hbar_omega_eV and/or hbar_xi_eV")
    if any(w <= 0 for w in omegas) or any(x < 0 for x in xis):
        raise ConfigError("conductivity: hbar_omega_eV must be > 0 and hbar_xi_eV >= 0")
    deltas = _grid(cond, "Delta_over_R", prefix="conductivity") if "Delta_over_R" in cond else cfg.deltas_over_R
    temperature = float(cond.get("T_K", 0.0))
    k_per_r = float(cond.get("k_y_per_R", 1.0))
    scale = C / (2.0 * math.pi * SIGMA0)  # reduced -> sigma / sigma0
    rows = []
    for delta in sorted(set(deltas)):
        film = _film(cfg.film, delta)
        k_y = k_per_r / film.spec.radius
        if omegas:
            w = np.asarray(omegas) * EV / HBAR
            yy = film.sigma_yy_real(w, k_y) * scale
            xx = film.sigma_xx_real(w) * scale
            for e, a, b in zip(omegas, yy, xx):
                rows.append([delta, "real", e, k_y, a.real, a.imag, b.real, b.imag])
        if xis:
            x = np.asarray(xis) * EV / HBAR
            yy = film.sigma_yy(x, k_y, temperature) * scale
            xx = film.sigma_xx(x) * scale
            for e, a, b in zip(xis, yy, xx):
                rows.append([delta, "imag", e, k_y, float(a), 0.0, float(b), 0.0])
    with open(cfg.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["Delta_over_R", "axis", "hbar_energy_eV", "k_y_per_m", "sigma_yy_re_over_sigma0",
                    "sigma_yy_im_over_sigma0", "sigma_xx_re_over_sigma0", "sigma_xx_im_over_sigma0"])
        for row in rows:
            w.writerow([_fmt(float(v)) if not isinstance(v, str) else v for v in row])
    print(f"wrote {len(rows)} rows to {cfg.out}")
    return EXIT_OK


def _groups(records, keys):
    groups = {}
    for r in records:
        groups.setdefault(tuple(r[k] for k in keys), []).append(r)
    return dict(sorted(groups.items()))


def analyze(records, task: str, temperatures_K: Sequence[float] = (300.0,), force: bool = False):
    """Run one analysis task on records; returns a JSON-ready report."""
    hashes = sorted({r["config_hash"] for r in records})
    if len(hashes) > 1 and not force:
        raise ConfigError(f"records come from different configurations ({', '.join(hashes)}); "
                          "use --force to combine them")
    ok = [r for r in records if r["status"] == "ok"]
    report = {"task": task, "config_hashes": hashes, "results": []}
    if task == "scaling":
        for key, rs in _groups(ok, ("mode", "T_K", "Delta_over_R", "phi_rad")).items():
            rs = sorted(rs, key=lambda r: r["D_nm"])
            if len(rs) < 3:
                raise ConfigError(f"scaling needs >= 3 D_nm values per (mode, T_K, Delta_over_R, phi_rad); "
                                  f"group {key} has {len(rs)}")
            res = local_log_slope([r["D_nm"] for r in rs], [r["E_J_per_m2"] for r in rs])
            report["results"].append({
                "mode": key[0], "T_K": key[1], "Delta_over_R": key[2], "phi_rad": key[3],
                "D_nm": res.separations_nm.tolist(), "exponent": res.exponent.tolist(),
                "transition_nm": res.transition_nm})
    elif task == "sinfit":
        for key, rs in _groups(ok, ("mode", "T_K", "Delta_over_R", "D_nm")).items():
            if len(rs) < 8 or any(math.isnan(r["torque_Nm_per_m2"]) for r in rs):
                raise ConfigError(f"sinfit needs >= 8 phi_rad values with torque per (mode, T_K, "
                                  f"Delta_over_R, D_nm); group {key} has {len(rs)}")
            amp, resid = fit_sin2phi([r["phi_rad"] for r in rs], [r["torque_Nm_per_m2"] for r in rs])
            report["results"].append({"mode": key[0], "T_K": key[1], "Delta_over_R": key[2],
                                      "D_nm": key[3], "amplitude": amp, "residual_fraction": resid})
    elif task == "flip":
        for key, rs in _groups(ok, ("mode", "T_K", "Delta_over_R", "phi_rad")).items():
            rs = sorted(rs, key=lambda r: r["D_nm"])
            if len(rs) < 2 or any(math.isnan(r["torque_Nm_per_m2"]) for r in rs):
                raise ConfigError(f"flip needs >= 2 D_nm values with torque; group {key} has {len(rs)}")
            d = np.array([r["D_nm"] for r in rs])
            t = np.array([r["torque_Nm_per_m2"] for r in rs])
            interp = lambda x, d=d, t=t: float(np.interp(math.log(x), np.log(d), t))
            report["results"].append({"mode": key[0], "T_K": key[1], "Delta_over_R": key[2],
                                      "phi_rad": key[3],
                                      "flip_nm": torque_phase_flip(interp, d, values=t)})
    elif task == "crossover":
        quantum = [r for r in ok if r["mode"] == "quantum"]
        if not quantum:
            raise ConfigError("crossover needs quantum-mode records (mode = \"quantum\")")
        for key, rs in _groups(quantum, ("Delta_over_R", "phi_rad")).items():
            rs = sorted(rs, key=lambda r: r["D_nm"])
            if len(rs) < 2:
                raise ConfigError(f"crossover needs >= 2 D_nm values; group {key} has {len(rs)}")
            d = np.array([r["D_nm"] for r in rs])
            loge = np.log(np.abs([r["E_J_per_m2"] for r in rs]))
            eq = lambda x, d=d, loge=loge: -math.exp(np.interp(math.log(x), np.log(d), loge))
            for t in temperatures_K:
                et = lambda x, t=t: thermal_energy_closed_form(x * 1e-9, t)
                res = quantum_thermal_crossover(eq, et, (float(d[0]), float(d[-1])))
                report["results"].append({"Delta_over_R": key[0], "phi_rad": key[1], "T_K": t,
                                          "crossover_nm": res.distance_nm, "message": res.message})
    else:
        raise ConfigError(f"unknown analysis task {task!r}")
    return report


def cmd_analyze(inputs, task, out, temperatures, force) -> int:
    if not inputs:
        raise ConfigError("analyze: no input CSV files given")
    try:
        records = read_records(inputs)
    except OSError as exc:
        raise ConfigError(str(exc)) from None
    report = analyze(records, task, temperatures, force)
    with open(out, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for item in report["results"]:
        print(", ".join(f"{k}={v}" for k, v in item.items() if not isinstance(v, list)))
    print(f"wrote {out}")
    return EXIT_OK


def run_validation(cfg: RunConfig) -> list[tuple[str, bool, str]]:
    """Quick invariant checks at the configured film; returns (name, passed, detail)."""
    from .constants import ZETA3, casimir_ideal_energy
    from .lifshitz import ConstantSheet
    from .numerics import MatsubaraSpec, integrate_semi_infinite, matsubara_sum
    from .constants import KB

    checks = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        z = integrate_semi_infinite(lambda x: x * np.log1p(-np.exp(-x)), QuadratureSpec(1e-10),
                                    vectorized=True)
        checks.append(("zeta(3) integral", abs(z / -ZETA3 - 1) < 1e-8, f"{z!r}"))
        ms = MatsubaraSpec(300.0)
        s = matsubara_sum(lambda n: 0.5**n, ms)
        checks.append(("geometric Matsubara sum", abs(s / (1.5 * KB * 300.0) - 1) < 1e-8, f"{s!r}"))

        solver = _solver(cfg.film, cfg.deltas_over_R[0], cfg.tolerance, cfg.frame)
        d = cfg.separations_nm[0]
        t = max(cfg.temperatures_K[0], 1.0)
        th = solver.evaluate(CasimirPoint(d, 0.3, t, "thermal"))
        ref = thermal_energy_closed_form(d * 1e-9, t)
        checks.append(("thermal closed form", abs(th.energy / ref - 1) < 1e-6, f"{th.energy!r} vs {ref!r}"))
        checks.append(("thermal torque null", th.torque == 0.0, f"{th.torque!r}"))

        pc = LifshitzSolver(ConstantSheet(1e6, 1e6))
        e = pc.energy(CasimirPoint(1000.0, 0.0, 0.0, "quantum"))
        ratio = e / casimir_ideal_energy(1e-6)
        checks.append(("ideal-metal limit", 0.99 <= ratio <= 1.01, f"E/E_M = {ratio:.6f}"))

        phi = 0.4
        res = solver.evaluate(CasimirPoint(d, phi, 0.0, "quantum"))
        deriv, _ = central_derivative(lambda p: solver.energy(CasimirPoint(d, p, 0.0, "quantum")), phi, 1e-2)
        rel = abs(res.torque + deriv) / abs(res.torque)
        checks.append(("torque = -dE/dphi", rel < 1e-3, f"relative difference {rel:.2e}"))
        mirror = solver.energy(CasimirPoint(d, -phi, 0.0, "quantum"))
        rel = abs(mirror / res.energy - 1)
        checks.append(("E(-phi) = E(phi)", rel < 1e-6, f"relative difference {rel:.2e}"))
        checks.append(("energy negative", res.energy < 0, f"{res.energy!r}"))
    return checks


def cmd_validate(cfg: RunConfig) -> int:
    checks = run_validation(cfg)
    for name, passed, detail in checks:
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
    return EXIT_OK if all(p for _, p, _ in checks) else EXIT_VALIDATION


# ------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="casimir-cnt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML configuration file")
        p.add_argument("--mode", choices=MODES, help="override the configured mode")
        p.add_argument("--workers", type=int, help="parallel worker processes")
        p.add_argument("--out", help="output path")
        p.add_argument("--tolerance", type=float, help="relative quadrature tolerance")
        p.add_argument("--debug-checks", action="store_true",
                       help="cross-check each torque against a finite difference of the energy")
        return p

    common(sub.add_parser("conductivity", help="tabulate sigma_yy and sigma_xx over frequency"))
    common(sub.add_parser("energy", help="Casimir energy over the configured grid"))
    common(sub.add_parser("torque", help="Casimir energy and torque over the configured grid"))
    common(sub.add_parser("sweep", help="alias of torque (energy and torque)"))
    p = common(sub.add_parser("analyze", help="scaling, crossover, flip or sinfit report from CSV records"))
    p.add_argument("inputs", nargs="*", help="record CSV files")
    p.add_argument("--task", choices=("scaling", "crossover", "flip", "sinfit"), required=True)
    p.add_argument("--temperature", type=float, action="append", dest="temperatures",
                   help="temperature (K) for crossover; repeatable")
    p.add_argument("--force", action="store_true", help="combine records from different configs")
    common(sub.add_parser("validate", help="run quick invariant checks"))
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        overrides = {}
        if args.mode:
            overrides["mode"] = args.mode
        if args.workers is not None:
            overrides["workers"] = args.workers
        if args.out:
            overrides["out"] = args.out
        if args.tolerance is not None:
            overrides["tolerance"] = args.tolerance
        if overrides:
            cfg = RunConfig(**{**asdict(cfg), **overrides})
        if args.command == "conductivity":
            return cmd_conductivity(cfg)
        if args.command == "energy":
            return cmd_points(cfg, want_torque=False, debug=args.debug_checks)
        if args.command in ("torque", "sweep"):
            return cmd_points(cfg, want_torque=True, debug=args.debug_checks)
        if args.command == "analyze":
            out = args.out or "analysis.json"
            return cmd_analyze(args.inputs, args.task, out, args.temperatures or [300.0], args.force)
        return cmd_validate(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
