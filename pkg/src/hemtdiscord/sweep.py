"""Evaluation pipeline: single operating points and frequency x gN2 grids.

A grid is evaluated one gN2 column at a time. Everything upstream of the
fluctuation solve depends on gN2 only, so each column needs one steady-state
solve and a batched 4x4 solve across the probe frequencies. Columns are
independent and are farmed out to worker processes; the output order is
fixed by the grid, never by completion order.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from . import gaussian, langevin, perturbation, steady
from .errors import ConfigError, HemtError, NumericalError, ResonanceSingularityError
from .params import (
    TWO_PI,
    CouplingConstants,
    DerivedConstants,
    DeviceParams,
    NonlinearInputs,
    apply_overrides,
    config_to_dict,
    default_config,
    derive_coupling_constants,
    derive_linear_constants,
)

COLUMNS = (
    "f_hz", "gn2", "D", "C", "I", "nu_minus", "nu_plus", "d_tilde",
    "n1", "n2", "re_d12", "im_d12", "n_o1", "n_o2", "N1", "N2", "zeta12_abs",
)
DEFAULT_POINTS = 200
DEFAULT_GN2_RANGE = (0.0, 2.0)
# half-width of the default frequency window, in units of the larger kappa
DEFAULT_SPAN_KAPPAS = 3.0


class OutputPathError(HemtError):
    """The requested output file cannot be written."""


@dataclass(frozen=True)
class OperatingPoint:
    derived: DerivedConstants
    coupling: CouplingConstants
    steady: steady.SteadyState
    rates: steady.GammaRates
    bath: langevin.BathSpec


def operating_point(p: DeviceParams, n: NonlinearInputs) -> OperatingPoint:
    """Everything upstream of the fluctuation solve for one gN2."""
    d = derive_linear_constants(p, n)
    c = derive_coupling_constants(d, n)
    matrix, rhs = steady.build_steady_system(d, p.kappa1, p.kappa2)
    s = steady.solve_steady_state(matrix, rhs)
    return OperatingPoint(d, c, s, steady.langevin_rates(s, c), langevin.bath_spec(p, d))


# ---------------------------------------------------------------------------
# single point


def _jsonable(value: Any) -> Any:
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": _jsonable(value.real), "im": _jsonable(value.imag)}
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else repr(v)
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist() if value.ndim else value[()])
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if value is None or isinstance(value, str):
        return value
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _correction_block(osc, j, coeffs, energies):
    corr = perturbation.first_order_state(osc, j, coeffs, energies)
    return {
        "oscillator": osc,
        "base_level": j,
        "terms": [{"offset": k, "amplitude": v} for k, v in corr.terms],
        "energy_gap_imag": [{"offset": k, "value": v} for k, v in corr.energy_imag],
        "mixedness": perturbation.mixedness_indicator(corr),
        "state": [{"level": lv, "amplitude": a} for lv, a in perturbation.renormalized_state(corr).items()],
    }


def run_point(p: DeviceParams, n: NonlinearInputs, f_hz: float, gn2: float | None = None) -> dict:
    """Full report for one probe frequency (Hz) and gN2.

    Every intermediate is included; complex numbers serialize as
    ``{"re": .., "im": ..}`` and non-finite floats as strings.
    """
    if gn2 is not None:
        n = replace(n, gN2=float(gn2))
    if not (math.isfinite(f_hz) and f_hz > 0):
        raise ConfigError("probe frequency must be a positive finite number", "f")
    op = operating_point(p, n)
    d, c, s = op.derived, op.coupling, op.steady
    omega = TWO_PI * f_hz
    m = langevin.fluctuation_moments(np.array([omega]), d, op.rates, op.bath)
    moments = {k: v[0] for k, v in asdict(m).items()}
    cm = gaussian.covariance_matrix(m)
    corr = gaussian.gaussian_discord(cm)
    coeffs = perturbation.perturbation_coefficients(c, s)
    sq = perturbation.squeezing_parameter(s, c, p.kappa1, p.kappa2)
    blocks = []
    for osc in (1, 2):
        energies = perturbation.level_energy_fn(osc, s, c, d.omega1, d.omega2)
        for j in (0, 1):
            blocks.append(_correction_block(osc, j, coeffs, energies))
    report = {
        "input": {"f_hz": f_hz, "omega": omega, "gn2": n.gN2, "config": config_to_dict(p, n)},
        "constants": asdict(d),
        "coupling": asdict(c),
        "steady": {"A1": s.A1, "A2": s.A2, "residual": s.residual, "condition": s.condition},
        "rates": asdict(op.rates),
        "bath": asdict(op.bath),
        "moments": moments,
        "cm": {k: getattr(cm, k)[0] for k in ("a", "b", "c", "tau", "eta")},
        "correlations": {k: v[0] for k, v in asdict(corr).items()},
        "perturbation": {"coefficients": asdict(coeffs), "corrections": blocks},
        "squeezing": asdict(sq),
    }
    return _jsonable(report)


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepConfig:
    """Grid specification. ``None`` ranges fall back to :func:`default_ranges`."""

    f_min: float | None = None
    f_max: float | None = None
    f_points: int = DEFAULT_POINTS
    gn2_min: float = DEFAULT_GN2_RANGE[0]
    gn2_max: float = DEFAULT_GN2_RANGE[1]
    gn2_points: int = DEFAULT_POINTS
    overrides: Mapping[str, float] = field(default_factory=dict)
    output_path: str | None = None
    format: str = "csv"

    def __post_init__(self):
        for name in ("f_points", "gn2_points"):
            v = getattr(self, name)
            if int(v) != v or v < 2:
                raise ConfigError("must be an integer >= 2", name)
        if (self.f_min is None) != (self.f_max is None):
            raise ConfigError("give both f_min and f_max or neither", "f_min")
        if self.f_min is not None and not (0 < self.f_min < self.f_max):
            raise ConfigError("need 0 < f_min < f_max", "f_min")
        if not self.gn2_min <= self.gn2_max:
            raise ConfigError("need gn2_min <= gn2_max", "gn2_min")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json", "format")


@dataclass(frozen=True)
class SweepResult:
    rows: np.ndarray              # (k, len(COLUMNS)), f outer / gn2 inner
    errors: tuple[dict, ...]
    f_hz: np.ndarray
    gn2: np.ndarray

    @property
    def columns(self) -> tuple[str, ...]:
        return COLUMNS

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, COLUMNS.index(name)]


def default_ranges(p: DeviceParams, n: NonlinearInputs) -> tuple[float, float]:
    """Frequency window (Hz) reaching 3 kappa beyond both resonances."""
    d = derive_linear_constants(p, n)
    span = DEFAULT_SPAN_KAPPAS * max(p.kappa1, p.kappa2)
    lo = min(d.omega1, d.omega2) - span
    hi = max(d.omega1, d.omega2) + span
    return max(lo, 1e-3 * hi) / TWO_PI, hi / TWO_PI


def _cell_error(f, g, exc: Exception) -> dict:
    stage = getattr(exc, "stage", "numerics")
    return {"f_hz": float(f), "gn2": float(g), "stage": stage, "error": type(exc).__name__, "message": str(exc)}


def _correlations(m: langevin.SpectralMoments):
    cm = gaussian.covariance_matrix(m)
    return gaussian.gaussian_discord(cm)


def evaluate_column(p: DeviceParams, n: NonlinearInputs, gn2: float, f_hz: np.ndarray):
    """One gN2 column. Returns ``(values, errors)``: a (len(f), 17) array
    with NaN rows at failed cells and the matching error records."""
    f_hz = np.asarray(f_hz, dtype=float)
    out = np.full((f_hz.size, len(COLUMNS)), np.nan)
    out[:, 0] = f_hz
    out[:, 1] = gn2
    try:
        op = operating_point(p, replace(n, gN2=float(gn2)))
    except NumericalError as exc:
        return out, [_cell_error(f, gn2, exc) for f in f_hz]
    d, rates, bath = op.derived, op.rates, op.bath
    omega = TWO_PI * f_hz
    errors: dict[int, dict] = {}
    bad = langevin.singular_mask(omega, d, rates, bath)
    for i in np.flatnonzero(bad):
        errors[i] = _cell_error(
            f_hz[i], gn2,
            ResonanceSingularityError(f"fluctuation resonance singularity at omega = {omega[i]:.9g} rad/s", omega[i]),
        )
    good = np.flatnonzero(~bad)
    if good.size:
        m = langevin.fluctuation_moments(omega[good], d, rates, bath)
        try:
            corr = _correlations(m)
            ok = np.ones(good.size, dtype=bool)
        except NumericalError:
            # find the offending cells one by one
            ok = np.zeros(good.size, dtype=bool)
            parts = []
            for k in range(good.size):
                mk = langevin.SpectralMoments(*(np.atleast_1d(v)[k : k + 1] for v in asdict(m).values()))
                try:
                    parts.append(_correlations(mk))
                    ok[k] = True
                except NumericalError as exc:
                    errors[good[k]] = _cell_error(f_hz[good[k]], gn2, exc)
            corr = gaussian.CorrelationReport(
                *(np.concatenate([np.atleast_1d(getattr(r, name)) for r in parts]) if parts else np.empty(0)
                  for name in gaussian.CorrelationReport.__dataclass_fields__)
            )
        idx = good[ok]
        zeta = perturbation.zeta12_abs(op.steady.A1, op.steady.A2, op.coupling)
        fields = {
            "D": corr.discord, "C": corr.classical, "I": corr.mutual,
            "nu_minus": corr.nu_minus, "nu_plus": corr.nu_plus, "d_tilde": corr.d_tilde,
            "n1": m.n1[ok], "n2": m.n2[ok], "re_d12": m.d12.real[ok], "im_d12": m.d12.imag[ok],
            "n_o1": m.n_o1[ok], "n_o2": m.n_o2[ok],
            "N1": bath.N1, "N2": bath.N2, "zeta12_abs": zeta,
        }
        for name, value in fields.items():
            out[idx, COLUMNS.index(name)] = value
    return out, [errors[i] for i in sorted(errors)]


def _column_task(args):
    p, n, gn2, f_hz = args
    return evaluate_column(p, n, gn2, f_hz)


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        return max(1, min(os.cpu_count() or 1, 8))
    if workers < 1:
        raise ConfigError("must be >= 1", "workers")
    return int(workers)


def run_sweep(
    sweep: SweepConfig,
    p: DeviceParams | None = None,
    n: NonlinearInputs | None = None,
    workers: int | None = None,
) -> SweepResult:
    """Evaluate the grid; singular cells are collected, not fatal.

    Raises
    ------
    NumericalError
        If every cell of the grid failed.
    """
    if p is None or n is None:
        p0, n0 = default_config()
        p, n = p or p0, n or n0
    p, n = apply_overrides(p, n, sweep.overrides)
    if sweep.f_min is None:
        f_lo, f_hi = default_ranges(p, n)
    else:
        f_lo, f_hi = sweep.f_min, sweep.f_max
    f_hz = np.linspace(f_lo, f_hi, sweep.f_points)
    gn2 = np.linspace(sweep.gn2_min, sweep.gn2_max, sweep.gn2_points)
    tasks = [(p, n, float(g), f_hz) for g in gn2]
    nworkers = resolve_workers(workers)
    if nworkers == 1:
        results = [_column_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            results = list(pool.map(_column_task, tasks, chunksize=max(1, len(tasks) // (4 * nworkers))))
    # (gn2, f, col) -> f outer, gn2 inner
    grid = np.stack([r[0] for r in results]).transpose(1, 0, 2).reshape(-1, len(COLUMNS))
    keep = ~np.isnan(grid[:, 2])
    errs = [e for r in results for e in r[1]]
    errs.sort(key=lambda e: (e["f_hz"], e["gn2"]))
    if not keep.any():
        raise NumericalError("every grid point failed; see the error list")
    return SweepResult(rows=grid[keep], errors=tuple(errs), f_hz=f_hz, gn2=gn2)


def check_output_path(path) -> Path:
    path = Path(path)
    parent = path.parent if str(path.parent) else Path(".")
    if path.is_dir():
        raise OutputPathError(f"output path {path} is a directory")
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise OutputPathError(f"output directory {parent} does not exist or is not writable")
    return path


def errors_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".errors.json")


def format_csv(result: SweepResult) -> str:
    lines = [",".join(COLUMNS)]
    lines.extend(",".join(f"{v:.16e}" for v in row) for row in result.rows.tolist())
    return "\n".join(lines) + "\n"


def format_json(result: SweepResult) -> str:
    doc = {
        "columns": list(COLUMNS),
        "rows": result.rows.tolist(),
        "errors": list(result.errors),
    }
    return json.dumps(doc) + "\n"


def write_result(result: SweepResult, path, fmt: str = "csv") -> tuple[Path, Path]:
    """Write the table and its error sidecar (always present, possibly empty)."""
    path = check_output_path(path)
    text = format_csv(result) if fmt == "csv" else format_json(result)
    side = errors_path(path)
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
        with open(side, "w", newline="\n") as fh:
            fh.write(json.dumps(list(result.errors), indent=2) + "\n")
    except OSError as exc:
        raise OutputPathError(f"cannot write {path}: {exc.strerror}") from exc
    return path, side
