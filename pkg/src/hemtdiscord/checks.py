"""Invariant self-check suite behind ``hemtdiscord check``.

Each check returns ``(passed, detail)``; :func:`self_check` runs them all
and returns a JSON-ready summary. ``fault="pt-sign"`` flips the sign of the
cross term in the partial-transpose seralian, which must make the
PT-eigenvalue checks fail.
"""

from __future__ import annotations

import contextlib
import time
from dataclasses import replace

import numpy as np

from . import gaussian, langevin, oracles, perturbation, steady, sweep
from .errors import NumericalError
from .params import TWO_PI, apply_overrides, default_config, derive_coupling_constants, derive_linear_constants

FAULTS = ("pt-sign",)


@contextlib.contextmanager
def injected_fault(name: str | None):
    if name is None:
        yield
        return
    if name != "pt-sign":
        raise ValueError(f"unknown fault {name!r}")
    saved = gaussian._PT_SIGN
    gaussian._PT_SIGN = -saved
    try:
        yield
    finally:
        gaussian._PT_SIGN = saved


# ---------------------------------------------------------------------------
# sampling helpers shared with the tests


def sample_physical_cms(rng: np.random.Generator, size: int, a_max: float = 60.0):
    """Random standard-form (a, b, c) with c^2 <= (min(a,b) - 1)(max(a,b) + 1),
    the boundary at which the smaller symplectic eigenvalue reaches 1."""
    a = 1 + (a_max - 1) * rng.random(size) ** 2
    b = 1 + (a_max - 1) * rng.random(size) ** 2
    c_max = np.sqrt((np.minimum(a, b) - 1) * (np.maximum(a, b) + 1))
    c = c_max * rng.uniform(-1, 1, size)
    return a, b, c


def random_operating_inputs(rng: np.random.Generator, p=None, n=None):
    """Bundled defaults with the loosely known inputs redrawn."""
    if p is None or n is None:
        p, n = default_config()
    overrides = {
        "c2": p.C2 * rng.uniform(0.5, 2.0),
        "vrf": p.Vrf * rng.uniform(0.5, 2.0),
        "kappa1": p.kappa1 * rng.uniform(0.5, 2.0),
        "kappa2": p.kappa2 * rng.uniform(0.5, 2.0),
        "t": rng.uniform(0.5, 6.0),
        "gn2": rng.uniform(0.0, 2.0),
    }
    return apply_overrides(p, n, overrides)


def relative_error(x, ref) -> float:
    return float(np.linalg.norm(np.asarray(x) - np.asarray(ref)) / np.linalg.norm(ref))


# ---------------------------------------------------------------------------
# checks


def check_thermal_occupancy():
    n42 = float(langevin.thermal_occupancy(TWO_PI * 6.5e9, 4.2))
    w = TWO_PI * np.linspace(1e9, 20e9, 50)
    colder = bool(np.all(langevin.thermal_occupancy(w, 1.2) < langevin.thermal_occupancy(w, 4.2)))
    return abs(n42 - 12.97) <= 0.01 and colder, {"N_6.5GHz_4.2K": n42, "colder_is_lower": colder}


def check_gaussian_identities(samples: int = 2000, seed: int = 1):
    rng = np.random.default_rng(seed)
    a, b, c = sample_physical_cms(rng, samples)
    cm = gaussian.make_cm(a, b, c)
    r = gaussian.gaussian_discord(cm)
    sum_err = float(np.max(np.abs(r.discord + r.classical - r.mutual)))
    prod_err = float(np.max(np.abs(r.nu_minus * r.nu_plus / np.abs(a * b - c**2) - 1)))
    ok = (
        r.discord.min() >= -1e-9
        and r.classical.min() >= -1e-9
        and sum_err <= 1e-9
        and prod_err <= 1e-10
        and r.nu_minus.min() >= 1 - 1e-9
    )
    return bool(ok), {"min_D": float(r.discord.min()), "min_C": float(r.classical.min()),
                      "max_sum_err": sum_err, "max_product_rel_err": prod_err}


def check_tmsv():
    worst = {"nu": 0.0, "d_tilde": 0.0, "cond": 0.0, "D": 0.0}
    for r in (0.1, 0.5, 1.0, 2.0):
        cm = gaussian.make_cm(np.cosh(2 * r), np.cosh(2 * r), np.sinh(2 * r))
        rep = gaussian.gaussian_discord(cm)
        worst["nu"] = max(worst["nu"], abs(rep.nu_minus - 1), abs(rep.nu_plus - 1))
        worst["d_tilde"] = max(worst["d_tilde"], abs(rep.d_tilde - np.exp(-2 * r)))
        worst["cond"] = max(worst["cond"], abs(float(gaussian.entropy_h(gaussian.conditional_variance(cm)))))
        worst["D"] = max(worst["D"], abs(rep.discord - oracles.thermal_entropy(np.sinh(r) ** 2)))
    ok = worst["nu"] <= 1e-10 and worst["d_tilde"] <= 1e-10 and worst["cond"] <= 1e-9 and worst["D"] <= 1e-9
    return bool(ok), {k: float(v) for k, v in worst.items()}


def check_pt_against_williamson(samples: int = 200, seed: int = 2):
    rng = np.random.default_rng(seed)
    a, b, c = sample_physical_cms(rng, samples, a_max=10.0)
    worst = 0.0
    for ai, bi, ci in zip(a, b, c):
        cm = gaussian.make_cm(ai, bi, ci)
        ref = oracles.williamson_spectrum(oracles.partial_transpose(cm.matrix()))[0]
        worst = max(worst, abs(float(gaussian.pt_smaller_eigenvalue(cm)) - ref) / ref)
    return worst <= 1e-8, {"max_rel_err": worst}


def check_solver_oracles(draws: int = 30, seed: int = 3):
    rng = np.random.default_rng(seed)
    worst_steady = worst_fluct = worst_resid = 0.0
    for _ in range(draws):
        p, n = random_operating_inputs(rng)
        d = derive_linear_constants(p, n)
        matrix, rhs = steady.build_steady_system(d, p.kappa1, p.kappa2)
        s = steady.solve_steady_state(matrix, rhs)
        x = np.array([s.A1.real, s.A1.imag, s.A2.real, s.A2.imag])
        worst_steady = max(worst_steady, relative_error(x, oracles.adjugate_inverse(matrix) @ rhs))
        worst_resid = max(worst_resid, s.residual / np.linalg.norm(rhs))
        g = steady.langevin_rates(s, derive_coupling_constants(d, n))
        bath = langevin.bath_spec(p, d)
        w = rng.uniform(0.8, 1.2) * d.omega1
        M = langevin.build_fluctuation_matrix(w, d, g, bath)
        S = np.linalg.solve(M, langevin.drive_matrix(bath))
        worst_fluct = max(worst_fluct, relative_error(S, oracles.adjugate_inverse(M) @ langevin.drive_matrix(bath)))
    ok = worst_steady <= 1e-9 and worst_fluct <= 1e-9 and worst_resid <= 1e-12
    return ok, {"steady_rel_err": worst_steady, "fluct_rel_err": worst_fluct, "residual_rel": worst_resid}


def check_degeneracy():
    res = sweep.run_sweep(sweep.SweepConfig(f_points=50, gn2_min=0.0, gn2_max=0.0, gn2_points=2), workers=1)
    worst = max(
        float(np.max(np.abs(res.column(k)))) for k in ("D", "C", "I", "re_d12", "im_d12", "zeta12_abs")
    )
    return worst <= 1e-10 and not res.errors, {"max_abs": worst}


def check_perturbation():
    p, n = default_config()
    op = sweep.operating_point(p, n)
    d, c, s = op.derived, op.coupling, op.steady
    k = perturbation.perturbation_coefficients(c, s)
    norms = []
    offsets_ok = True
    for osc in (1, 2):
        energies = perturbation.level_energy_fn(osc, s, c, d.omega1, d.omega2)
        for j in range(4):
            corr = perturbation.first_order_state(osc, j, k, energies)
            state = perturbation.renormalized_state(corr)
            norms.append(abs(sum(abs(v) ** 2 for v in state.values()) - 1))
            if osc == 1 and j == 0:
                offsets_ok = set(corr.offsets) == {1, 2}
    op0 = sweep.operating_point(p, replace(n, gN2=0.0))
    k0 = perturbation.perturbation_coefficients(op0.coupling, op0.steady)
    vanish = all(
        not perturbation.first_order_state(
            osc, j, k0, perturbation.level_energy_fn(osc, op0.steady, op0.coupling, op0.derived.omega1, op0.derived.omega2)
        ).terms
        for osc in (1, 2) for j in range(4)
    )
    zeta0 = perturbation.squeezing_parameter(op0.steady, op0.coupling, p.kappa1, p.kappa2).zeta12
    ok = max(norms) <= 1e-12 and offsets_ok and vanish and zeta0 == 0
    return ok, {"max_norm_err": max(norms), "osc1_ground_offsets_ok": offsets_ok, "vanish_at_zero": vanish}


def check_sweep_properties():
    p, n = default_config()
    cfg = sweep.SweepConfig(f_points=12, gn2_points=6)
    base = sweep.format_csv(sweep.run_sweep(cfg, p, n, workers=1))
    parallel = sweep.format_csv(sweep.run_sweep(cfg, p, n, workers=2))
    res = sweep.run_sweep(replace(cfg, overrides={"c2": 0.5e-12}), p, n, workers=1)
    reverted = sweep.format_csv(sweep.run_sweep(replace(cfg, overrides={"c2": p.C2}), p, n, workers=1))
    rows = sweep.run_sweep(cfg, p, n, workers=1)
    D, dt = rows.column("D"), rows.column("d_tilde")
    ok = base == parallel and base == reverted and D.min() >= 0 and D.max() < 1 and dt.min() >= 1
    return bool(ok), {"parallel_identical": base == parallel, "override_pure": base == reverted,
                      "D_range": [float(D.min()), float(D.max())], "min_d_tilde": float(dt.min()),
                      "c2_half_rows": int(res.rows.shape[0])}


CHECKS = {
    "thermal_occupancy": check_thermal_occupancy,
    "gaussian_identities": check_gaussian_identities,
    "tmsv_oracle": check_tmsv,
    "pt_vs_williamson": check_pt_against_williamson,
    "solver_oracles": check_solver_oracles,
    "degeneracy_gn2_zero": check_degeneracy,
    "perturbation": check_perturbation,
    "sweep_properties": check_sweep_properties,
}


def self_check(fault: str | None = None) -> dict:
    """Run every check; a check that raises counts as failed."""
    results = []
    with injected_fault(fault):
        for name, fn in CHECKS.items():
            t0 = time.perf_counter()
            try:
                passed, detail = fn()
            except (NumericalError, ValueError, ArithmeticError) as exc:
                passed, detail = False, {"exception": f"{type(exc).__name__}: {exc}"}
            results.append({
                "name": name,
                "passed": bool(passed),
                "seconds": round(time.perf_counter() - t0, 4),
                "detail": sweep._jsonable(detail),
            })
    return {"passed": all(r["passed"] for r in results), "fault": fault, "checks": results}
