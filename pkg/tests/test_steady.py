import math
from dataclasses import asdict, replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.constants import hbar

from hemtdiscord import oracles
from hemtdiscord.errors import DegenerateSteadyStateError
from hemtdiscord.params import CouplingConstants, derive_linear_constants
from hemtdiscord.steady import (
    SteadyState,
    build_steady_system,
    energy_levels,
    langevin_rates,
    solve_steady_state,
)

ZERO_C = CouplingConstants(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def unit_coupling(name, value=1.0):
    return replace(ZERO_C, **{name: value})


def test_decoupled_matrix_block_diagonal(op):
    d = replace(op.derived, g12prime=0.0, g22prime=0.0, Cq1q2=math.inf)
    m, _ = build_steady_system(d, 2.0, 4.0)
    np.testing.assert_array_equal(m, np.diag([-1.0, 1.0, -2.0, -2.0]))


def test_zero_drives_zero_amplitudes(op):
    d = replace(op.derived, Vq1=0.0, Vq2=0.0, Igs_rms=0.0, Ip2=0.0)
    m, rhs = build_steady_system(d, 1e8, 2e8)
    assert not rhs.any()
    s = solve_steady_state(m, rhs)
    assert s.A1 == 0 and s.A2 == 0


def test_matrix_matches_transcription(defaults, op):
    p, _ = defaults
    d = op.derived
    k1, k2, D1, D2 = p.kappa1, p.kappa2, 3e6, -5e6
    x = 2 * d.g12prime * math.sqrt(d.Z2 / d.Z1)
    q = 1 / (2 * d.Cq1q2 * math.sqrt(d.Z1 * d.Z2))
    ref = [
        [-k1 / 2, D1, x, q],
        [-D1, k1 / 2, 0, 0],
        [0, q, d.g22prime - k2 / 2, D2],
        [0, -x, -D2, -(d.g22prime + k2 / 2)],
    ]
    ref_rhs = [
        -d.Vq1 * math.sqrt(1 / (2 * hbar * d.Z1)),
        -d.Igs_rms * math.sqrt(d.Z1 / (2 * hbar)),
        -d.Vq2 * math.sqrt(1 / (2 * hbar * d.Z2)),
        d.Ip2 * math.sqrt(d.Z2 / (2 * hbar)),
    ]
    m, rhs = build_steady_system(d, k1, k2, D1, D2)
    np.testing.assert_array_equal(m, np.array(ref))
    np.testing.assert_array_equal(rhs, np.array(ref_rhs))


def test_default_solution_matches_adjugate(defaults, op):
    p, _ = defaults
    m, rhs = build_steady_system(op.derived, p.kappa1, p.kappa2)
    s = solve_steady_state(m, rhs)
    ref = oracles.adjugate_inverse(m) @ rhs
    x = np.array([s.A1.real, s.A1.imag, s.A2.real, s.A2.imag])
    assert np.linalg.norm(x - ref) <= 1e-9 * np.linalg.norm(ref)
    assert s.residual <= 1e-12 * np.linalg.norm(rhs)
    assert s.residual <= 1e-10 * (1 + np.linalg.norm(rhs))


@pytest.mark.parametrize("kind", ["pow2", "random"])
def test_row_scaling_invariance(defaults, op, rng, kind):
    p, _ = defaults
    m, rhs = build_steady_system(op.derived, p.kappa1, p.kappa2)
    base = solve_steady_state(m, rhs)
    x0 = np.array([base.A1, base.A2])
    for _ in range(20):
        if kind == "pow2":
            scale = np.exp2(rng.integers(-40, 40, 4))
        else:
            scale = np.exp(rng.uniform(-20, 20, 4))
        s = solve_steady_state(scale[:, None] * m, scale * rhs)
        assert np.linalg.norm(np.array([s.A1, s.A2]) - x0) <= 1e-12 * np.linalg.norm(x0)


def test_singular_system_reports_condition():
    m = np.array([[1.0, 2, 0, 0], [2, 4, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    with pytest.raises(DegenerateSteadyStateError) as exc:
        solve_steady_state(m, np.ones(4))
    assert exc.value.condition > 1e12
    with pytest.raises(DegenerateSteadyStateError):
        solve_steady_state(np.zeros((4, 4)), np.ones(4))


def test_rates_zero_at_origin(op):
    g = langevin_rates(SteadyState(0j, 0j, 0.0), op.coupling)
    assert not g.as_array().any()


def test_rates_zero_without_coupling():
    g = langevin_rates(SteadyState(1 + 2j, 3 - 1j, 0.0), ZERO_C)
    assert not g.as_array().any()


def test_g_a11_substitution():
    g = langevin_rates(SteadyState(0j, 1 + 0j, 0.0), unit_coupling("gN11"))
    assert g.g_a11 == -4j


@pytest.mark.parametrize(
    "name, A1, A2, field, expected",
    [
        ("gN61", 1 + 2j, 0j, "g_a12", 2 * (1 - 2j)),
        ("gN61", 0j, 3 + 0j, "g_a13", 12),
        ("gN51", 0j, 2 + 0j, "g_a23", 8),
        ("gN61", 0.5 + 2j, 0j, "g_a24", -4j),
        ("gN31", 0j, 1 + 0j, "g_a22", 12j),
        ("gN21", 0j, 1 + 0j, "g_a21", 2j),
    ],
)
def test_rate_lines(name, A1, A2, field, expected):
    g = langevin_rates(SteadyState(A1, A2, 0.0), unit_coupling(name))
    assert getattr(g, field) == pytest.approx(expected)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(-5, 5), min_size=12, max_size=12),
    st.tuples(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3)),
)
def test_rates_superpose(vals, amps):
    s = SteadyState(complex(amps[0], amps[1]), complex(amps[2], amps[3]), 0.0)
    c1 = CouplingConstants(*vals[:6])
    c2 = CouplingConstants(*vals[6:])
    c12 = CouplingConstants(*(a + b for a, b in zip(vals[:6], vals[6:])))
    lhs = langevin_rates(s, c12).as_array()
    rhs = langevin_rates(s, c1).as_array() + langevin_rates(s, c2).as_array()
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)


def test_rates_double_with_gn2(op):
    s = op.steady
    a = langevin_rates(s, op.coupling).as_array()
    b = langevin_rates(s, op.coupling.scaled(2.0)).as_array()
    np.testing.assert_array_equal(b, 2 * a)


def test_unperturbed_energies(op):
    d = op.derived
    for j in range(4):
        e1, e2 = energy_levels(j, j, op.steady, ZERO_C, d.omega1, d.omega2)
        assert e1 == d.omega1 * (j + 0.5)
        assert e2 == d.omega2 * (j + 0.5)


def test_second_oscillator_ground_shift(op):
    d, c = op.derived, op.coupling
    _, e2 = energy_levels(0, 0, op.steady, c, d.omega1, d.omega2)
    assert e2 - d.omega2 / 2 == pytest.approx(2j * c.gN41)


def test_energy_shift_linear_in_gn2(op):
    d, c, s = op.derived, op.coupling, op.steady
    base = np.array(energy_levels(2, 3, s, ZERO_C, d.omega1, d.omega2))
    one = np.array(energy_levels(2, 3, s, c, d.omega1, d.omega2)) - base
    two = np.array(energy_levels(2, 3, s, c.scaled(2.0), d.omega1, d.omega2)) - base
    np.testing.assert_allclose(two, 2 * one, rtol=1e-9)


def test_energy_real_parts_increase(op):
    d, c, s = op.derived, op.coupling.scaled(50.0), op.steady
    for idx in (0, 1):
        re = [energy_levels(j, j, s, c, d.omega1, d.omega2)[idx].real for j in range(10)]
        assert all(b > a for a, b in zip(re, re[1:]))


def test_energy_rejects_bad_level(op):
    with pytest.raises(ValueError):
        energy_levels(-1, 0, op.steady, op.coupling, 1.0, 1.0)
