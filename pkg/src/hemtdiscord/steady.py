"""Steady-state operating point of the two coupled oscillators.

The DC amplitudes come from a real 4x4 system in (Re A1, Im A1, Re A2, Im A2).
The linearization rates and the perturbed level energies are evaluated at
that point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar

from .errors import DegenerateSteadyStateError
from .params import CouplingConstants, DerivedConstants

MAX_CONDITION = 1e12


@dataclass(frozen=True)
class SteadyState:
    A1: complex
    A2: complex
    residual: float
    condition: float = float("nan")


@dataclass(frozen=True)
class GammaRates:
    g_a11: complex
    g_a12: complex
    g_a13: complex
    g_a21: complex
    g_a22: complex
    g_a23: complex
    g_a24: complex

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.g_a11, self.g_a12, self.g_a13, self.g_a21, self.g_a22, self.g_a23, self.g_a24],
            dtype=complex,
        )


def build_steady_system(
    d: DerivedConstants,
    kappa1: float,
    kappa2: float,
    delta1: float = 0.0,
    delta2: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Matrix and right-hand side for the unknowns (A1R, A1j, A2R, A2j)."""
    cross = 2.0 * d.g12prime * math.sqrt(d.Z2 / d.Z1)
    charge = 1.0 / (2.0 * d.Cq1q2 * math.sqrt(d.Z1 * d.Z2))
    g22p = d.g22prime
    matrix = np.array(
        [
            [-kappa1 / 2.0, delta1, cross, charge],
            [-delta1, kappa1 / 2.0, 0.0, 0.0],
            [0.0, charge, g22p - kappa2 / 2.0, delta2],
            [0.0, -cross, -delta2, -(g22p + kappa2 / 2.0)],
        ]
    )
    rhs = np.array(
        [
            -d.Vq1 * math.sqrt(1.0 / (2.0 * hbar * d.Z1)),
            -d.Igs_rms * math.sqrt(d.Z1 / (2.0 * hbar)),
            -d.Vq2 * math.sqrt(1.0 / (2.0 * hbar * d.Z2)),
            d.Ip2 * math.sqrt(d.Z2 / (2.0 * hbar)),
        ]
    )
    return matrix, rhs


def solve_steady_state(matrix: np.ndarray, rhs: np.ndarray) -> SteadyState:
    """Solve the real 4x4 steady-state system.

    Rows are equilibrated before factorization and the solution receives one
    step of iterative refinement, so the result does not depend on how the
    rows happen to be scaled.

    Raises
    ------
    DegenerateSteadyStateError
        If the equilibrated matrix has condition number above 1e12.
    """
    matrix = np.asarray(matrix, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    scale = np.max(np.abs(matrix), axis=1)
    if np.any(scale == 0) or not np.all(np.isfinite(matrix)):
        raise DegenerateSteadyStateError("degenerate steady state: zero or non-finite row", math.inf)
    # powers of two keep the equilibration exact
    scale = np.exp2(np.round(np.log2(scale)))
    eq = matrix / scale[:, None]
    b = rhs / scale
    cond = float(np.linalg.cond(eq))
    if not cond < MAX_CONDITION:
        raise DegenerateSteadyStateError(
            f"degenerate steady state (condition estimate {cond:.3g})", cond
        )
    x = np.linalg.solve(eq, b)
    x = x + np.linalg.solve(eq, b - eq @ x)
    residual = float(np.linalg.norm(matrix @ x - rhs))
    return SteadyState(A1=complex(x[0], x[1]), A2=complex(x[2], x[3]), residual=residual, condition=cond)


def langevin_rates(s: SteadyState, c: CouplingConstants) -> GammaRates:
    """Linearization rates around the steady state.

    The last rate, multiplying (da1 + da1^+) in the second oscillator's
    equation, is ``-2i gN61 Im(A1)``.
    """
    reA1, imA1 = s.A1.real, s.A1.imag
    reA2, imA2 = s.A2.real, s.A2.imag
    return GammaRates(
        g_a11=-4j * c.gN11 * reA2,
        g_a12=-4j * c.gN11 * reA1 - 4 * c.gN41 * reA2 + 2 * c.gN61 * s.A1.conjugate(),
        g_a13=complex(4 * c.gN61 * reA2),
        g_a21=-4 * c.gN11 * imA2 + 2j * c.gN21 * reA2 + 4 * c.gN41 * reA2 - 2 * c.gN61 * reA1,
        g_a22=(
            -2 * c.gN21 * imA1
            + 12j * c.gN31 * reA2
            + 4j * c.gN41 * imA1
            - 4 * c.gN51 * reA2
            + 4j * c.gN51 * imA2
        ),
        g_a23=complex(4 * c.gN51 * reA2),
        g_a24=-2j * c.gN61 * imA1,
    )


def energy_levels(
    j1: int,
    j2: int,
    s: SteadyState,
    c: CouplingConstants,
    omega1: float,
    omega2: float,
) -> tuple[complex, complex]:
    """First-order level energies (rad/s) of the two oscillators.

    The nonlinear shifts are complex as written: the first oscillator picks up
    ``2 gN11 Re(A2) - 2i gN61 Re(A2)`` and the second ``2i gN41 (2 j2 + 1)``.
    Real parts are therefore strictly increasing in level index for every gN2.
    """
    if j1 < 0 or j2 < 0 or int(j1) != j1 or int(j2) != j2:
        raise ValueError("level indices must be non-negative integers")
    reA2 = s.A2.real
    E1 = omega1 * (j1 + 0.5) + (2 * c.gN11 * reA2 - 2j * c.gN61 * reA2)
    E2 = omega2 * (j2 + 0.5) + 1j * (2 * c.gN41 * (2 * j2 + 1))
    return complex(E1), complex(E2)
