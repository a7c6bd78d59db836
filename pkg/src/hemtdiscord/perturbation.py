"""First-order level mixing, a mixedness indicator and the squeezing rate.

All coupling coefficients are rates (rad/s) with hbar factored out, and
level energies are divided by hbar as well, so every correction amplitude
is a plain dimensionless ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateLevelError
from .params import CouplingConstants
from .steady import SteadyState, energy_levels

_DEGENERACY_RTOL = 1e-18


@dataclass(frozen=True)
class PerturbationCoefficients:
    """Matrix-element prefactors of the nonlinear Hamiltonian.

    ``jp11``-``jp13`` act on the first oscillator with the second mode at its
    steady-state amplitude; ``jp21``-``jp212`` act on the second oscillator.
    """

    jp11: complex
    jp12: complex
    jp13: complex
    jp21: complex
    jp22: complex
    jp23: complex
    jp24: complex
    jp25: complex
    jp26: complex
    jp27: complex
    jp28: complex
    jp29: complex
    jp210: complex
    jp211: complex
    jp212: complex

    def scaled(self, factor: float) -> "PerturbationCoefficients":
        return PerturbationCoefficients(
            **{k: v * factor for k, v in self.__dict__.items()}
        )


@dataclass(frozen=True)
class StateCorrection:
    oscillator: int
    base_level: int
    terms: tuple[tuple[int, complex], ...] = ()
    # imaginary parts of E_{j+k} - E_j, dropped from the denominators
    energy_imag: tuple[tuple[int, float], ...] = field(default=(), compare=False)

    def __post_init__(self):
        offsets = [k for k, _ in self.terms]
        if len(set(offsets)) != len(offsets):
            raise ValueError("correction offsets must be unique")
        allowed = {1: {-2, -1, 1, 2}, 2: {-3, -2, -1, 1, 2, 3}}[self.oscillator]
        if not set(offsets) <= allowed:
            raise ValueError(f"offsets {offsets} not allowed for oscillator {self.oscillator}")
        if any(self.base_level + k < 0 for k in offsets):
            raise ValueError("correction reaches a negative level")

    @property
    def offsets(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.terms)


@dataclass(frozen=True)
class SqueezingReport:
    zeta12: complex
    t_max: float
    effective_r: float


def perturbation_coefficients(c: CouplingConstants, s: SteadyState) -> PerturbationCoefficients:
    """Coupling prefactors for both oscillators.

    For the first oscillator the second mode is replaced by its steady-state
    amplitude: the a1^2 and a1^+2 terms give ``-2 Re(A2) (gN11 +- i gN61)``
    and the single-photon term gives ``4i gN41 Re(A2)^2``.
    The printed duplicate ``jp27 = jp27`` is read as ``jp27 = jp29 = gN31``.
    """
    reA2 = s.A2.real
    imA1 = s.A1.imag
    a1c = s.A1.conjugate()
    g21, g31, g41, g51, g61 = c.gN21, c.gN31, c.gN41, c.gN51, c.gN61
    jp211 = complex(-2 * g41 * imA1)
    return PerturbationCoefficients(
        jp11=-2 * reA2 * complex(c.gN11, g61),
        jp12=-2 * reA2 * complex(c.gN11, -g61),
        jp13=complex(0.0, 4 * g41 * reA2**2),
        jp21=complex(g21 + g31, g51),
        jp22=complex(g21 + g31, -g51),
        jp23=-g21 + 4 * g61 * a1c + 1j * g51,
        jp24=-g21 + 4 * g61 * a1c - 1j * g51,
        jp25=complex(g21 + g31, g51),
        jp26=complex(g21 + g31, -g51),
        jp27=complex(g31),
        jp28=complex(g31, 2 * g51),
        jp29=complex(g31),
        jp210=complex(g31, -2 * g51),
        jp211=jp211,
        jp212=jp211,
    )


def matrix_elements(oscillator: int, j: int, k: PerturbationCoefficients) -> dict[int, complex]:
    """Off-diagonal elements <j+offset|H_N|j>/hbar at each printed offset,
    without ladder factors."""
    if oscillator == 1:
        return {-2: k.jp11, 2: k.jp12, -1: k.jp13, 1: -k.jp13}
    if oscillator == 2:
        return {
            -3: k.jp21,
            3: k.jp21,
            -1: k.jp23 + k.jp27 + 1j * (k.jp26 + k.jp27 + k.jp28),
            1: k.jp24 + k.jp25 + 1j * (k.jp25 + k.jp29 + k.jp210),
            2: k.jp211,
            -2: k.jp212,
        }
    raise ValueError("oscillator must be 1 or 2")


def ladder_factor(j: int, offset: int) -> float:
    """|<j+offset| (a^+)^offset |j>| or its lowering counterpart."""
    lo, hi = sorted((j, j + offset))
    return math.sqrt(math.prod(range(lo + 1, hi + 1)))


def level_energy_fn(oscillator: int, s: SteadyState, c: CouplingConstants, omega1: float, omega2: float):
    """Map level index -> complex energy (rad/s) of the chosen oscillator."""
    idx = oscillator - 1
    if oscillator not in (1, 2):
        raise ValueError("oscillator must be 1 or 2")
    return lambda j: energy_levels(j, j, s, c, omega1, omega2)[idx]


def first_order_state(oscillator: int, j: int, k: PerturbationCoefficients, energies) -> StateCorrection:
    """First-order corrected ket around level ``j``.

    ``energies`` maps a level index to its complex energy. Amplitudes are
    ``element * ladder / Re(E_{j+k} - E_j)``; terms reaching below the
    ground state and terms with an exactly zero element are omitted.

    Raises
    ------
    DegenerateLevelError
        If an energy gap is negligible against the level energy scale.
    """
    if j < 0 or int(j) != j:
        raise ValueError("level index must be a non-negative integer")
    e_j = energies(j)
    terms = []
    imag = []
    for offset, element in sorted(matrix_elements(oscillator, j, k).items()):
        if j + offset < 0 or element == 0:
            continue
        gap = energies(j + offset) - e_j
        scale = max(abs(e_j), abs(energies(j + offset)))
        if abs(gap.real) <= _DEGENERACY_RTOL * scale:
            raise DegenerateLevelError(
                f"degenerate level: oscillator {oscillator}, levels {j} and {j + offset}"
            )
        terms.append((offset, element * ladder_factor(j, offset) / gap.real))
        imag.append((offset, gap.imag))
    return StateCorrection(oscillator, j, tuple(terms), tuple(imag))


def renormalized_state(corr: StateCorrection) -> dict[int, complex]:
    """Level -> amplitude of the normalized corrected state."""
    amps = {corr.base_level: 1.0 + 0j}
    amps.update({corr.base_level + k: v for k, v in corr.terms})
    norm = math.sqrt(math.fsum(abs(v) ** 2 for v in amps.values()))
    return {level: v / norm for level, v in sorted(amps.items())}


def mixedness_indicator(corr: StateCorrection) -> float:
    """Population leaked out of the base level after renormalization."""
    leak = math.fsum(abs(v) ** 2 for _, v in corr.terms)
    return leak / (1.0 + leak)


def squeezing_parameter(s: SteadyState, c: CouplingConstants, kappa1: float, kappa2: float) -> SqueezingReport:
    """``zeta12 = -2 gN11 Im(A1) + 2 gN41 Re(A2) + 2 gN61 Re(A1)``.

    The interaction time is capped at 90% of the shorter ring-down time.
    """
    zeta = -2 * c.gN11 * s.A1.imag + 2 * c.gN41 * s.A2.real + 2 * c.gN61 * s.A1.real
    t_max = 0.9 * min(1.0 / kappa1, 1.0 / kappa2)
    return SqueezingReport(zeta12=complex(zeta), t_max=t_max, effective_r=abs(zeta) * t_max)


def zeta12_abs(A1, A2, c: CouplingConstants):
    """Vectorized ``|zeta12|`` for arrays of steady-state amplitudes."""
    A1 = np.asarray(A1)
    A2 = np.asarray(A2)
    return np.abs(-2 * c.gN11 * A1.imag + 2 * c.gN41 * A2.real + 2 * c.gN61 * A1.real)
