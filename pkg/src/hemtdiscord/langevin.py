"""Linearized quantum Langevin fluctuations in the frequency domain.

Fluctuations are ordered as u = (da1, da1^+, da2, da2^+). At each probe
frequency the equations read ``M(w) u = L u_in`` with a diagonal drive
matrix ``L``; rows 2 and 4 of ``M`` are the conjugate partners of rows 1 and
3 (conjugate every coefficient and swap each a <-> a^+ column pair). Moments
are per-frequency algebraic values: input correlators are ``N + 1`` and
``N`` with the delta-function normalization dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar, k as k_B

from .errors import ResonanceSingularityError
from .params import DerivedConstants, DeviceParams
from .steady import GammaRates

MAX_CONDITION = 1e12
_CONJ_PERM = [1, 0, 3, 2]


@dataclass(frozen=True)
class BathSpec:
    N1: float
    N2: float
    kappa1: float
    kappa2: float

    def __post_init__(self):
        if self.N1 < 0 or self.N2 < 0:
            raise ValueError("thermal occupancies must be non-negative")


@dataclass(frozen=True)
class SpectralMoments:
    """Fluctuation and output moments; array-valued when evaluated on a grid.

    ``n1``/``n2`` are the real parts of the assembled correlators;
    ``n_imag`` keeps the largest imaginary residue as a Hermiticity check.
    """

    n1: np.ndarray
    n2: np.ndarray
    d12: np.ndarray
    n_o1: np.ndarray
    n_o2: np.ndarray
    d_o12: np.ndarray
    n_imag: np.ndarray


def thermal_occupancy(omega, T):
    """Bose-Einstein occupancy ``1 / (exp(hbar w / kB T) - 1)``.

    Works on scalars or arrays. ``T = 0`` gives exactly 0.
    """
    omega = np.asarray(omega, dtype=float)
    T = np.asarray(T, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("thermal_occupancy needs omega > 0")
    if np.any(T < 0):
        raise ValueError("thermal_occupancy needs T >= 0")
    with np.errstate(divide="ignore", over="ignore"):
        x = hbar * omega / (k_B * T)
        occ = np.where(T > 0, 1.0 / np.expm1(x), 0.0)
    return occ[()] if occ.ndim == 0 else occ


def bath_spec(p: DeviceParams, d: DerivedConstants) -> BathSpec:
    """Thermal baths evaluated at each oscillator's own resonance."""
    return BathSpec(
        N1=float(thermal_occupancy(d.omega1, p.T)),
        N2=float(thermal_occupancy(d.omega2, p.bath_T2)),
        kappa1=p.kappa1,
        kappa2=p.kappa2,
    )


def drive_matrix(bath: BathSpec) -> np.ndarray:
    r1, r2 = np.sqrt(2 * bath.kappa1), np.sqrt(2 * bath.kappa2)
    return np.diag([r1, r1, r2, r2]).astype(complex)


def build_fluctuation_matrix(omega, d: DerivedConstants, g: GammaRates, bath: BathSpec) -> np.ndarray:
    """Coefficient matrix ``M(w)``; shape (..., 4, 4) for array ``omega``."""
    omega = np.asarray(omega, dtype=float)
    d1 = omega - d.omega1
    d2 = omega - d.omega2
    k1, k2 = bath.kappa1, bath.kappa2
    zero = np.zeros_like(omega, dtype=complex)

    row1 = np.stack(
        [
            1j * d1 + k1 / 2 - g.g_a11,
            zero - (g.g_a11 + g.g_a13),
            zero - g.g_a12,
            zero - g.g_a12,
        ],
        axis=-1,
    )
    row3 = np.stack(
        [
            zero - (g.g_a21 + g.g_a24),
            zero + (g.g_a21 - g.g_a24),
            1j * d2 + k2 / 2 - g.g_a22 - g.g_a23,
            zero - (g.g_a22 + g.g_a23),
        ],
        axis=-1,
    )
    row2 = np.conj(row1[..., _CONJ_PERM])
    row4 = np.conj(row3[..., _CONJ_PERM])
    return np.stack([row1, row2, row3, row4], axis=-2)


def input_correlations(bath: BathSpec) -> np.ndarray:
    """``C[k, l] = <u_in,k u_in,l>`` for independent thermal ports."""
    c = np.zeros((4, 4))
    c[0, 1] = bath.N1 + 1
    c[1, 0] = bath.N1
    c[2, 3] = bath.N2 + 1
    c[3, 2] = bath.N2
    return c


def moments_from_scattering(S: np.ndarray, bath: BathSpec) -> SpectralMoments:
    """Second moments from scattering coefficients ``S = M^-1 L``."""
    C = input_correlations(bath)

    def corr(row_a, row_b):
        return np.einsum("...i,ij,...j->...", S[..., row_a, :], C, S[..., row_b, :])

    n1c = corr(1, 0)
    n2c = corr(3, 2)
    d12 = corr(0, 2)
    n1, n2 = n1c.real, n2c.real
    k1, k2 = bath.kappa1, bath.kappa2
    return SpectralMoments(
        n1=n1,
        n2=n2,
        d12=d12,
        n_o1=2 * k1 * n1 + bath.N1,
        n_o2=2 * k2 * n2 + bath.N2,
        d_o12=2 * np.sqrt(k1 * k2) * d12,
        n_imag=np.maximum(np.abs(n1c.imag), np.abs(n2c.imag)),
    )


def fluctuation_moments(omega, d: DerivedConstants, g: GammaRates, bath: BathSpec) -> SpectralMoments:
    """Solve the fluctuation equations and assemble the moments.

    Raises
    ------
    ResonanceSingularityError
        If ``M(w)`` is singular (condition number above 1e12) at any probe
        frequency; ``omega`` on the exception is the first offending value.
    """
    omega = np.asarray(omega, dtype=float)
    M = build_fluctuation_matrix(omega, d, g, bath)
    cond = np.linalg.cond(M)
    bad = ~(cond < MAX_CONDITION)
    if np.any(bad):
        w_bad = float(np.atleast_1d(omega)[np.flatnonzero(np.atleast_1d(bad))[0]])
        raise ResonanceSingularityError(
            f"fluctuation resonance singularity at omega = {w_bad:.9g} rad/s", w_bad
        )
    L = drive_matrix(bath)
    S = np.linalg.solve(M, np.broadcast_to(L, M.shape))
    return moments_from_scattering(S, bath)


def singular_mask(omega, d: DerivedConstants, g: GammaRates, bath: BathSpec) -> np.ndarray:
    """Boolean mask of probe frequencies where ``M(w)`` is numerically singular."""
    M = build_fluctuation_matrix(np.asarray(omega, dtype=float), d, g, bath)
    return ~(np.linalg.cond(M) < MAX_CONDITION)
