"""Two-mode Gaussian state in standard form and its correlation quantifiers.

Convention: vacuum has unit quadrature variance, so a thermal mode with
occupancy n has variance 2n + 1 and a symplectic eigenvalue of 1 marks a
pure mode. The standard-form covariance matrix is

    V = [[a I, c Z], [c Z, b I]],  I = diag(1, 1),  Z = diag(1, -1).

All functions accept scalars or equally-shaped arrays for (a, b, c).
Discord is the one-way Gaussian discord with the measurement on mode B
(heterodyne), classical correlation is its complement in the mutual
information, and all entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .errors import DegenerateChannelError, DomainError, NonPhysicalStateError
from .langevin import SpectralMoments

PHYS_TOL = 1e-9
DOMAIN_TOL = 1e-6
_LN2 = np.log(2.0)

# sign of the 2c^2 term in the partially transposed seralian; the self-check
# flips it to prove the PT checks can fail
_PT_SIGN = 1.0


@dataclass(frozen=True)
class TwoModeCM:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    tau: np.ndarray
    eta: np.ndarray

    def matrix(self) -> np.ndarray:
        """Full 4x4 covariance matrix (scalar CM only)."""
        a, b, c = float(self.a), float(self.b), float(self.c)
        return np.array(
            [
                [a, 0.0, c, 0.0],
                [0.0, a, 0.0, -c],
                [c, 0.0, b, 0.0],
                [0.0, -c, 0.0, b],
            ]
        )


@dataclass(frozen=True)
class CorrelationReport:
    discord: np.ndarray
    classical: np.ndarray
    mutual: np.ndarray
    nu_minus: np.ndarray
    nu_plus: np.ndarray
    d_tilde: np.ndarray
    entangled: np.ndarray


def _scalarize(x):
    x = np.asarray(x)
    return x[()] if x.ndim == 0 else x


def make_cm(a, b, c) -> TwoModeCM:
    """Standard-form CM from (a, b, c), filling the channel parameters.

    ``tau = c^2 / (b^2 - 1)`` and ``eta = a - tau b``; for ``b = 1`` (mode B
    pure) they are only defined when ``c = 0``, where tau = 0 and eta = a.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    if np.any(a < 1 - PHYS_TOL) or np.any(b < 1 - PHYS_TOL):
        raise NonPhysicalStateError("local variances must be >= 1 (vacuum)")
    flat = b <= 1.0
    if np.any(flat & (c != 0)):
        raise DegenerateChannelError("degenerate channel parametrization: b = 1 with c != 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        tau = np.where(flat, 0.0, c**2 / (b**2 - 1.0))
    eta = a - tau * b
    return TwoModeCM(*(_scalarize(v) for v in (a, b, c, tau, eta)))


def covariance_matrix(m: SpectralMoments) -> TwoModeCM:
    """CM of the output fields: ``a = 2 n_o1 + 1``, ``b = 2 n_o2 + 1``,
    ``c = 2 Re(d_o12)``."""
    n_o1 = np.asarray(m.n_o1, dtype=float)
    n_o2 = np.asarray(m.n_o2, dtype=float)
    if np.any(n_o1 < -PHYS_TOL) or np.any(n_o2 < -PHYS_TOL):
        raise NonPhysicalStateError("negative output occupancy")
    return make_cm(2 * n_o1 + 1, 2 * n_o2 + 1, 2 * np.real(m.d_o12))


def from_half_vacuum(a, b, c) -> TwoModeCM:
    """Adapter from the vacuum = 1/2 convention (``a = n + 0.5``)."""
    return make_cm(2 * np.asarray(a), 2 * np.asarray(b), 2 * np.asarray(c))


def to_half_vacuum(cm: TwoModeCM) -> tuple:
    return cm.a / 2, cm.b / 2, cm.c / 2


def entropy_h(x):
    """Von Neumann entropy (bits) of a mode with symplectic eigenvalue ``x``.

    ``f(x) = (x+1)/2 log2((x+1)/2) - (x-1)/2 log2((x-1)/2)``; values within
    1e-6 below 1 are clamped to 1.
    """
    x = np.asarray(x, dtype=float)
    bad = ~(x >= 1 - DOMAIN_TOL)
    if np.any(bad):
        raise DomainError(f"entropy_h needs x >= 1, got {x[bad].flat[0]!r}")
    x = np.maximum(x, 1.0)
    p = (x + 1) / 2
    m = (x - 1) / 2
    return _scalarize((xlogy(p, p) - xlogy(m, m)) / _LN2)


def _det_v(a, b, c):
    # det of the standard form; both off-diagonal entries are +-c
    return (a * b - c**2) ** 2


def symplectic_eigenvalues(cm: TwoModeCM):
    """(nu_minus, nu_plus) from ``nu^2 = [D +- sqrt(D^2 - 4 det V)] / 2``.

    ``D = a^2 + b^2 - 2c^2``. The discriminant is evaluated in its factored
    form ``|a - b| sqrt((a+b)^2 - 4c^2)`` and the smaller root as
    ``det V / nu_plus^2``, which keeps pure states at exactly 1.
    """
    a, b, c = (np.asarray(v, dtype=float) for v in (cm.a, cm.b, cm.c))
    delta = a**2 + b**2 - 2 * c**2
    det = _det_v(a, b, c)
    inner = (a + b - 2 * np.abs(c)) * (a + b + 2 * np.abs(c))
    if np.any(inner < -PHYS_TOL * (a + b) ** 2):
        raise NonPhysicalStateError("non-physical CM: Delta^2 < 4 det V")
    root = np.abs(a - b) * np.sqrt(np.maximum(inner, 0.0))
    nu_plus_sq = (delta + root) / 2
    nu_minus_sq = det / nu_plus_sq
    # product states: the local variances are the symplectic values
    product = c == 0
    nu_m = np.where(product, np.minimum(a, b), np.sqrt(nu_minus_sq))
    nu_p = np.where(product, np.maximum(a, b), np.sqrt(nu_plus_sq))
    # for a = b the roots coincide and rounding may swap them
    return _scalarize(np.minimum(nu_m, nu_p)), _scalarize(np.maximum(nu_m, nu_p))


def pt_smaller_eigenvalue(cm: TwoModeCM):
    """Smaller symplectic eigenvalue of the partial transpose.

    Same construction with ``D~ = a^2 + b^2 + 2c^2``; the state is entangled
    iff the result is below 1.
    """
    a, b, c = (np.asarray(v, dtype=float) for v in (cm.a, cm.b, cm.c))
    delta_t = a**2 + b**2 + _PT_SIGN * 2 * c**2
    det = _det_v(a, b, c)
    root = (a + b) * np.sqrt((a - b) ** 2 + 4 * c**2)
    plus_sq = (delta_t + root) / 2
    d_t = np.where(c == 0, np.minimum(a, b), np.sqrt(det / plus_sq))
    return _scalarize(d_t)


def conditional_variance(cm: TwoModeCM):
    """``tau + eta = a - c^2 / (b + 1)``: A's symplectic value after
    heterodyne on B."""
    a, b, c = (np.asarray(v, dtype=float) for v in (cm.a, cm.b, cm.c))
    return _scalarize(np.where(c == 0, a, a - c**2 / (b + 1)))


def gaussian_discord(cm: TwoModeCM) -> CorrelationReport:
    """Discord, classical correlation and mutual information (bits).

    ``D = f(b) - f(nu-) - f(nu+) + f(tau + eta)``,
    ``C = f(a) - f(tau + eta)``, ``I = f(a) + f(b) - f(nu-) - f(nu+)``,
    so ``D + C = I`` identically.
    """
    nu_m, nu_p = symplectic_eigenvalues(cm)
    f_a, f_b = entropy_h(cm.a), entropy_h(cm.b)
    f_m, f_p = entropy_h(nu_m), entropy_h(nu_p)
    f_cond = entropy_h(conditional_variance(cm))
    # grouped so that product states cancel exactly
    joint = f_m + f_p
    discord = (f_b + f_cond) - joint
    classical = f_a - f_cond
    mutual = (f_a + f_b) - joint
    d_t = pt_smaller_eigenvalue(cm)
    return CorrelationReport(
        discord=_scalarize(discord),
        classical=_scalarize(classical),
        mutual=_scalarize(mutual),
        nu_minus=nu_m,
        nu_plus=nu_p,
        d_tilde=d_t,
        entangled=_scalarize(np.asarray(d_t) < 1.0),
    )
