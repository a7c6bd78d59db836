"""Reference computations that share no code with the production solvers.

Used by the self-check and the test suite: a closed-form cofactor inverse of
4x4 matrices, exact rational determinants, and a Williamson decomposition
of a general covariance matrix via the eigenvalues of ``i Omega V``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations

import numpy as np


def _det3(m):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def _minor(m, i, j):
    return [[m[r][c] for c in range(4) if c != j] for r in range(4) if r != i]


def det4(m) -> complex:
    """Laplace expansion along the first row."""
    m = [list(row) for row in m]
    return sum((-1) ** j * m[0][j] * _det3(_minor(m, 0, j)) for j in range(4))


def adjugate_inverse(m) -> np.ndarray:
    """Inverse of a 4x4 matrix as ``adj(m) / det(m)``, entry by entry."""
    rows = [list(row) for row in np.asarray(m).tolist()]
    det = det4(rows)
    if det == 0:
        raise ZeroDivisionError("singular matrix")
    inv = [[(-1) ** (i + j) * _det3(_minor(rows, j, i)) / det for j in range(4)] for i in range(4)]
    return np.array(inv)


def exact_det(m) -> Fraction:
    """Leibniz determinant over the exact rationals of the float entries."""
    q = [[Fraction(float(x)) for x in row] for row in np.asarray(m, dtype=float)]
    n = len(q)
    total = Fraction(0)
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Fraction(1)
        for i, p in enumerate(perm):
            term *= q[i][p]
        total += -term if inversions % 2 else term
    return total


def williamson_spectrum(V) -> np.ndarray:
    """Sorted symplectic eigenvalues of a 4x4 CM in (x1, p1, x2, p2) order."""
    omega = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    ev = np.abs(np.linalg.eigvals(1j * omega @ np.asarray(V, dtype=float)))
    return np.sort(ev)[::2]


def partial_transpose(V) -> np.ndarray:
    """Flip the second mode's momentum."""
    P = np.diag([1.0, 1.0, 1.0, -1.0])
    return P @ np.asarray(V, dtype=float) @ P


def thermal_entropy(n: float) -> float:
    """Entropy (bits) of a thermal state with mean occupancy ``n``."""
    if n <= 0:
        return 0.0
    return float((n + 1) * np.log2(n + 1) - n * np.log2(n))
