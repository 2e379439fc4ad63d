"""Wigner rotation matrices (M-gates).

Matrices are indexed by M from +J down to -J along both axes. The full matrix
is D_{M M'}(alpha, beta, gamma) = exp(-i M alpha) d_{M M'}(beta) exp(-i M' gamma).
The reduced matrix d^J is built from 2J copies of the spin-1/2 matrix as a
symmetric multiplet of spin-1/2 constituents.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InputError
from .exact import check_j

__all__ = [
    "RotationSpec",
    "d_half",
    "D_half",
    "wigner_d",
    "wigner_D",
    "u_matrix",
    "compose_rotations",
    "euler_from_su2",
    "fermionic_D",
    "bosonic_D",
    "m_values",
    "symmetric_multiplet",
]

TWO_PI = 2 * math.pi


def m_values(two_j: int) -> list[int]:
    """two_m from +two_j down to -two_j."""
    return list(range(two_j, -two_j - 1, -2))


@dataclass(frozen=True)
class RotationSpec:
    """A rotation given either by Euler angles or by axis and angle.

    Use :meth:`euler` or :meth:`axis_angle` to construct. Angles are in radians.
    For axis-angle, ``theta`` and ``phi`` are the polar angles of the axis and
    ``omega`` the rotation angle.
    """

    kind: str
    angles: tuple[float, float, float]

    def __post_init__(self):
        if self.kind not in ("euler", "axis"):
            raise InputError(f"unknown rotation kind {self.kind!r}")
        if len(self.angles) != 3 or not all(math.isfinite(a) for a in self.angles):
            raise InputError(f"rotation angles must be three finite numbers, got {self.angles!r}")

    @classmethod
    def euler(cls, alpha: float, beta: float, gamma: float) -> "RotationSpec":
        return cls("euler", (float(alpha), float(beta), float(gamma)))

    @classmethod
    def axis_angle(cls, omega: float, theta: float, phi: float) -> "RotationSpec":
        return cls("axis", (float(omega), float(theta), float(phi)))

    @classmethod
    def identity(cls) -> "RotationSpec":
        return cls.euler(0.0, 0.0, 0.0)

    def su2(self) -> np.ndarray:
        """The spin-1/2 matrix of this rotation."""
        return wigner_D(1, self)

    def to_euler(self) -> "RotationSpec":
        """Equivalent Euler form (alpha, gamma in [0, 2pi), beta in [0, pi] or [2pi, 3pi])."""
        if self.kind == "euler":
            return self
        return euler_from_su2(self.su2())


def d_half(beta: float) -> np.ndarray:
    """Reduced spin-1/2 matrix, rows and columns ordered (+1/2, -1/2)."""
    c, s = math.cos(beta / 2), math.sin(beta / 2)
    return np.array([[c, -s], [s, c]])


def D_half(alpha: float, beta: float, gamma: float) -> np.ndarray:
    ea, eg = cmath.exp(-0.5j * alpha), cmath.exp(-0.5j * gamma)
    phase_row = np.array([ea, 1 / ea])
    phase_col = np.array([eg, 1 / eg])
    return phase_row[:, None] * d_half(beta) * phase_col[None, :]


def symmetric_multiplet(two_j: int, u, sqrt=math.sqrt) -> list[list]:
    """Spin-J matrix of the symmetric multiplet of 2J spin-1/2 factors with matrix u.

    Entry (M, M') sums the product of 2J elements of u over all pairs of
    spin-1/2 strings with projections M and M'. For a fixed primed string the
    strings are grouped by the number k of positions that are up in both, so
    the count is binom(J+M', k) binom(J-M', J+M-k). The full double sum is
    rescaled by sqrt((J+M)!(J-M)!(J+M')!(J-M')!)/(2J)!.

    Works on any element type supporting + and *, e.g. sympy expressions
    with ``sqrt=sympy.sqrt``. Returns nested lists ordered M = +J .. -J.
    """
    n = two_j
    dim = n + 1
    upp, upm, ump, umm = u[0][0], u[0][1], u[1][0], u[1][1]
    out = []
    for r in range(dim):
        p = n - r  # number of up factors in the unprimed string, J + M
        row = []
        for c in range(dim):
            q = n - c  # J + M'
            total = 0
            for k in range(max(0, p + q - n), min(p, q) + 1):
                count = math.comb(q, k) * math.comb(n - q, p - k)
                total += count * upp**k * upm ** (p - k) * ump ** (q - k) * umm ** (n - p - q + k)
            # the sum above is for one primed string; binom(2J, J+M') strings contribute equally
            row.append(total * sqrt(Fraction(math.comb(n, q), math.comb(n, p))))
        out.append(row)
    return out


def _grouped_symmetric_sum(two_j: int, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    return np.array(symmetric_multiplet(two_j, u.tolist(), sqrt=math.sqrt), dtype=complex).reshape(two_j + 1, two_j + 1)


def fermionic_D(two_j: int, u: np.ndarray) -> np.ndarray:
    """D^J from the spin-1/2 matrix ``u`` as a symmetric multiplet of 2J spins 1/2."""
    check_j(two_j)
    return _grouped_symmetric_sum(two_j, np.asarray(u, dtype=complex))


def bosonic_D(n_spins: int, rot: "RotationSpec") -> np.ndarray:
    """D^N for N spins 1 coupled symmetrically, from the spin-1 matrices.

    Sums the products of N spin-1 elements weighted by
    sqrt((1 + delta_{m,0})(1 + delta_{m',0})) for each factor, then applies
    the symmetric-multiplet weight sqrt((J+M)!(J-M)!(J+M')!(J-M')!)/(2J)!.
    Brute force over 3^N projection strings.
    """
    if n_spins < 1:
        raise InputError("need at least one spin")
    d1 = wigner_D(2, rot)
    ms = (1, 0, -1)
    J = n_spins
    out = np.zeros((2 * J + 1, 2 * J + 1), dtype=complex)
    weight = {1: 1.0, 0: math.sqrt(2.0), -1: 1.0}
    for left in itertools.product(range(3), repeat=n_spins):
        M = sum(ms[i] for i in left)
        wl = math.prod(weight[ms[i]] for i in left)
        for right in itertools.product(range(3), repeat=n_spins):
            Mp = sum(ms[i] for i in right)
            wr = math.prod(weight[ms[i]] for i in right)
            out[J - M, J - Mp] += wl * wr * math.prod(d1[a, b] for a, b in zip(left, right))
    for M in range(J, -J - 1, -1):
        for Mp in range(J, -J - 1, -1):
            delta = math.sqrt(math.factorial(J + M) * math.factorial(J - M)
                              * math.factorial(J + Mp) * math.factorial(J - Mp)) / math.factorial(2 * J)
            out[J - M, J - Mp] *= delta
    return out


@lru_cache(maxsize=4096)
def _wigner_d_cached(two_j: int, beta: float) -> np.ndarray:
    d = _grouped_symmetric_sum(two_j, d_half(beta).astype(complex)).real
    d.setflags(write=False)
    return d


def wigner_d(two_j: int, beta: float) -> np.ndarray:
    """Reduced rotation matrix d^J(beta), real orthogonal, order +J .. -J."""
    check_j(two_j)
    return _wigner_d_cached(two_j, float(beta)).copy()


def _euler_D(two_j: int, alpha: float, beta: float, gamma: float) -> np.ndarray:
    ms = np.array(m_values(two_j)) / 2
    return np.exp(-1j * ms * alpha)[:, None] * wigner_d(two_j, beta) * np.exp(-1j * ms * gamma)[None, :]


def u_matrix(two_j: int, omega: float, theta: float, phi: float) -> np.ndarray:
    """exp(-i omega n.J) for the axis n(theta, phi), via D(phi, theta, -phi) diag D(phi, -theta, -phi)."""
    check_j(two_j)
    ms = np.array(m_values(two_j)) / 2
    left = _euler_D(two_j, phi, theta, -phi)
    right = _euler_D(two_j, phi, -theta, -phi)
    return left @ np.diag(np.exp(-1j * ms * omega)) @ right


def wigner_D(two_j: int, rot: RotationSpec) -> np.ndarray:
    """Unitary rotation matrix D^J for an Euler or axis-angle specification."""
    check_j(two_j)
    if not isinstance(rot, RotationSpec):
        rot = RotationSpec.euler(*rot)
    if rot.kind == "euler":
        return _euler_D(two_j, *rot.angles)
    return u_matrix(two_j, *rot.angles)


def euler_from_su2(u: np.ndarray, tol: float = 1e-12) -> RotationSpec:
    """Euler angles of a spin-1/2 matrix.

    alpha, gamma lie in [0, 2pi). beta lies in [0, pi], or in [2pi, 3pi] when
    the matrix is minus the one obtained with beta in [0, pi]; the shift by 2pi
    flips the sign of every half-integer representation and none of the
    integer ones. At beta = 0 or pi the angle gamma is set to 0.
    """
    u = np.asarray(u, dtype=complex)
    cos_half, sin_half = abs(u[0, 0]), abs(u[1, 0])
    beta = 2 * math.atan2(sin_half, cos_half)
    if sin_half < tol:
        alpha, gamma = (-2 * cmath.phase(u[0, 0])) % TWO_PI, 0.0
    elif cos_half < tol:
        alpha, gamma = (2 * cmath.phase(u[1, 0])) % TWO_PI, 0.0
    else:
        # arg u00 = -(alpha+gamma)/2, arg u10 = (alpha-gamma)/2
        p00, p10 = cmath.phase(u[0, 0]), cmath.phase(u[1, 0])
        alpha = (p10 - p00) % TWO_PI
        gamma = (-p00 - p10) % TWO_PI
    trial = D_half(alpha, beta, gamma)
    if np.abs(trial + u).max() < np.abs(trial - u).max():
        beta += TWO_PI
    return RotationSpec.euler(alpha, beta, gamma)


def compose_rotations(r1: RotationSpec, r2: RotationSpec) -> RotationSpec:
    """Rotation r with D(r) = D(r1) D(r2) in every representation."""
    return euler_from_su2(wigner_D(1, r1) @ wigner_D(1, r2))
