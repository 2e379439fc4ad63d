"""Classical-limit formulas for 6j symbols and rotation probabilities.

Edge lengths follow the 6j layout {j1 j2 j3; j4 j5 j6}. The tetrahedron is
embedded with v0 at the origin, v1 on the x axis, v2 in the xy plane and v3
above it, so that v0v1 = j1, v1v2 = j2, v0v2 = j3, v2v3 = j4, v0v3 = j5 and
v1v3 = j6. The faces are then exactly the four triads of the symbol and
columns of the symbol hold opposite edges.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, NonEuclideanError
from .wigner import triangle_ok, wigner_6j

__all__ = [
    "TetGeometry",
    "EDGE_VERTICES",
    "cayley_menger_volume_squared",
    "tet_geometry",
    "wigner_limit_ratio",
    "prob_recoupling_e",
    "exact_prob_e",
    "prob_M",
    "prob_M_poly",
    "gaussian_limit",
    "ponzano_regge_estimate",
    "pr_sweep",
    "wigner_sweep",
    "sweep_csv",
    "calibrate",
    "median_error",
    "load_calibration",
]

EDGE_VERTICES = ((0, 1), (1, 2), (0, 2), (2, 3), (0, 3), (1, 3))
# the two faces (as opposite vertices) that meet along each edge
_FACES = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))


def _det_fraction(m: list[list[Fraction]]) -> Fraction:
    m = [row[:] for row in m]
    n = len(m)
    det = Fraction(1)
    for i in range(n):
        pivot = next((r for r in range(i, n) if m[r][i] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != i:
            m[i], m[pivot] = m[pivot], m[i]
            det = -det
        det *= m[i][i]
        for r in range(i + 1, n):
            factor = m[r][i] / m[i][i]
            if factor:
                for c in range(i, n):
                    m[r][c] -= factor * m[i][c]
    return det


def cayley_menger_volume_squared(lengths: Sequence):
    """V^2 from the Cayley-Menger determinant, 288 V^2 = det(CM).

    Exact (a Fraction) when every length is an int or Fraction, float otherwise.
    """
    if len(lengths) != 6:
        raise InputError("a tetrahedron has six edges")
    exact = all(isinstance(x, (int, Fraction)) for x in lengths)
    d2 = [[0] * 4 for _ in range(4)]
    for (i, j), length in zip(EDGE_VERTICES, lengths):
        sq = Fraction(length) ** 2 if exact else float(length) ** 2
        d2[i][j] = d2[j][i] = sq
    cm = [[0, 1, 1, 1, 1]] + [[1] + row for row in d2]
    if exact:
        return _det_fraction([[Fraction(x) for x in row] for row in cm]) / 288
    return float(np.linalg.det(np.array(cm, dtype=float))) / 288


@dataclass(frozen=True)
class TetGeometry:
    """Euclidean tetrahedron with its embedding and exterior dihedral angles.

    ``theta[r]`` is the angle between the outer normals of the two faces
    sharing edge r, in (0, pi).
    """

    lengths: tuple
    volume_squared: object
    volume: float
    vertices: np.ndarray
    theta: tuple

    def edge_residual(self) -> float:
        """Largest mismatch between embedded and requested edge lengths."""
        v = self.vertices
        return max(abs(np.linalg.norm(v[i] - v[j]) - float(x))
                   for (i, j), x in zip(EDGE_VERTICES, self.lengths))


def _embed(lengths) -> np.ndarray:
    e1, e2, e3, e4, e5, e6 = (float(x) for x in lengths)
    v1 = np.array([e1, 0.0, 0.0])
    # v2: |v2| = e3, |v2 - v1| = e2
    x2 = (e3**2 - e2**2 + e1**2) / (2 * e1)
    y2 = math.sqrt(max(e3**2 - x2**2, 0.0))
    v2 = np.array([x2, y2, 0.0])
    # v3: |v3| = e5, |v3 - v1| = e6, |v3 - v2| = e4
    x3 = (e5**2 - e6**2 + e1**2) / (2 * e1)
    y3 = (e5**2 - e4**2 + x2**2 + y2**2 - 2 * x2 * x3) / (2 * y2)
    z3 = math.sqrt(max(e5**2 - x3**2 - y3**2, 0.0))
    return np.array([[0.0, 0.0, 0.0], v1, v2, [x3, y3, z3]])


def _outer_normal(vertices, face):
    a, b, c = (vertices[i] for i in face)
    (opp,) = set(range(4)) - set(face)
    n = np.cross(b - a, c - a)
    n /= np.linalg.norm(n)
    return -n if np.dot(n, vertices[opp] - a) > 0 else n


def tet_geometry(lengths: Sequence) -> TetGeometry:
    """Volume and exterior dihedral angles from six edge lengths.

    Raises
    ------
    NonEuclideanError
        If V^2 <= 0; the error carries V^2.

    Examples
    --------
    >>> g = tet_geometry([1] * 6)
    >>> round(g.volume * 6 * math.sqrt(2), 12)
    1.0
    """
    lengths = tuple(lengths)
    if len(lengths) != 6:
        raise InputError("a tetrahedron has six edges")
    if any(not float(x) > 0 for x in lengths):
        raise InputError("edge lengths must be positive")
    v2 = cayley_menger_volume_squared(lengths)
    if v2 <= 0:
        raise NonEuclideanError(v2)
    vertices = _embed(lengths)
    normals = {f: _outer_normal(vertices, f) for f in _FACES}
    theta = []
    for i, j in EDGE_VERTICES:
        f1, f2 = (f for f in _FACES if i in f and j in f)
        cos = float(np.clip(np.dot(normals[f1], normals[f2]), -1.0, 1.0))
        theta.append(math.acos(cos))
    return TetGeometry(lengths, v2, math.sqrt(float(v2)), vertices, tuple(theta))


def _halves(two_js) -> tuple[Fraction, ...]:
    return tuple(Fraction(j, 2) for j in two_js)


def wigner_limit_ratio(j1, j2, j3, j4, j5, j6) -> float:
    """{6j}^2 * 12 pi V with V from the unshifted quantum numbers (two_j inputs)."""
    geom = tet_geometry(_halves((j1, j2, j3, j4, j5, j6)))
    value = wigner_6j(j1, j2, j3, j4, j5, j6)
    return float(value.square()) * 12 * math.pi * geom.volume


def prob_recoupling_e(a, b, d, c, f, e) -> float:
    """Classical recoupling probability (2d+1)(2e+1) / (12 pi V) for {a b d; c f e}."""
    geom = tet_geometry(_halves((a, b, d, c, f, e)))
    return (d + 1) * (e + 1) / (12 * math.pi * geom.volume)


def exact_prob_e(a, b, d, c, f, e) -> Fraction:
    """Quantum counterpart (2d+1)(2e+1){a b d; c f e}^2, an exact rational."""
    return (d + 1) * (e + 1) * wigner_6j(a, b, d, c, f, e).square()


def prob_M_poly(two_J: int, two_M: int) -> list[int]:
    """Integer coefficients in x = cos^2(beta/2) of binom(2J, J-M) x^(J+M) (1-x)^(J-M)."""
    if abs(two_M) > two_J or (two_J - two_M) % 2:
        raise InputError(f"invalid (J, M) = ({two_J}/2, {two_M}/2)")
    p, q = (two_J + two_M) // 2, (two_J - two_M) // 2
    coeffs = [0] * (two_J + 1)
    b = math.comb(two_J, q)
    for i in range(q + 1):
        coeffs[p + i] = b * math.comb(q, i) * (-1) ** i
    return coeffs


def prob_M(two_J: int, two_M: int, beta: float | None = None, *, cos2=None):
    """Probability of projection M along an axis tilted by beta.

    P(M) = binom(2J, J-M) cos^(2(J+M))(beta/2) sin^(2(J-M))(beta/2).
    Pass ``cos2`` (a Fraction for an exact result) instead of ``beta`` to
    evaluate at a given cos^2(beta/2).
    """
    if abs(two_M) > two_J or (two_J - two_M) % 2:
        raise InputError(f"invalid (J, M) = ({two_J}/2, {two_M}/2)")
    p, q = (two_J + two_M) // 2, (two_J - two_M) // 2
    if cos2 is not None:
        return math.comb(two_J, q) * cos2**p * (1 - cos2) ** q
    if beta is None:
        raise InputError("give beta or cos2")
    c, s = math.cos(beta / 2) ** 2, math.sin(beta / 2) ** 2
    if s == 0:
        return 1.0 if q == 0 else 0.0
    if c == 0:
        return 1.0 if p == 0 else 0.0
    log = (math.lgamma(two_J + 1) - math.lgamma(p + 1) - math.lgamma(q + 1)
           + p * math.log(c) + q * math.log(s))
    return math.exp(log)


def _prob_M_continuous(J: float, M: float, beta: float) -> float:
    # gamma-function continuation of prob_M to real M
    c, s = math.cos(beta / 2) ** 2, math.sin(beta / 2) ** 2
    log = (math.lgamma(2 * J + 1) - math.lgamma(J + M + 1) - math.lgamma(J - M + 1)
           + (J + M) * math.log(c) + (J - M) * math.log(s))
    return math.exp(log)


def gaussian_limit(two_J: int, two_M: int, beta: float) -> float:
    """Gaussian estimate P(M0) exp(-((M - M0)/sin beta)^2 / J), M0 = J cos beta.

    P(M0) is the exact formula continued to real M0.
    """
    s = math.sin(beta)
    if abs(s) < 1e-15:
        raise InputError("the Gaussian limit needs sin(beta) != 0")
    J, M = two_J / 2, two_M / 2
    if J <= 0:
        raise InputError("the Gaussian limit needs J > 0")
    M0 = J * math.cos(beta)
    return _prob_M_continuous(J, M0, beta) * math.exp(-((M - M0) / s) ** 2 / J)


def ponzano_regge_estimate(j1, j2, j3, j4, j5, j6, envelope: str | float = "nominal") -> float:
    """Oscillatory estimate A (24 pi V)^(-1/2) cos(sum_r l_r theta_r + pi/4).

    Geometry uses the shifted lengths l_r = j_r + 1/2. ``envelope="nominal"``
    takes A = 2, the complex formula plus its conjugate; ``"calibrated"``
    takes the amplitude fitted to exact values and stored with the package;
    a number sets A directly.
    """
    ls = tuple(Fraction(j, 2) + Fraction(1, 2) for j in (j1, j2, j3, j4, j5, j6))
    geom = tet_geometry(ls)
    phase = sum(float(l) * t for l, t in zip(ls, geom.theta)) + math.pi / 4
    return _amplitude(envelope) * math.cos(phase) / math.sqrt(24 * math.pi * geom.volume)


def _amplitude(envelope) -> float:
    if envelope == "nominal":
        return 2.0
    if envelope == "calibrated":
        return load_calibration()["fitted_amplitude"]
    if isinstance(envelope, (int, float)):
        return float(envelope)
    raise InputError(f"unknown envelope {envelope!r}")


def _family(base, k):
    spins = tuple(k * b for b in base)
    triads = ((0, 1, 2), (0, 4, 5), (3, 1, 5), (3, 4, 2))
    if not all(triangle_ok(*(spins[i] for i in t)) for t in triads):
        return None
    return spins


def pr_sweep(base: Sequence[int], ks: Iterable[int], envelope="nominal") -> list[dict]:
    """Exact 6j against the oscillatory estimate along two_j = k * base.

    Rows for inadmissible or non-Euclidean k are skipped. ``normalized_error``
    is |estimate - exact| divided by (24 pi V)^(-1/2) at the shifted lengths.
    """
    rows = []
    for k in ks:
        spins = _family(base, k)
        if spins is None:
            continue
        try:
            est = ponzano_regge_estimate(*spins, envelope=envelope)
        except NonEuclideanError:
            continue
        geom = tet_geometry(tuple(Fraction(j, 2) + Fraction(1, 2) for j in spins))
        env = 1 / math.sqrt(24 * math.pi * geom.volume)
        exact = float(wigner_6j(*spins))
        rows.append({"k": k, "exact": exact, "estimate": est, "envelope": env,
                     "normalized_error": abs(est - exact) / env})
    return rows


def wigner_sweep(base: Sequence[int], ks: Iterable[int]) -> list[dict]:
    """{6j}^2 * 12 pi V along two_j = k * base."""
    rows = []
    for k in ks:
        spins = _family(base, k)
        if spins is None:
            continue
        try:
            rows.append({"k": k, "ratio": wigner_limit_ratio(*spins)})
        except NonEuclideanError:
            continue
    return rows


def sweep_csv(rows: list[dict]) -> str:
    """CSV text with columns k, exact, estimate, envelope, normalized_error."""
    buf = io.StringIO()
    fields = ["k", "exact", "estimate", "envelope", "normalized_error"]
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([row["k"]] + [repr(float(row[f])) for f in fields[1:]])
    return buf.getvalue()


def median_error(rows, lo, hi) -> float:
    return statistics.median(r["normalized_error"] for r in rows if lo <= r["k"] <= hi)


def calibrate(base=(2, 2, 2, 2, 2, 2), k_range=(10, 60)) -> dict:
    """Fit the oscillatory amplitude to exact 6j values and record error levels.

    The family is two_j = k * base (default: all j = k). The fitted amplitude
    A minimizes sum (exact - A env cos(phase))^2 over the range.
    """
    ks = range(k_range[0], k_range[1] + 1)
    unit = pr_sweep(base, ks, envelope=1.0)
    num = sum(r["exact"] * r["estimate"] for r in unit)
    den = sum(r["estimate"] ** 2 for r in unit)
    fitted = num / den
    windows = {"10-20": (10, 20), "20-60": (20, 60), "40-60": (40, 60)}
    medians = {}
    for name, amp in (("nominal", 2.0), ("calibrated", fitted)):
        rows = pr_sweep(base, ks, envelope=amp)
        medians[name] = {w: median_error(rows, lo, hi) for w, (lo, hi) in windows.items()}
    ratios = wigner_sweep(base, range(30, 61))
    return {
        "family_base_two_j": list(base),
        "k_range": list(k_range),
        "fitted_amplitude": fitted,
        "median_normalized_error": medians,
        "wigner_ratio_mean_30_60": statistics.fmean(r["ratio"] for r in ratios),
        "thresholds": {name: medians[name]["20-60"] for name in medians},
    }


@lru_cache(maxsize=1)
def load_calibration() -> dict:
    """The calibration record shipped in ``spinnet/data/calibration.json``."""
    text = resources.files("spinnet").joinpath("data/calibration.json").read_text()
    return json.loads(text)
