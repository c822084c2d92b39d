"""All complex roots of real-coefficient polynomials of integer degree.

The engine is Aberth-Ehrlich simultaneous iteration with Newton-polygon
initial guesses: each root starts on the circle whose radius the upper
convex hull of (exponent, log|coefficient|) predicts for it. The start
points are deterministic, so repeated runs give identical output. A root
is accepted once its evaluation is below the attainable backward error.
Cells that fail to converge (essentially never in practice) fall back to
companion-matrix eigenvalues plus Newton polish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

__all__ = ["D_MAX", "RootfindError", "IntPolynomial", "RootSet", "find_roots"]

# Degree cap: bounds memory and solve time for pathological order lattices.
D_MAX = 2048

# Leading coefficients at or below this relative size are treated as zero.
TRIM_REL = 1e-14

# Roots closer than this are reported as one cluster with multiplicity.
CLUSTER_TOL = 1e-7

_EPS = float(np.finfo(np.float64).eps)


class RootfindError(RuntimeError):
    """Root iteration failed to reach the required residual."""


@dataclass(frozen=True)
class IntPolynomial:
    """Real polynomial, coefficients ascending by power (index = exponent)."""

    coeffs: tuple

    def __post_init__(self):
        vals = [float(c) for c in self.coeffs]
        if not vals:
            raise ValueError("polynomial needs at least one coefficient")
        if not all(math.isfinite(c) for c in vals):
            raise ValueError("polynomial coefficients must be finite")
        vals = _trim_leading(vals)
        if vals is None:
            raise ValueError("zero polynomial has no defined degree")
        if len(vals) - 1 > D_MAX:
            raise ValueError(f"degree {len(vals) - 1} exceeds D_MAX={D_MAX}")
        object.__setattr__(self, "coeffs", tuple(vals))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def _trim_leading(vals):
    """Drop leading coefficients that are zero relative to the largest one."""
    biggest = max(abs(c) for c in vals)
    if biggest == 0.0:
        return None
    cut = len(vals)
    while cut > 1 and abs(vals[cut - 1]) <= TRIM_REL * biggest:
        cut -= 1
    if cut == 1 and abs(vals[0]) <= TRIM_REL * biggest:
        return None
    return vals[:cut]


@dataclass(frozen=True)
class RootSet:
    """Clustered roots with multiplicities; total count equals the degree."""

    roots: tuple
    multiplicities: tuple
    residual: float

    def expanded(self) -> list:
        out = []
        for z, m in zip(self.roots, self.multiplicities):
            out.extend([z] * m)
        return out


@njit(cache=True, nogil=True)
def _polygon_start(coeffs):
    """Initial guesses from the Newton polygon of (i, log|c_i|).

    Every upper-hull edge from exponent i1 to i2 contributes i2-i1 start
    points on the circle of radius (|c_i1|/|c_i2|)**(1/(i2-i1)), phased
    deterministically so distinct circles decorrelate.
    """
    d = coeffs.shape[0] - 1
    NEG = -1e300
    logs = np.empty(d + 1, np.float64)
    for i in range(d + 1):
        a = abs(coeffs[i])
        logs[i] = np.log(a) if a > 0.0 else NEG
    hull = np.empty(d + 1, np.int64)
    h = 0
    for i in range(d + 1):
        if logs[i] <= NEG:
            continue
        while h >= 2:
            i1, i2 = hull[h - 2], hull[h - 1]
            if (i2 - i1) * (logs[i] - logs[i1]) - (i - i1) * (logs[i2] - logs[i1]) >= 0.0:
                h -= 1
            else:
                break
        hull[h] = i
        h += 1
    z = np.empty(d, np.complex128)
    pos = 0
    for e in range(h - 1):
        i1, i2 = hull[e], hull[e + 1]
        m = i2 - i1
        r = np.exp((logs[i1] - logs[i2]) / m)
        for k in range(m):
            ang = 2.0 * np.pi * (k + 0.35) / m + 0.5 + 0.7 * e
            z[pos] = r * complex(np.cos(ang), np.sin(ang))
            pos += 1
    return z


@njit(cache=True, nogil=True)
def _aberth(coeffs, max_iter, step_tol, eps):
    """Simultaneous root iteration. coeffs ascending, c[0] != 0 expected
    non-degenerate, leading nonzero, degree >= 1. Returns (roots, ok)."""
    d = coeffs.shape[0] - 1
    dc = np.empty(d, np.float64)
    for i in range(1, d + 1):
        dc[i - 1] = coeffs[i] * i
    z = _polygon_start(coeffs)
    stop = np.zeros(d, np.uint8)
    for _ in range(max_iter):
        done = True
        for k in range(d):
            if stop[k]:
                continue
            zk = z[k]
            az = abs(zk)
            p = complex(coeffs[d], 0.0)
            sc = abs(coeffs[d])
            for i in range(d - 1, -1, -1):
                p = p * zk + coeffs[i]
                sc = sc * az + abs(coeffs[i])
            if abs(p) <= 4.0 * eps * sc:
                # evaluation indistinguishable from an exact zero
                stop[k] = 1
                continue
            dp = complex(dc[d - 1], 0.0)
            for i in range(d - 2, -1, -1):
                dp = dp * zk + dc[i]
            s = complex(0.0, 0.0)
            for j in range(d):
                if j != k:
                    s += 1.0 / (zk - z[j])
            denom = dp - p * s
            if denom == 0.0 or not (abs(denom) < 1e300):
                z[k] = zk * 1.000001 + 1e-6
                done = False
                continue
            delta = p / denom
            z[k] = zk - delta
            if not (abs(z[k]) < 1e300):
                z[k] = zk * 1.000001 + 1e-6
                done = False
                continue
            if abs(delta) <= step_tol * (1.0 + abs(z[k])):
                stop[k] = 1
            else:
                done = False
        if done:
            return z, True
    return z, False


def _newton_polish(coeffs: np.ndarray, roots: np.ndarray, steps: int = 3) -> np.ndarray:
    d = len(coeffs) - 1
    dc = coeffs[1:] * np.arange(1, d + 1)
    z = roots.astype(np.complex128)
    for _ in range(steps):
        p = np.full_like(z, coeffs[d])
        for i in range(d - 1, -1, -1):
            p = p * z + coeffs[i]
        dp = np.full_like(z, dc[d - 1])
        for i in range(d - 2, -1, -1):
            dp = dp * z + dc[i]
        safe = dp != 0
        z = np.where(safe, z - np.where(safe, p, 0) / np.where(safe, dp, 1), z)
    return z


def _solve(coeffs: np.ndarray) -> np.ndarray:
    """Roots of an ascending-coefficient polynomial, unsorted.

    Input must be trimmed (leading nonzero) with degree >= 1. Exact zero
    trailing coefficients are factored out first so roots at the origin
    come out exactly zero. Deterministic.
    """
    scale = np.max(np.abs(coeffs))
    c = coeffs / scale
    m0 = 0
    while m0 < len(c) - 1 and c[m0] == 0.0:
        m0 += 1
    body = np.ascontiguousarray(c[m0:])
    if len(body) == 1:
        roots = np.zeros(0, np.complex128)
    else:
        roots, ok = _aberth(body, 400, 1e-13, _EPS)
        if not ok or not np.all(np.isfinite(roots)):
            fallback = np.roots(body[::-1])
            roots = _newton_polish(body, fallback)
    if m0:
        roots = np.concatenate([np.zeros(m0, np.complex128), roots])
    return roots


def _relative_residual(coeffs: np.ndarray, roots: np.ndarray) -> float:
    """Max over roots of |p(z)| relative to the evaluation magnitude."""
    if len(roots) == 0:
        return 0.0
    worst = 0.0
    d = len(coeffs) - 1
    for z in roots:
        p = complex(coeffs[d])
        sc = abs(coeffs[d])
        az = abs(z)
        for i in range(d - 1, -1, -1):
            p = p * z + coeffs[i]
            sc = sc * az + abs(coeffs[i])
        worst = max(worst, abs(p) / (1.0 + sc))
    return worst


def _cluster(roots_sorted: list) -> tuple[list, list]:
    centers: list[complex] = []
    counts: list[int] = []
    for z in roots_sorted:
        placed = False
        for i, c in enumerate(centers):
            if abs(z - c) <= CLUSTER_TOL:
                # running centroid
                centers[i] = (c * counts[i] + z) / (counts[i] + 1)
                counts[i] += 1
                placed = True
                break
        if not placed:
            centers.append(z)
            counts.append(1)
    return centers, counts


def find_roots(poly: IntPolynomial) -> RootSet:
    """All roots of poly with multiplicity, ordered by (real, imag).

    The returned residual is the worst relative backward error of any
    root after scaling the coefficients to unit max-norm; it is required
    to be at most 1e-8.
    """
    if poly.degree < 1:
        raise ValueError("degree must be at least 1")
    coeffs = np.asarray(poly.coeffs, dtype=np.float64)
    roots = _solve(coeffs)
    scaled = coeffs / np.max(np.abs(coeffs))
    residual = _relative_residual(scaled, roots)
    if residual > 1e-8:
        raise RootfindError(
            f"root iteration did not converge; worst relative residual {residual:.3e}"
        )
    ordered = sorted(roots.tolist(), key=lambda z: (z.real, z.imag))
    centers, counts = _cluster(ordered)
    return RootSet(tuple(centers), tuple(counts), residual)
