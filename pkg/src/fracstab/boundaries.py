"""Stability boundaries in the plane of two free parameters.

Substituting s = j*omega into D(s) and splitting real and imaginary
parts gives, per term, coefficients cos(0.5*pi*alpha_i) * omega**alpha_i
and sin(0.5*pi*alpha_i) * omega**alpha_i. With two parameters entering
linearly this is a 2x2 linear system per frequency; sweeping omega over
(0, inf) traces the locus where a conjugate root pair sits on the
imaginary axis (the complex root boundary). The other two boundaries are
straight lines: order-0 coefficient zero (a real root crosses the
origin) and top coefficient zero (a root leaves through infinity).

Closed forms for the common three-term system a*s**a2 + b*s**a1 + c with
b fixed:

    a(w) = -b * w**(a1-a2) * sin(0.5*pi*a1) / sin(0.5*pi*a2)
    c(w) = -b * w**a1 * sin(0.5*pi*(a2-a1)) / sin(0.5*pi*a2)

and for the commensurate pair (a1, a2) = (alpha, 2*alpha):

    a(w) = -b * w**-alpha * sin(0.5*pi*alpha) / sin(pi*alpha)
    c(w) = -a(w) * w**(2*alpha) * cos(pi*alpha) - b * w**alpha * cos(0.5*pi*alpha)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quasipoly import FracOrder, Known, QuasiPolynomial, Unknown, bind

__all__ = [
    "AffineForm",
    "Line",
    "CrbBranch",
    "BoundarySet",
    "eval_boundary_parts",
    "crb_general",
    "crb_three_term",
    "crb_commensurate_pair",
    "rrb_line",
    "irb_line",
    "default_omega_grid",
    "boundary_set",
]

# 2x2 systems whose determinant is below SING_REL times the column-norm
# product are treated as singular and the frequency is skipped.
SING_REL = 1e-12

# Default frequency grid: log-spaced, symmetric under omega -> 1/omega.
OMEGA_LO = 1e-4
OMEGA_HI = 1e4
OMEGA_COUNT = 2000

# Plot samples are kept within this multiple of the requested window.
CLIP_FACTOR = 3.0

# Consecutive samples further apart than this fraction of the window
# diagonal trigger local refinement, up to REFINE_DEPTH bisections.
GAP_FRACTION = 0.05
REFINE_DEPTH = 3


@dataclass(frozen=True)
class AffineForm:
    """const + sum(coeff * parameter) over the remaining free parameters."""

    const: float
    coeffs: tuple

    def coeff_of(self, name: str) -> float:
        for n, v in self.coeffs:
            if n == name:
                return v
        return 0.0

    def eval(self, bindings) -> float:
        total = self.const
        for n, v in self.coeffs:
            total += v * float(bindings[n])
        return total


@dataclass(frozen=True)
class Line:
    """Straight boundary a1*p1 + a2*p2 + const = 0 in the parameter plane."""

    kind: str
    a1: float
    a2: float
    const: float

    def segment(self, window):
        """Two endpoints of the line clipped to the window, or None."""
        (x0, x1), (y0, y1) = window
        pts = []

        def keep(x, y):
            tol_x = 1e-9 * (abs(x1 - x0) + 1.0)
            tol_y = 1e-9 * (abs(y1 - y0) + 1.0)
            if x0 - tol_x <= x <= x1 + tol_x and y0 - tol_y <= y <= y1 + tol_y:
                pt = (min(max(x, x0), x1), min(max(y, y0), y1))
                if pt not in pts:
                    pts.append(pt)

        if self.a2 != 0.0:
            for x in (x0, x1):
                keep(x, -(self.const + self.a1 * x) / self.a2)
        if self.a1 != 0.0:
            for y in (y0, y1):
                keep(-(self.const + self.a2 * y) / self.a1, y)
        if len(pts) < 2:
            return None
        pts.sort()
        return pts[0], pts[-1]


@dataclass(frozen=True)
class CrbBranch:
    """Complex-root-boundary samples along increasing frequency.

    samples are (omega, (p1, p2)) triples; gaps lists frequencies where
    the 2x2 system was singular and no point was produced; note carries a
    human-readable diagnostic for degenerate configurations.
    """

    samples: tuple
    fixed: dict = field(default_factory=dict)
    orders: tuple = ()
    gaps: tuple = ()
    note: str = ""

    def points(self) -> np.ndarray:
        if not self.samples:
            return np.zeros((0, 2))
        return np.array([[p1, p2] for _, (p1, p2) in self.samples])


@dataclass(frozen=True)
class BoundarySet:
    """The three boundary families for one configuration and window."""

    rrb: Line | None
    irb: Line | None
    crb: tuple
    window: tuple
    unknowns: tuple


def _term_parts(order: FracOrder, omega: float) -> tuple[float, float]:
    a = float(order)
    w = omega ** a
    return math.cos(0.5 * math.pi * a) * w, math.sin(0.5 * math.pi * a) * w


def eval_boundary_parts(qp: QuasiPolynomial, omega: float, bindings=None):
    """Real and imaginary parts of D(j*omega) as affine forms.

    After applying the optional bindings at most two parameters may
    remain; both forms are affine in those parameters.
    """
    if not omega > 0.0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    bound = bind(qp, bindings) if bindings else qp
    free = bound.unknowns
    if len(free) > 2:
        raise ValueError(
            f"at most two free parameters supported, still have {list(free)}"
        )
    re_const = im_const = 0.0
    re_coeffs = {name: 0.0 for name in free}
    im_coeffs = {name: 0.0 for name in free}
    for coeff, order in bound.terms:
        c, s = _term_parts(order, omega)
        if isinstance(coeff, Known):
            re_const += coeff.value * c
            im_const += coeff.value * s
        else:
            re_coeffs[coeff.name] += coeff.mult * c
            im_coeffs[coeff.name] += coeff.mult * s
    return (
        AffineForm(re_const, tuple(re_coeffs.items())),
        AffineForm(im_const, tuple(im_coeffs.items())),
    )


def _check_plane(qp: QuasiPolynomial, unknowns, bindings):
    bound = bind(qp, bindings or {})
    free = bound.unknowns
    p1, p2 = unknowns
    if set(free) != {p1, p2}:
        raise ValueError(
            f"plane parameters {(p1, p2)} must be exactly the free parameters, "
            f"found {list(free)}"
        )
    orders = {c.name: o for c, o in bound.terms if isinstance(c, Unknown)}
    if orders[p1] == orders[p2]:
        raise ValueError(
            f"parameters {p1!r} and {p2!r} enter at the same order; "
            "the boundary system is singular for every frequency"
        )
    return bound


def crb_general(qp: QuasiPolynomial, unknowns, bindings, omega_grid) -> CrbBranch:
    """Complex root boundary by solving the 2x2 system at each frequency.

    Frequencies where the system matrix is singular are skipped and
    recorded as gaps.
    """
    p1, p2 = unknowns
    bound = _check_plane(qp, unknowns, bindings)
    samples = []
    gaps = []
    last = -math.inf
    for omega in omega_grid:
        omega = float(omega)
        if not omega > last:
            raise ValueError("omega grid must be strictly increasing")
        last = omega
        point = _solve_crb_point(bound, p1, p2, omega)
        if point is None:
            gaps.append(omega)
        else:
            samples.append((omega, point))
    return CrbBranch(
        samples=tuple(samples),
        fixed=dict(bindings or {}),
        orders=bound.orders(),
        gaps=tuple(gaps),
    )


def _solve_crb_point(bound: QuasiPolynomial, p1: str, p2: str, omega: float):
    re_f, im_f = eval_boundary_parts(bound, omega)
    m11, m12 = re_f.coeff_of(p1), re_f.coeff_of(p2)
    m21, m22 = im_f.coeff_of(p1), im_f.coeff_of(p2)
    det = m11 * m22 - m12 * m21
    scale = math.hypot(m11, m21) * math.hypot(m12, m22)
    if scale == 0.0 or abs(det) < SING_REL * scale:
        return None
    r1, r2 = -re_f.const, -im_f.const
    v1 = (r1 * m22 - m12 * r2) / det
    v2 = (m11 * r2 - r1 * m21) / det
    return (v1, v2)


def crb_three_term(b: float, alpha1, alpha2, omega_grid) -> CrbBranch:
    """Closed-form complex root boundary for a*s**a2 + b*s**a1 + c."""
    a1 = FracOrder.of(alpha1)
    a2 = FracOrder.of(alpha2)
    f1, f2 = float(a1), float(a2)
    if not (0.0 < f1 < f2 < 2.0):
        raise ValueError(f"orders must satisfy 0 < {f1} < {f2} < 2")
    if b == 0.0:
        # locus degenerates to the single point (0, 0)
        return CrbBranch(
            samples=(),
            fixed={"b": 0.0},
            orders=(a1, a2),
            note="middle coefficient is zero: boundary collapses to the origin",
        )
    s1 = math.sin(0.5 * math.pi * f1)
    s2 = math.sin(0.5 * math.pi * f2)
    sd = math.sin(0.5 * math.pi * (f2 - f1))
    samples = []
    for omega in omega_grid:
        omega = float(omega)
        a = -b * omega ** (f1 - f2) * s1 / s2
        c = -b * omega ** f1 * sd / s2
        samples.append((omega, (a, c)))
    return CrbBranch(samples=tuple(samples), fixed={"b": float(b)}, orders=(a1, a2))


def crb_commensurate_pair(b: float, alpha, omega_grid) -> CrbBranch:
    """Closed-form complex root boundary for orders (alpha, 2*alpha)."""
    a1 = FracOrder.of(alpha)
    f = float(a1)
    if not (0.0 < f < 1.0):
        raise ValueError(f"alpha must lie strictly in (0, 1), got {f}")
    if b == 0.0:
        return CrbBranch(
            samples=(),
            fixed={"b": 0.0},
            orders=(a1, FracOrder(2 * a1.num, a1.den)),
            note="middle coefficient is zero: boundary collapses to the origin",
        )
    s_half = math.sin(0.5 * math.pi * f)
    c_half = math.cos(0.5 * math.pi * f)
    s_full = math.sin(math.pi * f)
    c_full = math.cos(math.pi * f)
    samples = []
    for omega in omega_grid:
        omega = float(omega)
        a = -b * omega ** (-f) * s_half / s_full
        c = -a * omega ** (2.0 * f) * c_full - b * omega ** f * c_half
        samples.append((omega, (a, c)))
    return CrbBranch(
        samples=tuple(samples),
        fixed={"b": float(b)},
        orders=(a1, FracOrder(2 * a1.num, a1.den)),
    )


def _coefficient_line(coeff, kind: str, p1: str, p2: str) -> Line | None:
    if coeff is None or isinstance(coeff, Known):
        return None
    if coeff.name == p1:
        return Line(kind, coeff.mult, 0.0, 0.0)
    if coeff.name == p2:
        return Line(kind, 0.0, coeff.mult, 0.0)
    return None


def rrb_line(qp: QuasiPolynomial, unknowns, bindings=None) -> Line | None:
    """Locus where the order-0 coefficient vanishes; absent when that
    coefficient holds no free parameter."""
    bound = bind(qp, bindings or {})
    return _coefficient_line(bound.constant, "rrb", *unknowns)


def irb_line(qp: QuasiPolynomial, unknowns, bindings=None) -> Line | None:
    """Locus where the top-order coefficient vanishes; absent when that
    coefficient holds no free parameter."""
    bound = bind(qp, bindings or {})
    return _coefficient_line(bound.leading, "irb", *unknowns)


def default_omega_grid(lo: float = OMEGA_LO, hi: float = OMEGA_HI, count: int = OMEGA_COUNT):
    if not (0.0 < lo < hi) or count < 2:
        raise ValueError("need 0 < lo < hi and at least two samples")
    return np.logspace(math.log10(lo), math.log10(hi), count)


def _expand(window, factor):
    (x0, x1), (y0, y1) = window
    cx, hx = 0.5 * (x0 + x1), 0.5 * (x1 - x0)
    cy, hy = 0.5 * (y0 + y1), 0.5 * (y1 - y0)
    return ((cx - factor * hx, cx + factor * hx), (cy - factor * hy, cy + factor * hy))


def _inside(point, window) -> bool:
    (x0, x1), (y0, y1) = window
    return x0 <= point[0] <= x1 and y0 <= point[1] <= y1


def boundary_set(qp, unknowns, bindings, window, omega_grid=None) -> BoundarySet:
    """All three boundaries, with the curve prepared for plotting.

    The raw boundary curve is clipped to CLIP_FACTOR times the window
    (the curve usually diverges as omega goes to 0 or infinity), split
    into continuous branches at gaps and clipped-out stretches, and
    locally refined where consecutive points are further apart than
    GAP_FRACTION of the window diagonal.
    """
    if omega_grid is None:
        omega_grid = default_omega_grid()
    p1, p2 = unknowns
    bound = _check_plane(qp, unknowns, bindings)
    raw = crb_general(qp, unknowns, bindings, omega_grid)
    clip = _expand(window, CLIP_FACTOR)
    (x0, x1), (y0, y1) = window
    diag_cap = GAP_FRACTION * math.hypot(x1 - x0, y1 - y0)

    gap_set = set(raw.gaps)
    branches = []
    current = []

    def flush():
        if len(current) >= 2:
            branches.append(
                CrbBranch(
                    samples=tuple(current),
                    fixed=raw.fixed,
                    orders=raw.orders,
                    gaps=raw.gaps,
                    note=raw.note,
                )
            )
        current.clear()

    def refine(w_lo, pt_lo, w_hi, pt_hi, depth):
        """Insert geometric-midpoint samples while segments stay too long."""
        if depth >= REFINE_DEPTH:
            return
        if math.hypot(pt_hi[0] - pt_lo[0], pt_hi[1] - pt_lo[1]) <= diag_cap:
            return
        w_mid = math.sqrt(w_lo * w_hi)
        pt_mid = _solve_crb_point(bound, p1, p2, w_mid)
        if pt_mid is None or not _inside(pt_mid, clip):
            return
        refine(w_lo, pt_lo, w_mid, pt_mid, depth + 1)
        current.append((w_mid, pt_mid))
        refine(w_mid, pt_mid, w_hi, pt_hi, depth + 1)

    prev = None
    for omega, point in raw.samples:
        # a recorded singular frequency between two kept samples breaks
        # the branch: interpolating across it could invent a boundary
        if prev is not None and any(prev[0] < g < omega for g in gap_set):
            flush()
            prev = None
        if not _inside(point, clip):
            flush()
            prev = None
            continue
        if prev is not None:
            refine(prev[0], prev[1], omega, point, 0)
        current.append((omega, point))
        prev = (omega, point)
    flush()

    # a branch collapsed to one point partitions nothing: drop it
    point_tol = 1e-12 * math.hypot(x1 - x0, y1 - y0)
    kept = []
    for branch in branches:
        pts = branch.points()
        spread = math.hypot(
            float(pts[:, 0].max() - pts[:, 0].min()),
            float(pts[:, 1].max() - pts[:, 1].min()),
        )
        if spread > point_tol:
            kept.append(branch)
    branches = kept

    return BoundarySet(
        rrb=rrb_line(qp, unknowns, bindings),
        irb=irb_line(qp, unknowns, bindings),
        crb=tuple(branches),
        window=tuple((tuple(window[0]), tuple(window[1]))),
        unknowns=(p1, p2),
    )
