"""Commensurate-order transform and the Matignon stability verdict.

A fully bound quasi-polynomial D(s) with rational orders k_i * alpha is
rewritten as an ordinary polynomial P(w) in w = s**alpha, where alpha is
the largest rational for which every order is an integer multiple (the
gcd of the reduced orders). The system is stable exactly when every root
w of P satisfies |arg(w)| > alpha*pi/2. The margin reported below is the
worst slack min_i |arg(w_i)| - alpha*pi/2; verdicts within EPS_ARG of
zero are classified marginal so boundary points do not flip under
roundoff.

Roots at the origin are outside the argument condition and classified by
analogy with integer-order marginal stability: one simple root at w = 0
with everything else strictly stable is marginal, anything more is
unstable.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .quasipoly import FracOrder, QuasiPolynomial
from .rootfind import D_MAX, IntPolynomial, _cluster, _solve, _trim_leading

__all__ = [
    "EPS_ARG",
    "Verdict",
    "StabilityError",
    "CommensurateForm",
    "StabilityVerdict",
    "commensurate",
    "matignon_check",
]

# Half-width of the marginal band around |arg(root)| = alpha*pi/2, radians.
EPS_ARG = 1e-9

# Roots with modulus at or below ORIGIN_REL * max(1, largest root modulus)
# count as roots at the origin.
ORIGIN_REL = 1e-12


class StabilityError(RuntimeError):
    """Commensurate transform or verdict computation failed."""


class Verdict(enum.IntEnum):
    STABLE = 0
    UNSTABLE = 1
    MARGINAL = 2
    UNKNOWN = 3

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class CommensurateForm:
    """Integer-degree polynomial in w = s**base equivalent to the input."""

    base: FracOrder
    poly: IntPolynomial


def _commensurate_base(orders) -> Fraction:
    """Largest usable rational base dividing every nonzero order exactly.

    The gcd of the reduced orders is the largest such rational outright,
    but the argument condition is only meaningful for bases below 2 (the
    sector map must stay injective on the right half plane), so a gcd of
    2 or more is halved until it drops below 2. Verdicts are invariant
    under that refinement.
    """
    nonzero = [o.fraction for o in orders if not o.is_zero]
    if not nonzero:
        return Fraction(1)
    num = 0
    den = 1
    for f in nonzero:
        num = math.gcd(num, f.numerator)
        den = den * f.denominator // math.gcd(den, f.denominator)
    base = Fraction(num, den)
    while base >= 2:
        base /= 2
    return base


def commensurate(qp: QuasiPolynomial) -> CommensurateForm:
    """Rewrite a fully known quasi-polynomial over a common rational base.

    The coefficient of w**k equals the coefficient of s**(k*base);
    missing powers are zero-filled.
    """
    values = qp.known_values()
    orders = qp.orders()
    # For an order-0-only polynomial the base defaults to 1 and the
    # result is the constant itself.
    base = _commensurate_base(orders)
    degree = orders[-1].fraction / base
    assert degree.denominator == 1
    degree = degree.numerator
    if degree > D_MAX:
        raise StabilityError(
            f"commensurate degree {degree} exceeds D_MAX={D_MAX}; "
            f"orders need a coarser common base (denominators up to Q_MAX make "
            f"degree up to 100*Q_MAX possible)"
        )
    coeffs = [0.0] * (degree + 1)
    for value, order in zip(values, orders):
        k = order.fraction / base
        coeffs[k.numerator] = value
    try:
        base_order = FracOrder(base.numerator, base.denominator)
    except ValueError as exc:
        raise StabilityError(f"commensurate base {base} is not representable: {exc}") from exc
    return CommensurateForm(base_order, IntPolynomial(tuple(coeffs)))


@dataclass(frozen=True)
class StabilityVerdict:
    """Classification plus the root evidence behind it.

    margin is min over roots of |arg(root)| - base*pi/2 in radians (None
    for a root-free constant). witnesses pair each distinct root with its
    argument and multiplicity; arguments of origin roots are reported as
    0.0 and never enter the margin.
    """

    verdict: Verdict
    margin: float | None
    base: FracOrder
    witnesses: tuple

    @property
    def is_stable(self) -> bool:
        return self.verdict == Verdict.STABLE


def _verdict_from_coeffs(coeffs: np.ndarray, half_base_pi: float):
    """Shared verdict kernel: (code, margin, roots, unstable_count) from
    an ascending coefficient vector. Used by matignon_check and by grid
    classification so a grid cell and a direct check of the same point
    always agree. unstable_count is the number of roots strictly inside
    the instability sector; together with the degree it identifies the
    root distribution a parameter region shares."""
    vals = _trim_leading(list(coeffs))
    if vals is None:
        raise StabilityError("zero polynomial has no stability verdict")
    if len(vals) == 1:
        return Verdict.STABLE, None, np.zeros(0, np.complex128), 0
    roots = _solve(np.asarray(vals, dtype=np.float64))
    scale = max(1.0, float(np.max(np.abs(roots))))
    at_origin = np.abs(roots) <= ORIGIN_REL * scale
    origin_mult = int(np.count_nonzero(at_origin))
    others = roots[~at_origin]
    contribs = np.abs(np.angle(others)) - half_base_pi
    unstable_count = int(np.count_nonzero(contribs < -EPS_ARG))
    if origin_mult == 0:
        margin = float(np.min(contribs))
        if margin > EPS_ARG:
            code = Verdict.STABLE
        elif margin >= -EPS_ARG:
            code = Verdict.MARGINAL
        else:
            code = Verdict.UNSTABLE
    else:
        others_strict = contribs.size == 0 or float(np.min(contribs)) > EPS_ARG
        if origin_mult == 1 and others_strict:
            code = Verdict.MARGINAL
            margin = 0.0
        else:
            code = Verdict.UNSTABLE
            margin = -half_base_pi
            if contribs.size:
                worst = float(np.min(contribs))
                if worst < margin:
                    margin = worst
            unstable_count += origin_mult
    return code, margin, roots, unstable_count


def matignon_check(qp: QuasiPolynomial) -> StabilityVerdict:
    """Stability verdict for a fully known quasi-polynomial.

    Stable iff every pseudo-polynomial root satisfies the argument
    condition strictly (beyond EPS_ARG); invariant under scaling the
    polynomial by any nonzero constant.
    """
    form = commensurate(qp)
    half = float(form.base) * math.pi / 2.0
    code, margin, roots, _ = _verdict_from_coeffs(
        np.asarray(form.poly.coeffs, dtype=np.float64), half
    )
    ordered = sorted(roots.tolist(), key=lambda z: (z.real, z.imag))
    centers, counts = _cluster(ordered)
    witnesses = tuple(
        (z, 0.0 if z == 0 else cmath.phase(z), m) for z, m in zip(centers, counts)
    )
    return StabilityVerdict(code, margin, form.base, witnesses)
