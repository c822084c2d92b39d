"""Stability verdicts for fractional-order systems.

Walks through the basic objects: exact fractional orders, a
quasi-polynomial with free parameters, binding the parameters, and the
argument-condition verdict with its root evidence.
"""

from fracstab import (
    FracOrder,
    Known,
    QuasiPolynomial,
    Unknown,
    commensurate,
    matignon_check,
    substitute,
)

# The viscous-drag benchmark: a * y' + b * D^0.5 y + c * y = u(t).
# Orders are exact rationals; "0.5" really is 1/2, not a float.
basset = QuasiPolynomial(
    (
        (Unknown("c"), FracOrder(0)),
        (Unknown("b"), "0.5"),
        (Unknown("a"), "1"),
    )
)
print("characteristic quasi-polynomial:", basset)

# Three classic parameter choices: decaying, oscillating, growing.
for point in ({"a": -3, "b": -2, "c": -4}, {"a": 1, "b": -2, "c": 2}, {"a": 1, "b": -2, "c": -1}):
    bound = substitute(basset, point)
    verdict = matignon_check(bound)
    print(f"{point}: {verdict.verdict.label:9s} margin={verdict.margin:+.6f}")

# Under the hood: the quasi-polynomial becomes an ordinary polynomial in
# w = s**base, and stability asks every root to keep |arg(w)| above
# base*pi/2.
bound = substitute(basset, {"a": 1, "b": -2, "c": 2})
form = commensurate(bound)
print("\ncommensurate base:", form.base, " polynomial coefficients:", form.poly.coeffs)
for root, arg, mult in matignon_check(bound).witnesses:
    print(f"  root {root:.6f}  |arg| = {abs(arg):.6f}  (threshold pi/4 = 0.785398)")

# An industrial heating-furnace model with awkward orders 1.31 / 0.97.
furnace = QuasiPolynomial(
    (
        (Known(1.69), "0"),
        (Known(6009.5), "0.97"),
        (Known(14994.0), "1.31"),
    )
)
verdict = matignon_check(furnace)
print(
    f"\nfurnace nominal: {verdict.verdict.label}, base order {verdict.base}, "
    f"margin {verdict.margin:.6f} rad"
)
print("(the transform tracks 131 polynomial roots exactly)")
