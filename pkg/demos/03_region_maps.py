"""Region maps, parameter sweeps and the robust stability region.

Classifies a parameter window cell by cell, extracts the connected
regions of constant root distribution, stacks maps over a swept
coefficient and over the fractional order, and intersects an order sweep
into the region that stays stable no matter the order.
"""

import os
from fractions import Fraction

import numpy as np

from fracstab import (
    QuasiPolynomial,
    Unknown,
    Verdict,
    boundary_set,
    classify_window,
    robust_intersection,
    sweep_order,
    sweep_parameter,
)
from fracstab.emit import region_svg, stack_svg

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)
WINDOW = ((-10.0, 10.0), (-10.0, 10.0))

basset = QuasiPolynomial(((Unknown("c"), "0"), (Unknown("b"), "0.5"), (Unknown("a"), "1")))

# One window, classified densely: five regions, two of them stable.
rm = classify_window(basset, ("a", "c"), {"b": -2.0}, WINDOW, (128, 128))
print(f"{len(rm.regions)} regions, {rm.marginal_cells} boundary cells")
for region in rm.regions:
    print(
        f"  region {region.id}: {region.verdict.label:9s} "
        f"around ({region.representative[0]:+.2f}, {region.representative[1]:+.2f}) "
        f"({region.cells} cells)"
    )

bset = boundary_set(basset, ("a", "c"), {"b": -2.0}, WINDOW)
path = os.path.join(OUT, "basset_regions.svg")
with open(path, "w") as fh:
    fh.write(region_svg(rm, bset, "stability regions, b = -2"))
print("wrote", path)

# Sweeping the fixed coefficient: a smaller |b| leaves more of the plane
# stable.
stack = sweep_parameter(basset, ("a", "c"), "b", [-5, -4, -3, -2, -1], {}, WINDOW, (64, 64))
print("\nstable cells as b varies:")
for value, layer in zip(stack.values, stack.layers):
    print(f"  b = {value:+.0f}: {layer.stable_cell_count()} of {64 * 64}")

path = os.path.join(OUT, "basset_b_stack.svg")
with open(path, "w") as fh:
    fh.write(stack_svg(stack, "stable-set outlines while b varies"))
print("wrote", path)

# Sweeping the order: the straight boundaries stay put, only the curve
# moves, and it stays inside a bounded lens. Intersecting the stable
# sets over the whole order range gives the robust region.
alphas = [Fraction(k, 100) for k in range(5, 100, 5)]
order_stack = sweep_order(basset, ("a", "c"), alphas, {"b": -2.0}, WINDOW, (64, 64))
robust = robust_intersection(order_stack)
print(f"\nrobust region: {int(np.count_nonzero(robust.mask))} cells stay stable for all orders")
for point in ((5.0, 5.0), (-5.0, -5.0), (1.0, 1.0)):
    inside = "inside" if robust.contains(point) else "outside"
    print(f"  {point}: {inside}")

path = os.path.join(OUT, "basset_order_stack.svg")
with open(path, "w") as fh:
    fh.write(stack_svg(order_stack, "stable-set outlines across orders"))
print("wrote", path)
