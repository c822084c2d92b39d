"""Stability boundaries in a two-parameter plane.

With two coefficients free, the loci where roots cross into instability
are one straight line per vanishing end coefficient plus a frequency-
swept curve where a conjugate pair sits on the imaginary axis. This
script traces all three for the viscous-drag benchmark and the furnace
model, checks the known closed-form identities, and renders an SVG.
"""

import os

from fracstab import (
    QuasiPolynomial,
    Unknown,
    boundary_set,
    crb_commensurate_pair,
    crb_general,
    crb_three_term,
    default_omega_grid,
)
from fracstab.emit import boundary_svg

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

basset = QuasiPolynomial(((Unknown("c"), "0"), (Unknown("b"), "0.5"), (Unknown("a"), "1")))

# Straight boundaries and the swept curve for b = -2.
bset = boundary_set(basset, ("a", "c"), {"b": -2.0}, ((-10, 10), (-10, 10)))
print("real-root line:    c = 0" if bset.rrb else "no real-root line")
print("infinite-root line: a = 0" if bset.irb else "no infinite-root line")
total = sum(len(br.samples) for br in bset.crb)
print(f"curve branches: {len(bset.crb)} with {total} samples inside the plot clip")

# The classical curve obeys a*c = b^2/2 exactly.
worst = max(abs(a * c - 2.0) for br in bset.crb for _, (a, c) in br.samples)
print(f"product identity a*c = 2 holds to {worst:.2e}")

path = os.path.join(OUT, "basset_boundaries.svg")
with open(path, "w") as fh:
    fh.write(boundary_svg(bset, "viscous-drag benchmark, b = -2"))
print("wrote", path)

# Closed forms and the general 2x2 solve agree to machine precision.
grid = default_omega_grid(1e-3, 1e3, 200)
general = crb_general(basset, ("a", "c"), {"b": -2.0}, grid)
closed = crb_three_term(-2.0, "0.5", "1", grid)
worst = max(
    abs(p[0] - q[0]) + abs(p[1] - q[1])
    for (_, p), (_, q) in zip(general.samples, closed.samples)
)
print(f"\ngeneral solve vs closed form: worst gap {worst:.2e}")

# Commensurate pair (alpha, 2*alpha): the product law picks up a cosine.
import math

for alpha in (0.2, 0.8):
    branch = crb_commensurate_pair(-2.0, str(alpha), grid)
    expect = 4.0 / (2.0 * (1.0 + math.cos(alpha * math.pi)))
    sample = branch.samples[len(branch.samples) // 2][1]
    print(f"alpha={alpha}: a*c = {sample[0] * sample[1]:.9f} (expected {expect:.9f})")

# Furnace: the lower-left stability pocket is bounded by a power law.
furnace_curve = crb_three_term(6009.5, "0.97", "1.31", grid)
mid = furnace_curve.samples[len(furnace_curve.samples) // 2][1]
print(
    f"\nfurnace curve constant (-a)(-c)^0.3505... = "
    f"{(-mid[0]) * (-mid[1]) ** 0.350515464:.3f}"
)
