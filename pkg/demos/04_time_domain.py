"""Time-domain corroboration of the frequency-domain verdicts.

The fractional derivative is discretized with binomial-weight history
sums (full memory, zero initial conditions). Bounded step responses back
the stable verdicts and runaway responses back the unstable ones; the
two analyses share no code path, which is what makes the cross-check
worth having.
"""

import os

import numpy as np

from fracstab import (
    Known,
    QuasiPolynomial,
    SimConfig,
    Verdict,
    gl_simulate,
    matignon_check,
    substitute,
    Unknown,
)
from fracstab.emit import trajectory_csv

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

basset = QuasiPolynomial(((Unknown("c"), "0"), (Unknown("b"), "0.5"), (Unknown("a"), "1")))

print("step responses at the three reference points:")
for point in ({"a": -3, "b": -2, "c": -4}, {"a": 1, "b": -2, "c": 2}, {"a": 1, "b": -2, "c": -1}):
    bound = substitute(basset, point)
    verdict = matignon_check(bound).verdict.label
    result = gl_simulate(bound, 1.0, SimConfig(h=0.01, t_final=50.0))
    print(
        f"  {point}: predicted {verdict:9s} simulated {result.verdict:12s} "
        f"peak {result.peak:.3g}"
    )

# Keep the oscillating case for inspection.
marginal = substitute(basset, {"a": 1, "b": -2, "c": 2})
result = gl_simulate(marginal, 1.0, SimConfig(h=0.01, t_final=50.0))
path = os.path.join(OUT, "marginal_step.csv")
with open(path, "w") as fh:
    fh.write(trajectory_csv(result))
print("wrote", path)

# A stable step response settles to gain/c; fractional tails approach it
# slowly but get there.
bound = substitute(basset, {"a": -3, "b": -2, "c": -4})
result = gl_simulate(bound, 1.0, SimConfig(h=0.01, t_final=80.0))
tail = float(np.mean(result.outputs[-400:]))
print(f"\nstable point settles to {tail:.4f} (exact limit {1 / -4:.4f})")

# Cross-check on a small grid: every non-boundary cell agrees.
grid = np.linspace(-7.5, 7.5, 5)
agree = total = 0
cfg = SimConfig(h=0.02, t_final=600.0)
for a in grid:
    for c in grid:
        bound = substitute(basset, {"a": float(a), "b": -2.0, "c": float(c)})
        verdict = matignon_check(bound).verdict
        if verdict == Verdict.MARGINAL:
            continue
        result = gl_simulate(bound, 1.0, cfg)
        want = "bounded" if verdict == Verdict.STABLE else "diverged"
        agree += result.verdict == want
        total += 1
print(f"\noracle agreement: {agree}/{total} grid points")
