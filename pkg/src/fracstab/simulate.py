"""Time-domain oracle: fractional-difference simulation of the system.

The fractional derivative of order a is discretized with the standard
binomial-weight history sum

    D^a y(n*h) ~ h**-a * sum_{j=0..n} w_j * y((n-j)*h),
    w_0 = 1,  w_j = w_{j-1} * (1 - (a+1)/j),

with the full, untruncated memory. Each step solves the implicit linear
relation sum_i c_i * D^{a_i} y = gain * u for y(n*h). This path shares
nothing with the frequency-domain analysis, which is the point: a
bounded or diverging step response independently corroborates the
argument-condition verdict.

Order-0 terms fall out naturally (their weights vanish past j = 0), so
any fully known quasi-polynomial with orders below 2 can be simulated.
Zero initial conditions throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quasipoly import QuasiPolynomial

__all__ = ["SimConfig", "SimResult", "SimulationError", "gl_simulate", "gl_weights"]

BOUNDED = "bounded"
DIVERGED = "diverged"
INCONCLUSIVE = "inconclusive"


class SimulationError(ValueError):
    """Simulation cannot run with the given configuration."""


@dataclass(frozen=True)
class SimConfig:
    """Discretization and divergence-detection settings.

    input_kind "step" applies a constant of the given amplitude from
    t = 0; "impulse" applies amplitude/h at the first sample only.
    """

    h: float = 0.01
    t_final: float = 50.0
    input_kind: str = "step"
    amplitude: float = 1.0
    bound: float = 1e6

    def __post_init__(self):
        if not (self.h > 0.0 and math.isfinite(self.h)):
            raise SimulationError("step size must be positive")
        if not (self.t_final > 0.0 and math.isfinite(self.t_final)):
            raise SimulationError("horizon must be positive")
        if self.h > self.t_final / 100.0:
            raise SimulationError("step size must be at most horizon/100")
        if self.bound < 1e3:
            raise SimulationError("divergence bound must be at least 1e3")
        if self.input_kind not in ("step", "impulse"):
            raise SimulationError(f"unknown input kind {self.input_kind!r}")


@dataclass(eq=False)
class SimResult:
    times: np.ndarray
    outputs: np.ndarray
    verdict: str
    diverged_at: float | None
    peak: float


def gl_weights(order: float, count: int) -> np.ndarray:
    """Binomial history weights w_0..w_count for one derivative order.

    Multiplicative recurrence, no factorials, safe for very long runs.
    """
    w = np.empty(count + 1)
    w[0] = 1.0
    for j in range(1, count + 1):
        w[j] = w[j - 1] * (1.0 - (order + 1.0) / j)
    return w


def gl_simulate(qp: QuasiPolynomial, gain: float = 1.0, config: SimConfig | None = None) -> SimResult:
    """Simulate sum_i c_i D^{a_i} y = gain * u and judge boundedness.

    Diverged means some sample exceeded config.bound in magnitude (the
    run stops there). Bounded requires the trailing tenth of the run to
    have a non-increasing envelope, or the whole response to stay below
    bound/10. Anything else is inconclusive; marginal systems typically
    land there or in bounded, and the oracle is not asked to separate
    those two.
    """
    cfg = config or SimConfig()
    values = np.array(qp.known_values())
    orders = np.array([float(o) for o in qp.orders()])
    if np.any(orders > 2.0):
        raise SimulationError("simulation supports orders up to 2 only")
    n_steps = int(round(cfg.t_final / cfg.h))
    h_pow = cfg.h ** (-orders)
    scaled = values * h_pow
    implicit = float(np.sum(scaled))
    if implicit == 0.0:
        raise SimulationError(
            "implicit coefficient sum_i c_i h**-a_i vanished; change the step size"
        )

    weights = np.vstack([gl_weights(a, n_steps) for a in orders])

    u = np.zeros(n_steps + 1)
    if cfg.input_kind == "step":
        u[:] = cfg.amplitude
    else:
        u[0] = cfg.amplitude / cfg.h

    y = np.zeros(n_steps + 1)
    times = np.arange(n_steps + 1) * cfg.h
    diverged_at = None
    last = n_steps
    for n in range(n_steps + 1):
        if n == 0:
            history = 0.0
        else:
            # sum_i c_i h^-a_i * sum_{j=1..n} w_i[j] y[n-j]
            hist = weights[:, 1 : n + 1] @ y[n - 1 :: -1][:n]
            history = float(scaled @ hist)
        yn = (gain * u[n] - history) / implicit
        if not math.isfinite(yn) or abs(yn) > cfg.bound:
            y[n] = yn if math.isfinite(yn) else math.copysign(cfg.bound * 10, yn if yn == yn else 1.0)
            diverged_at = float(times[n])
            last = n
            break
        y[n] = yn

    times = times[: last + 1]
    y = y[: last + 1]
    finite = y[np.isfinite(y)]
    peak = float(np.max(np.abs(finite))) if len(finite) else math.inf

    if diverged_at is not None:
        verdict = DIVERGED
    else:
        tail = y[int(math.floor(0.9 * len(y))):]
        half = len(tail) // 2
        first_max = float(np.max(np.abs(tail[:half]))) if half else 0.0
        second_max = float(np.max(np.abs(tail[half:]))) if len(tail) > half else 0.0
        envelope_ok = second_max <= first_max * (1.0 + 1e-9) + 1e-300
        if envelope_ok or peak < cfg.bound / 10.0:
            verdict = BOUNDED
        else:
            verdict = INCONCLUSIVE
    return SimResult(times=times, outputs=y, verdict=verdict, diverged_at=diverged_at, peak=peak)
