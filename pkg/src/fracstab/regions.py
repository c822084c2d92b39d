"""Parameter-window classification into stability regions and sweeps.

The window is classified by dense evaluation: every cell center gets the
full argument-condition verdict, then 4-connected cells of equal verdict
are merged into regions. Dense evaluation is preferred over geometric
arrangement of the boundary curves because test points stay correct near
tangencies, and the boundary curves can still be overlaid on plots.

Cells are independent, so classification parallelizes over rows; results
are written by cell index, which keeps the output identical for any
worker count. A grid cell and a direct check of the same center value go
through the same verdict kernel and therefore always agree.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import ndimage

from .quasipoly import FracOrder, Known, QuasiPolynomial, Unknown, bind
from .rootfind import D_MAX
from .stability import StabilityError, Verdict, _commensurate_base, _verdict_from_coeffs

__all__ = [
    "MIN_RESOLUTION",
    "Region",
    "RegionMap",
    "SweepStack",
    "RobustRegion",
    "worker_count",
    "classify_window",
    "sweep_parameter",
    "sweep_order",
    "robust_intersection",
]

MIN_RESOLUTION = 32

# Fraction of cells allowed to fail classification before the whole
# window is rejected as misconfigured.
MAX_FAILED_FRACTION = 0.01

_FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.uint8)


def worker_count(threads=None) -> int:
    """Worker cap: explicit argument, else FRACSTAB_THREADS, else CPU count."""
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("FRACSTAB_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


@dataclass(frozen=True)
class Region:
    """A maximal 4-connected set of equal-verdict cells."""

    id: int
    verdict: Verdict
    representative: tuple
    cells: int


@dataclass(eq=False)
class RegionMap:
    """Verdict grid over a rectangular window plus extracted regions."""

    window: tuple
    resolution: tuple
    codes: np.ndarray
    regions: list
    marginal_cells: int
    unknown_cells: int
    labels: np.ndarray = field(repr=False, default=None)

    def centers(self, axis: int) -> np.ndarray:
        lo, hi = self.window[axis]
        n = self.resolution[axis]
        return lo + (np.arange(n) + 0.5) * (hi - lo) / n

    def cell_of(self, point) -> tuple:
        idx = []
        for axis in (0, 1):
            lo, hi = self.window[axis]
            n = self.resolution[axis]
            i = int(math.floor((point[axis] - lo) / (hi - lo) * n))
            idx.append(min(max(i, 0), n - 1))
        return tuple(idx)

    def verdict_at(self, point) -> Verdict:
        return Verdict(int(self.codes[self.cell_of(point)]))

    def stable_cell_count(self) -> int:
        return int(np.count_nonzero(self.codes == Verdict.STABLE))

    def cell_center(self, i: int, j: int) -> tuple:
        return (float(self.centers(0)[i]), float(self.centers(1)[j]))


@dataclass(eq=False)
class SweepStack:
    """One RegionMap per swept value, all sharing window and resolution."""

    axis: str
    values: tuple
    layers: list

    def __post_init__(self):
        if not self.layers:
            raise ValueError("sweep produced no layers")
        w0 = self.layers[0].window
        r0 = self.layers[0].resolution
        for layer in self.layers[1:]:
            if layer.window != w0 or layer.resolution != r0:
                raise ValueError("sweep layers must share window and resolution")


@dataclass(eq=False)
class RobustRegion:
    """Cells that stay stable for every layer of a sweep."""

    window: tuple
    resolution: tuple
    mask: np.ndarray
    values: tuple

    def contains(self, point) -> bool:
        idx = []
        for axis in (0, 1):
            lo, hi = self.window[axis]
            n = self.resolution[axis]
            i = int(math.floor((point[axis] - lo) / (hi - lo) * n))
            idx.append(min(max(i, 0), n - 1))
        return bool(self.mask[tuple(idx)])


class _PlaneProblem:
    """Affine coefficient structure of a two-parameter quasi-polynomial."""

    def __init__(self, qp: QuasiPolynomial, unknowns, bindings):
        bound = bind(qp, bindings or {})
        p1, p2 = unknowns
        if set(bound.unknowns) != {p1, p2}:
            raise ValueError(
                f"plane parameters {(p1, p2)} must be exactly the free parameters, "
                f"found {list(bound.unknowns)}"
            )
        self.orders = bound.orders()
        n = len(self.orders)
        self.const = np.zeros(n)
        self.e1 = np.zeros(n)
        self.e2 = np.zeros(n)
        for i, (coeff, _) in enumerate(bound.terms):
            if isinstance(coeff, Known):
                self.const[i] = coeff.value
            elif coeff.name == p1:
                self.e1[i] = coeff.mult
            else:
                self.e2[i] = coeff.mult
        self._structures: dict[bytes, tuple] = {}

    def structure(self, mask: np.ndarray):
        """Commensurate layout for the subset of terms active at a cell."""
        key = mask.tobytes()
        cached = self._structures.get(key)
        if cached is not None:
            return cached
        orders = [o for o, keep in zip(self.orders, mask) if keep]
        if not orders:
            result = None
        else:
            base = _commensurate_base(orders)
            degree = orders[-1].fraction / base
            degree = degree.numerator  # exact by construction of the base
            if degree > D_MAX:
                result = None
            else:
                positions = np.array(
                    [int(o.fraction / base) for o in orders], dtype=np.int64
                )
                result = (float(base) * math.pi / 2.0, degree, positions)
        self._structures[key] = result
        return result

    def classify_cells(self, x: float, ys: np.ndarray):
        """Verdict codes and root-distribution signatures for the cells
        (x, ys[j]); one row of the grid.

        The signature encodes (degree, unstable root count). Two cells
        belong to the same region only when their signatures match:
        crossing the infinite-root boundary keeps the verdict but moves a
        root through infinity, which this distinguishes."""
        coeffs = self.const[None, :] + x * self.e1[None, :] + ys[:, None] * self.e2[None, :]
        out = np.full(len(ys), int(Verdict.UNKNOWN), dtype=np.int8)
        sig = np.full(len(ys), -1, dtype=np.int64)
        for j in range(len(ys)):
            vec = coeffs[j]
            mask = vec != 0.0
            info = self.structure(mask)
            if info is None:
                continue
            half_base_pi, degree, positions = info
            poly = np.zeros(degree + 1)
            poly[positions] = vec[mask]
            try:
                code, _, _, unstable = _verdict_from_coeffs(poly, half_base_pi)
            except StabilityError:
                continue
            out[j] = int(code)
            sig[j] = degree * (D_MAX + 1) + unstable
        return out, sig


def _cell_centers(window, resolution, axis):
    lo, hi = window[axis]
    n = resolution[axis]
    return lo + (np.arange(n) + 0.5) * (hi - lo) / n


def classify_window(
    qp: QuasiPolynomial,
    unknowns,
    bindings=None,
    window=((-10.0, 10.0), (-10.0, 10.0)),
    resolution=(256, 256),
    threads=None,
) -> RegionMap:
    """Classify every cell of the window and extract labeled regions.

    Cells whose verdict cannot be computed (commensurate degree overflow,
    degenerate zero polynomial) are marked unknown; more than
    MAX_FAILED_FRACTION of them aborts. Marginal cells sit on boundaries,
    belong to no region, and are counted separately.
    """
    n1, n2 = int(resolution[0]), int(resolution[1])
    if n1 < MIN_RESOLUTION or n2 < MIN_RESOLUTION:
        raise ValueError(f"resolution must be at least {MIN_RESOLUTION} per axis")
    (x0, x1), (y0, y1) = window
    if not (x1 > x0 and y1 > y0):
        raise ValueError("window must have positive extent on both axes")
    problem = _PlaneProblem(qp, unknowns, bindings)
    xs = _cell_centers(window, (n1, n2), 0)
    ys = _cell_centers(window, (n1, n2), 1)
    codes = np.empty((n1, n2), dtype=np.int8)
    signatures = np.empty((n1, n2), dtype=np.int64)

    workers = worker_count(threads)
    if workers == 1:
        for i in range(n1):
            codes[i], signatures[i] = problem.classify_cells(float(xs[i]), ys)
    else:
        def run_row(i):
            codes[i], signatures[i] = problem.classify_cells(float(xs[i]), ys)

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_row, range(n1)))

    unknown_cells = int(np.count_nonzero(codes == Verdict.UNKNOWN))
    if unknown_cells > MAX_FAILED_FRACTION * codes.size:
        raise StabilityError(
            f"{unknown_cells} of {codes.size} cells failed classification; "
            "the configuration looks degenerate"
        )
    marginal_cells = int(np.count_nonzero(codes == Verdict.MARGINAL))

    labels = np.zeros((n1, n2), dtype=np.int32)
    order = []
    next_label = 0
    in_regions = (codes == Verdict.STABLE) | (codes == Verdict.UNSTABLE)
    for sig_value in np.unique(signatures[in_regions]):
        lab, count = ndimage.label(
            in_regions & (signatures == sig_value), structure=_FOUR_CONNECTED
        )
        for k in range(1, count + 1):
            mask = lab == k
            flat = np.flatnonzero(mask)
            next_label += 1
            labels[mask] = next_label
            verdict = Verdict(int(codes.flat[flat[0]]))
            order.append((int(flat[0]), next_label, verdict, len(flat)))
    order.sort()

    regions = []
    relabel = np.zeros(next_label + 1, dtype=np.int32)
    for rid, (first, old_label, verdict, cells) in enumerate(order, start=1):
        i, j = divmod(first, n2)
        relabel[old_label] = rid
        regions.append(
            Region(
                id=rid,
                verdict=verdict,
                representative=(float(xs[i]), float(ys[j])),
                cells=cells,
            )
        )
    labels = relabel[labels]

    return RegionMap(
        window=((float(x0), float(x1)), (float(y0), float(y1))),
        resolution=(n1, n2),
        codes=codes,
        regions=regions,
        marginal_cells=marginal_cells,
        unknown_cells=unknown_cells,
        labels=labels,
    )


def sweep_parameter(
    qp: QuasiPolynomial,
    unknowns,
    sweep_name: str,
    values,
    bindings=None,
    window=((-10.0, 10.0), (-10.0, 10.0)),
    resolution=(256, 256),
    threads=None,
) -> SweepStack:
    """One classified window per value of a third, fixed parameter."""
    values = tuple(float(v) for v in values)
    if not values:
        raise ValueError("sweep needs at least one value")
    if sweep_name in tuple(unknowns):
        raise ValueError(f"sweep parameter {sweep_name!r} is already a plane axis")
    layers = []
    for v in values:
        merged = dict(bindings or {})
        merged[sweep_name] = v
        layers.append(
            classify_window(qp, unknowns, merged, window, resolution, threads)
        )
    return SweepStack(axis=sweep_name, values=values, layers=layers)


def _three_term_shape(qp: QuasiPolynomial):
    terms = qp.terms
    if len(terms) != 3 or not terms[0][1].is_zero:
        raise ValueError(
            "order sweep needs a three-term system with orders (0, a1, a2)"
        )
    return terms[0][0], terms[1][0], terms[2][0]


def sweep_order(
    qp: QuasiPolynomial,
    unknowns,
    alphas,
    bindings=None,
    window=((-10.0, 10.0), (-10.0, 10.0)),
    resolution=(256, 256),
    mode: str = "basset",
    threads=None,
) -> SweepStack:
    """Classified windows for a family of fractional orders.

    mode "basset" keeps the top order at 1 and sweeps the middle order
    alpha in (0, 1); mode "commensurate" uses orders (alpha, 2*alpha).
    Alphas are converted exactly, so 0.01 really means 1/100.
    """
    if mode not in ("basset", "commensurate"):
        raise ValueError(f"unknown sweep mode {mode!r}")
    c0, c1, c2 = _three_term_shape(qp)
    orders = []
    for alpha in alphas:
        a = FracOrder.of(alpha)
        f = float(a)
        if not (0.0 < f < 1.0):
            raise ValueError(f"swept order must lie strictly in (0, 1), got {f}")
        orders.append(a)
    if not orders:
        raise ValueError("sweep needs at least one order value")
    layers = []
    for a in orders:
        if mode == "basset":
            top = FracOrder(1)
        else:
            top = FracOrder(2 * a.num, a.den)
        layer_qp = QuasiPolynomial(((c0, FracOrder(0)), (c1, a), (c2, top)))
        layers.append(
            classify_window(layer_qp, unknowns, bindings, window, resolution, threads)
        )
    return SweepStack(axis="alpha", values=tuple(float(a) for a in orders), layers=layers)


def robust_intersection(stack: SweepStack) -> RobustRegion:
    """Cell-wise AND of stable verdicts across every layer of the stack."""
    mask = np.ones(stack.layers[0].codes.shape, dtype=bool)
    for layer in stack.layers:
        mask &= layer.codes == Verdict.STABLE
    return RobustRegion(
        window=stack.layers[0].window,
        resolution=stack.layers[0].resolution,
        mask=mask,
        values=stack.values,
    )
