"""Deterministic file emission: CSV, JSON and self-contained SVG.

Every float prints through repr(), Python's shortest round-trip form, so
repeated runs with the same inputs produce byte-identical text no matter
how many worker threads computed the arrays.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .boundaries import BoundarySet
from .regions import RegionMap, RobustRegion, SweepStack
from .simulate import SimResult
from .stability import StabilityVerdict, Verdict

__all__ = [
    "fmt",
    "verdict_json",
    "boundary_csv",
    "boundary_svg",
    "region_csv",
    "region_json",
    "region_svg",
    "sweep_index_json",
    "stack_svg",
    "robust_csv",
    "robust_json",
    "trajectory_csv",
    "sim_verdict_json",
    "RunManifest",
]

_COLORS = {
    Verdict.STABLE: "#3fa64b",
    Verdict.UNSTABLE: "#d94f3d",
    Verdict.MARGINAL: "#000000",
    Verdict.UNKNOWN: "#9e9e9e",
}


def fmt(x) -> str:
    """Shortest round-trip decimal form of a float; negative zero prints
    as plain zero."""
    v = float(x)
    if v == 0.0:
        v = 0.0
    return repr(v)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def verdict_json(verdict: StabilityVerdict) -> str:
    roots = []
    args = []
    for z, arg, mult in verdict.witnesses:
        for _ in range(mult):
            roots.append([z.real, z.imag])
            args.append(arg)
    return _dumps(
        {
            "class": verdict.verdict.label,
            "margin": verdict.margin,
            "base_order": str(verdict.base),
            "roots": roots,
            "arguments": args,
        }
    )


def boundary_csv(bset: BoundarySet) -> str:
    lines = ["omega,p1,p2,branch_id"]
    for line_obj in (bset.rrb, bset.irb):
        if line_obj is None:
            continue
        seg = line_obj.segment(bset.window)
        if seg is None:
            continue
        for x, y in seg:
            lines.append(f",{fmt(x)},{fmt(y)},{line_obj.kind}")
    for idx, branch in enumerate(bset.crb):
        tag = f"crb{idx}"
        for omega, (p1, p2) in branch.samples:
            lines.append(f"{fmt(omega)},{fmt(p1)},{fmt(p2)},{tag}")
    return "\n".join(lines) + "\n"


def region_csv(rm: RegionMap) -> str:
    xs = rm.centers(0)
    ys = rm.centers(1)
    lines = ["p1,p2,verdict"]
    for i in range(rm.resolution[0]):
        xi = fmt(xs[i])
        row = rm.codes[i]
        for j in range(rm.resolution[1]):
            lines.append(f"{xi},{fmt(ys[j])},{Verdict(int(row[j])).label}")
    return "\n".join(lines) + "\n"


def region_json(rm: RegionMap) -> str:
    return _dumps(
        {
            "window": [list(rm.window[0]), list(rm.window[1])],
            "resolution": list(rm.resolution),
            "regions": [
                {
                    "id": r.id,
                    "verdict": r.verdict.label,
                    "representative": [r.representative[0], r.representative[1]],
                    "cells": r.cells,
                }
                for r in rm.regions
            ],
            "stable_cells": rm.stable_cell_count(),
            "marginal_cells": rm.marginal_cells,
            "unknown_cells": rm.unknown_cells,
        }
    )


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

_PLOT = 640.0
_PAD_L, _PAD_R, _PAD_T, _PAD_B = 70.0, 20.0, 34.0, 58.0


class _Frame:
    """Window-to-pixel transform with the vertical axis flipped."""

    def __init__(self, window):
        (self.x0, self.x1), (self.y0, self.y1) = window

    def sx(self, x):
        return _PAD_L + (x - self.x0) / (self.x1 - self.x0) * _PLOT

    def sy(self, y):
        return _PAD_T + (self.y1 - y) / (self.y1 - self.y0) * _PLOT


def _svg_open(title: str) -> list:
    w = _PAD_L + _PLOT + _PAD_R
    h = _PAD_T + _PLOT + _PAD_B
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {fmt(w)} {fmt(h)}" '
        f'width="{fmt(w)}" height="{fmt(h)}">',
        f'<rect x="0" y="0" width="{fmt(w)}" height="{fmt(h)}" fill="#ffffff"/>',
        f'<text x="{fmt(_PAD_L + _PLOT / 2)}" y="22" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15" fill="#000000">{title}</text>',
    ]


def _svg_axes(out: list, frame: _Frame, names) -> None:
    x0, x1, y0, y1 = frame.x0, frame.x1, frame.y0, frame.y1
    out.append(
        f'<rect x="{fmt(frame.sx(x0))}" y="{fmt(frame.sy(y1))}" width="{fmt(_PLOT)}" '
        f'height="{fmt(_PLOT)}" fill="none" stroke="#000000" stroke-width="1"/>'
    )
    style = 'font-family="sans-serif" font-size="12" fill="#000000"'
    out.append(
        f'<text x="{fmt(frame.sx(x0))}" y="{fmt(frame.sy(y0) + 16)}" text-anchor="middle" {style}>{fmt(x0)}</text>'
    )
    out.append(
        f'<text x="{fmt(frame.sx(x1))}" y="{fmt(frame.sy(y0) + 16)}" text-anchor="middle" {style}>{fmt(x1)}</text>'
    )
    out.append(
        f'<text x="{fmt(frame.sx(x0) - 8)}" y="{fmt(frame.sy(y0) + 4)}" text-anchor="end" {style}>{fmt(y0)}</text>'
    )
    out.append(
        f'<text x="{fmt(frame.sx(x0) - 8)}" y="{fmt(frame.sy(y1) + 4)}" text-anchor="end" {style}>{fmt(y1)}</text>'
    )
    out.append(
        f'<text x="{fmt(_PAD_L + _PLOT / 2)}" y="{fmt(frame.sy(y0) + 40)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14" fill="#000000">{names[0]}</text>'
    )
    cy = _PAD_T + _PLOT / 2
    out.append(
        f'<text x="18" y="{fmt(cy)}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14" fill="#000000" transform="rotate(-90 18 {fmt(cy)})">{names[1]}</text>'
    )


def _boundary_overlay(out: list, frame: _Frame, bset: BoundarySet) -> None:
    for line_obj in (bset.rrb, bset.irb):
        if line_obj is None:
            continue
        seg = line_obj.segment(((frame.x0, frame.x1), (frame.y0, frame.y1)))
        if seg is None:
            continue
        (xa, ya), (xb, yb) = seg
        out.append(
            f'<line x1="{fmt(frame.sx(xa))}" y1="{fmt(frame.sy(ya))}" '
            f'x2="{fmt(frame.sx(xb))}" y2="{fmt(frame.sy(yb))}" '
            f'stroke="#1040c0" stroke-width="1.5" stroke-dasharray="6,3"/>'
        )
    for branch in bset.crb:
        pts = []
        for _, (p1, p2) in branch.samples:
            if frame.x0 <= p1 <= frame.x1 and frame.y0 <= p2 <= frame.y1:
                pts.append(f"{fmt(frame.sx(p1))},{fmt(frame.sy(p2))}")
            elif pts:
                if len(pts) > 1:
                    out.append(
                        f'<polyline points="{" ".join(pts)}" fill="none" '
                        f'stroke="#1040c0" stroke-width="1.5"/>'
                    )
                pts = []
        if len(pts) > 1:
            out.append(
                f'<polyline points="{" ".join(pts)}" fill="none" '
                f'stroke="#1040c0" stroke-width="1.5"/>'
            )


def region_svg(rm: RegionMap, bset: BoundarySet | None = None, title: str = "stability regions") -> str:
    frame = _Frame(rm.window)
    out = _svg_open(title)
    n1, n2 = rm.resolution
    xs_edges = rm.window[0][0] + np.arange(n1 + 1) * (rm.window[0][1] - rm.window[0][0]) / n1
    ys_edges = rm.window[1][0] + np.arange(n2 + 1) * (rm.window[1][1] - rm.window[1][0]) / n2
    # column-wise run-length merging keeps the file small
    for i in range(n1):
        col = rm.codes[i]
        j = 0
        while j < n2:
            k = j
            while k < n2 and col[k] == col[j]:
                k += 1
            color = _COLORS[Verdict(int(col[j]))]
            x_left = frame.sx(xs_edges[i])
            y_top = frame.sy(ys_edges[k])
            w = frame.sx(xs_edges[i + 1]) - x_left
            h = frame.sy(ys_edges[j]) - y_top
            out.append(
                f'<rect x="{fmt(x_left)}" y="{fmt(y_top)}" width="{fmt(w)}" '
                f'height="{fmt(h)}" fill="{color}"/>'
            )
            j = k
    if bset is not None:
        _boundary_overlay(out, frame, bset)
    names = bset.unknowns if bset is not None else ("p1", "p2")
    _svg_axes(out, frame, names)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def boundary_svg(bset: BoundarySet, title: str = "stability boundaries") -> str:
    frame = _Frame(bset.window)
    out = _svg_open(title)
    _boundary_overlay(out, frame, bset)
    _svg_axes(out, frame, bset.unknowns)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _stable_outline(rm: RegionMap) -> list:
    """Cell-edge segments between stable and non-stable cells, in window
    coordinates, emitted in scan order."""
    n1, n2 = rm.resolution
    stable = rm.codes == Verdict.STABLE
    xs = rm.window[0][0] + np.arange(n1 + 1) * (rm.window[0][1] - rm.window[0][0]) / n1
    ys = rm.window[1][0] + np.arange(n2 + 1) * (rm.window[1][1] - rm.window[1][0]) / n2
    segs = []
    for i in range(n1):
        for j in range(n2):
            if not stable[i, j]:
                continue
            if i == 0 or not stable[i - 1, j]:
                segs.append(((xs[i], ys[j]), (xs[i], ys[j + 1])))
            if i == n1 - 1 or not stable[i + 1, j]:
                segs.append(((xs[i + 1], ys[j]), (xs[i + 1], ys[j + 1])))
            if j == 0 or not stable[i, j - 1]:
                segs.append(((xs[i], ys[j]), (xs[i + 1], ys[j])))
            if j == n2 - 1 or not stable[i, j + 1]:
                segs.append(((xs[i], ys[j + 1]), (xs[i + 1], ys[j + 1])))
    return segs


def stack_svg(stack: SweepStack, title: str = "stability region stack") -> str:
    """Stacked outlines of the stable set, one per layer; the sweep value
    maps to stroke lightness (dark = low, light = high)."""
    frame = _Frame(stack.layers[0].window)
    out = _svg_open(title)
    count = len(stack.layers)
    for idx, layer in enumerate(stack.layers):
        light = 25 + int(50 * idx / max(1, count - 1))
        path = []
        for (xa, ya), (xb, yb) in _stable_outline(layer):
            path.append(
                f"M {fmt(frame.sx(xa))} {fmt(frame.sy(ya))} L {fmt(frame.sx(xb))} {fmt(frame.sy(yb))}"
            )
        if path:
            out.append(
                f'<path d="{" ".join(path)}" fill="none" stroke="hsl(210,70%,{light}%)" '
                f'stroke-width="1"/>'
            )
    _svg_axes(out, frame, ("p1", "p2"))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def sweep_index_json(stack: SweepStack, files: list) -> str:
    return _dumps(
        {
            "axis": stack.axis,
            "values": [v for v in stack.values],
            "layers": files,
            "window": [list(stack.layers[0].window[0]), list(stack.layers[0].window[1])],
            "resolution": list(stack.layers[0].resolution),
        }
    )


def robust_csv(rr: RobustRegion) -> str:
    n1, n2 = rr.resolution
    xs = rr.window[0][0] + (np.arange(n1) + 0.5) * (rr.window[0][1] - rr.window[0][0]) / n1
    ys = rr.window[1][0] + (np.arange(n2) + 0.5) * (rr.window[1][1] - rr.window[1][0]) / n2
    lines = ["p1,p2,robust"]
    for i in range(n1):
        xi = fmt(xs[i])
        for j in range(n2):
            lines.append(f"{xi},{fmt(ys[j])},{int(rr.mask[i, j])}")
    return "\n".join(lines) + "\n"


def robust_json(rr: RobustRegion) -> str:
    return _dumps(
        {
            "window": [list(rr.window[0]), list(rr.window[1])],
            "resolution": list(rr.resolution),
            "swept_values": [v for v in rr.values],
            "robust_cells": int(np.count_nonzero(rr.mask)),
        }
    )


def trajectory_csv(result: SimResult) -> str:
    lines = ["t,y"]
    for t, y in zip(result.times, result.outputs):
        lines.append(f"{fmt(t)},{fmt(y)}")
    return "\n".join(lines) + "\n"


def sim_verdict_json(result: SimResult) -> str:
    return _dumps(
        {
            "verdict": result.verdict,
            "diverged_at": result.diverged_at,
            "peak": result.peak,
            "samples": int(len(result.times)),
        }
    )


@dataclass
class RunManifest:
    """Reproducibility record written alongside every output set."""

    command: list
    config: dict
    input_digest: str
    version: str
    elapsed_seconds: float

    @staticmethod
    def digest(text: str) -> str:
        return "sha256:" + hashlib.sha256(text.encode()).hexdigest()

    def to_json(self) -> str:
        return _dumps(
            {
                "command": self.command,
                "config": self.config,
                "input_digest": self.input_digest,
                "version": self.version,
                "elapsed_seconds": self.elapsed_seconds,
            }
        )
