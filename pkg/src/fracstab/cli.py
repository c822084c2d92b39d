"""Command-line surface.

Subcommands: check, boundaries, region, sweep, simulate. The check exit
code encodes the verdict (0 stable, 1 unstable, 2 marginal) so shell
scripts can grid-search without parsing JSON; anything above 2 is an
error (64 unreadable input, 65 invalid input or configuration, 66 usage,
70 internal). Every file-writing command also writes run_manifest.json
recording the resolved configuration; re-running with the same
configuration reproduces the CSV/JSON outputs byte for byte.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction

from . import __version__
from . import emit
from .boundaries import boundary_set, default_omega_grid
from .quasipoly import ConfigError, FracSystem, parse_system, substitute
from .regions import classify_window, robust_intersection, sweep_order, sweep_parameter
from .simulate import SimConfig, SimulationError, gl_simulate
from .stability import StabilityError, Verdict, matignon_check

EXIT_UNREADABLE = 64
EXIT_INVALID = 65
EXIT_USAGE = 66
EXIT_INTERNAL = 70


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _parse_fix(pairs):
    out = {}
    for item in pairs or []:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise ConfigError(f"expected name=value, got {item!r}")
        try:
            out[name] = float(value)
        except ValueError as exc:
            raise ConfigError(f"value for {name!r} is not a number: {value!r}") from exc
    return out


def _parse_plane(text):
    parts = [p.strip() for p in (text or "").split(",")]
    if len(parts) != 2 or not all(parts):
        raise ConfigError(f"--plane needs two comma-separated names, got {text!r}")
    return tuple(parts)


def _parse_window(text):
    if text is None:
        return ((-10.0, 10.0), (-10.0, 10.0))
    try:
        xpart, ypart = text.split(",")
        x0, x1 = (float(v) for v in xpart.split(":"))
        y0, y1 = (float(v) for v in ypart.split(":"))
    except ValueError as exc:
        raise ConfigError(f"--window must look like x0:x1,y0:y1, got {text!r}") from exc
    return ((x0, x1), (y0, y1))


def _parse_res(text):
    if text is None:
        return (256, 256)
    try:
        n1, n2 = (int(v) for v in text.lower().split("x"))
    except ValueError as exc:
        raise ConfigError(f"--res must look like 256x256, got {text!r}") from exc
    return (n1, n2)


def _parse_omega(text):
    if text is None:
        return default_omega_grid()
    try:
        lo, hi, count = text.split(":")
        return default_omega_grid(float(lo), float(hi), int(count))
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"--omega must look like 1e-4:1e4:2000, got {text!r}") from exc


def _parse_sweep(text):
    """name:start:stop:step with exact decimal stepping, optional :mode."""
    parts = (text or "").split(":")
    if len(parts) not in (4, 5):
        raise ConfigError(f"--sweep must look like name:start:stop:step, got {text!r}")
    name = parts[0]
    mode = parts[4] if len(parts) == 5 else None
    try:
        start, stop, step = (Fraction(p) for p in parts[1:4])
    except ValueError as exc:
        raise ConfigError(f"--sweep values must be decimal numbers, got {text!r}") from exc
    if step <= 0 or stop < start:
        raise ConfigError("--sweep needs step > 0 and stop >= start")
    values = []
    v = start
    while v <= stop:
        values.append(v)
        v += step
    return name, values, mode


def _read_system(path) -> tuple[FracSystem, str]:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_system(text), text


def _resolve_bindings(system: FracSystem, fixes, required=True):
    names = system.denominator.unknowns
    for name in fixes:
        if name not in system.unknowns:
            raise ConfigError(f"parameter {name!r} does not appear in the system")
    if required:
        missing = [n for n in names if n not in fixes]
        if missing:
            raise ConfigError(f"missing value for parameter {missing[0]!r} (use -p name=value)")
    return fixes


def _outdir(args):
    path = args.out or "."
    os.makedirs(path, exist_ok=True)
    return path


def _formats(args):
    raw = (args.format or "csv,json,svg").lower()
    chosen = {p.strip() for p in raw.split(",") if p.strip()}
    bad = chosen - {"csv", "json", "svg"}
    if bad:
        raise ConfigError(f"unknown format {sorted(bad)[0]!r}")
    return chosen


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    print(f"wrote {path}", file=sys.stderr)


def _manifest(args, outdir, config, source_text, started):
    manifest = emit.RunManifest(
        command=[args.command] + (args.raw_args or []),
        config=config,
        input_digest=emit.RunManifest.digest(source_text),
        version=__version__,
        elapsed_seconds=time.perf_counter() - started,
    )
    _write(os.path.join(outdir, "run_manifest.json"), manifest.to_json())


def _mode_for_template(system: FracSystem, explicit):
    """Choose the order-sweep flavor from the template when not forced."""
    if explicit:
        if explicit not in ("basset", "commensurate"):
            raise ConfigError(f"sweep mode must be basset or commensurate, got {explicit!r}")
        return explicit
    orders = system.denominator.orders()
    if len(orders) != 3:
        raise ConfigError("order sweeps need a three-term denominator")
    mid, top = orders[1].fraction, orders[2].fraction
    if top == 1:
        return "basset"
    if top == 2 * mid:
        return "commensurate"
    raise ConfigError(
        "cannot infer sweep mode from the template orders; append :basset or "
        ":commensurate to --sweep"
    )


def cmd_check(args) -> int:
    system, _ = _read_system(args.system)
    fixes = _resolve_bindings(system, _parse_fix(args.fix))
    bound = substitute(system.denominator, fixes)
    verdict = matignon_check(bound)
    text = emit.verdict_json(verdict)
    sys.stdout.write(text)
    if args.out:
        outdir = _outdir(args)
        _write(os.path.join(outdir, "verdict.json"), text)
    return {Verdict.STABLE: 0, Verdict.UNSTABLE: 1, Verdict.MARGINAL: 2}[verdict.verdict]


def cmd_boundaries(args) -> int:
    started = time.perf_counter()
    system, source = _read_system(args.system)
    plane = _parse_plane(args.plane)
    fixes = _parse_fix(args.fix)
    window = _parse_window(args.window)
    omega = _parse_omega(args.omega)
    bset = boundary_set(system.denominator, plane, fixes, window, omega)
    if not any(b.samples for b in bset.crb):
        print("warning: no boundary curve in range", file=sys.stderr)
    outdir = _outdir(args)
    formats = _formats(args)
    if "csv" in formats:
        _write(os.path.join(outdir, "boundaries.csv"), emit.boundary_csv(bset))
    if "svg" in formats:
        _write(os.path.join(outdir, "boundaries.svg"), emit.boundary_svg(bset))
    _manifest(
        args,
        outdir,
        {
            "plane": list(plane),
            "fix": fixes,
            "window": [list(window[0]), list(window[1])],
            "omega": [float(omega[0]), float(omega[-1]), len(omega)],
            "format": sorted(formats),
        },
        source,
        started,
    )
    return 0


def cmd_region(args) -> int:
    started = time.perf_counter()
    system, source = _read_system(args.system)
    plane = _parse_plane(args.plane)
    fixes = _parse_fix(args.fix)
    window = _parse_window(args.window)
    resolution = _parse_res(args.res)
    rm = classify_window(system.denominator, plane, fixes, window, resolution)
    outdir = _outdir(args)
    formats = _formats(args)
    if "csv" in formats:
        _write(os.path.join(outdir, "region.csv"), emit.region_csv(rm))
    if "json" in formats:
        _write(os.path.join(outdir, "region.json"), emit.region_json(rm))
    if "svg" in formats:
        bset = boundary_set(system.denominator, plane, fixes, window)
        _write(os.path.join(outdir, "region.svg"), emit.region_svg(rm, bset))
    _manifest(
        args,
        outdir,
        {
            "plane": list(plane),
            "fix": fixes,
            "window": [list(window[0]), list(window[1])],
            "resolution": list(resolution),
            "format": sorted(formats),
        },
        source,
        started,
    )
    return 0


def cmd_sweep(args) -> int:
    started = time.perf_counter()
    system, source = _read_system(args.system)
    plane = _parse_plane(args.plane)
    fixes = _parse_fix(args.fix)
    window = _parse_window(args.window)
    resolution = _parse_res(args.res)
    name, values, mode_text = _parse_sweep(args.sweep)
    if name == "alpha":
        mode = _mode_for_template(system, mode_text)
        stack = sweep_order(
            system.denominator, plane, values, fixes, window, resolution, mode
        )
    else:
        stack = sweep_parameter(
            system.denominator, plane, name, [float(v) for v in values], fixes,
            window, resolution,
        )
    outdir = _outdir(args)
    formats = _formats(args)
    files = []
    for idx, (value, layer) in enumerate(zip(stack.values, stack.layers)):
        entry = {"value": value}
        stem = f"layer_{idx:03d}"
        if "csv" in formats:
            path = os.path.join(outdir, stem + ".csv")
            _write(path, emit.region_csv(layer))
            entry["csv"] = stem + ".csv"
        if "json" in formats:
            path = os.path.join(outdir, stem + ".json")
            _write(path, emit.region_json(layer))
            entry["json"] = stem + ".json"
        files.append(entry)
    _write(os.path.join(outdir, "index.json"), emit.sweep_index_json(stack, files))
    if "svg" in formats:
        _write(os.path.join(outdir, "stack.svg"), emit.stack_svg(stack))
    if args.robust:
        robust = robust_intersection(stack)
        if "csv" in formats:
            _write(os.path.join(outdir, "robust.csv"), emit.robust_csv(robust))
        if "json" in formats:
            _write(os.path.join(outdir, "robust.json"), emit.robust_json(robust))
    _manifest(
        args,
        outdir,
        {
            "plane": list(plane),
            "fix": fixes,
            "window": [list(window[0]), list(window[1])],
            "resolution": list(resolution),
            "sweep": args.sweep,
            "robust": bool(args.robust),
            "format": sorted(formats),
        },
        source,
        started,
    )
    return 0


def cmd_simulate(args) -> int:
    started = time.perf_counter()
    system, source = _read_system(args.system)
    fixes = _resolve_bindings(system, _parse_fix(args.fix))
    bound = substitute(system.denominator, fixes)
    if not system.numerator.degree.is_zero or not system.numerator.is_known:
        raise ConfigError("simulation supports constant known numerators only")
    forcing = system.gain * system.numerator.terms[0][0].value
    cfg = SimConfig(
        h=args.sim_h,
        t_final=args.horizon,
        input_kind=args.input,
        amplitude=args.amplitude,
        bound=args.bound,
    )
    result = gl_simulate(bound, forcing, cfg)
    text = emit.sim_verdict_json(result)
    sys.stdout.write(text)
    outdir = _outdir(args)
    formats = _formats(args)
    if "csv" in formats:
        _write(os.path.join(outdir, "trajectory.csv"), emit.trajectory_csv(result))
    if "json" in formats:
        _write(os.path.join(outdir, "verdict.json"), text)
    _manifest(
        args,
        outdir,
        {
            "fix": fixes,
            "h": cfg.h,
            "horizon": cfg.t_final,
            "input": cfg.input_kind,
            "amplitude": cfg.amplitude,
            "bound": cfg.bound,
            "format": sorted(formats),
        },
        source,
        started,
    )
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="fracstab",
        description="Stability analysis and stability regions for fractional-order systems",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, plane=False, grid=False):
        p.add_argument("system", help="system definition file (JSON document)")
        p.add_argument(
            "-p", "--fix", action="append", metavar="NAME=VALUE",
            help="bind a parameter (repeatable)",
        )
        p.add_argument("--out", help="output directory (default: current)")
        p.add_argument("--format", help="comma list of csv,json,svg (default all)")
        if plane:
            p.add_argument("--plane", required=True, metavar="P1,P2",
                           help="the two free parameters spanning the plot plane")
            p.add_argument("--window", metavar="X0:X1,Y0:Y1",
                           help="parameter window (default -10:10,-10:10)")
        if grid:
            p.add_argument("--res", metavar="N1xN2", help="grid resolution (default 256x256)")

    p = sub.add_parser("check", help="stability verdict for fully bound parameters")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("boundaries", help="stability boundary curves in a parameter plane")
    common(p, plane=True)
    p.add_argument("--omega", metavar="LO:HI:COUNT", help="frequency grid (default 1e-4:1e4:2000)")
    p.set_defaults(func=cmd_boundaries)

    p = sub.add_parser("region", help="classify a parameter window into stability regions")
    common(p, plane=True, grid=True)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("sweep", help="stack of region maps over a third parameter or the order")
    common(p, plane=True, grid=True)
    p.add_argument(
        "--sweep", required=True, metavar="NAME:START:STOP:STEP",
        help="swept parameter; use name 'alpha' to sweep the fractional order "
             "(append :basset or :commensurate to force the order pattern)",
    )
    p.add_argument("--robust", action="store_true",
                   help="also emit the cells stable across every layer")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="time-domain step/impulse response")
    common(p)
    p.add_argument("--sim-h", type=float, default=0.01, help="time step (default 0.01)")
    p.add_argument("--horizon", type=float, default=50.0, help="end time (default 50)")
    p.add_argument("--input", choices=("step", "impulse"), default="step")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--bound", type=float, default=1e6, help="divergence threshold (default 1e6)")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.raw_args = argv[1:]
    try:
        return args.func(args)
    except OSError as exc:
        print(f"fracstab: cannot read input: {exc}", file=sys.stderr)
        return EXIT_UNREADABLE
    except (ConfigError, StabilityError, SimulationError, ValueError) as exc:
        print(f"fracstab: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # pragma: no cover
        print(f"fracstab: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
