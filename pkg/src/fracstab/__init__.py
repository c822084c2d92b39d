"""Stability analysis of fractional-order linear systems with unknown
parameters: exact rational orders, the commensurate argument-condition
verdict, stability boundary curves in a two-parameter plane, region
classification with order and parameter sweeps, and an independent
time-domain boundedness oracle.
"""

__version__ = "0.1.0"

from .quasipoly import (
    ConfigError,
    FracOrder,
    FracSystem,
    Known,
    QuasiPolynomial,
    Unknown,
    bind,
    parse_system,
    serialize_system,
    substitute,
)
from .rootfind import IntPolynomial, RootfindError, RootSet, find_roots
from .stability import (
    CommensurateForm,
    StabilityError,
    StabilityVerdict,
    Verdict,
    commensurate,
    matignon_check,
)
from .boundaries import (
    BoundarySet,
    CrbBranch,
    Line,
    boundary_set,
    crb_commensurate_pair,
    crb_general,
    crb_three_term,
    default_omega_grid,
    eval_boundary_parts,
    irb_line,
    rrb_line,
)
from .regions import (
    RegionMap,
    RobustRegion,
    SweepStack,
    classify_window,
    robust_intersection,
    sweep_order,
    sweep_parameter,
)
from .simulate import SimConfig, SimResult, SimulationError, gl_simulate

__all__ = [
    "__version__",
    "ConfigError",
    "FracOrder",
    "FracSystem",
    "Known",
    "QuasiPolynomial",
    "Unknown",
    "bind",
    "parse_system",
    "serialize_system",
    "substitute",
    "IntPolynomial",
    "RootfindError",
    "RootSet",
    "find_roots",
    "CommensurateForm",
    "StabilityError",
    "StabilityVerdict",
    "Verdict",
    "commensurate",
    "matignon_check",
    "BoundarySet",
    "CrbBranch",
    "Line",
    "boundary_set",
    "crb_commensurate_pair",
    "crb_general",
    "crb_three_term",
    "default_omega_grid",
    "eval_boundary_parts",
    "irb_line",
    "rrb_line",
    "RegionMap",
    "RobustRegion",
    "SweepStack",
    "classify_window",
    "robust_intersection",
    "sweep_order",
    "sweep_parameter",
    "SimConfig",
    "SimResult",
    "SimulationError",
    "gl_simulate",
]
