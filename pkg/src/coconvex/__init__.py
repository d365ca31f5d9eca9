"""Convex and coconvex polynomial approximation on compact domains."""

from .approx import (
    ApproxResult,
    DeviationKind,
    JacksonReport,
    ModulusConfig,
    best_shape_approx,
    check_jackson_bound,
    jackson_constant,
)
from .domainsep import (
    check_dccp,
    check_dcp,
    compact_neighborhood,
    find_witness,
    strictly_separates,
    strongly_separated,
    supporting_hyperplane,
)
from .errors import *  # noqa: F401,F403
from .funcexpr import PiecewiseFn, parse_expr, parse_piecewise, pointwise_deviation, sup_deviation
from .lp import lp_minimax_solve
from .polynomial import (
    Interval,
    Polynomial,
    extrema,
    inflection_points,
    preimage_interval,
    real_roots,
    sup_abs,
)
from .shape import YPartition, in_delta2, secant_convexity_test, sign_pattern
from .smoothness import ModulusSpec, apply_replication_weight, modulus, sym_diff
from .worked_examples import ReplicationRow, run_replication

__version__ = "0.1.0"
