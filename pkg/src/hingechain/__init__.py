"""hingechain: reach analysis and critical-configuration census for serial
body-and-hinge chains in R^d.

The squared distance between the two marked points of a chain is a
Morse-Bott function on the torus of joint angles; this package locates and
classifies its critical configurations, bounds their number, and computes
the certified global maximum reach by minimizing the length of a polygonal
arc threaded through the hinges.
"""

from .chain import (
    ChainSpec,
    CriticalHessian,
    end_point,
    end_point_many,
    gradient,
    hessian_critical,
    hessian_numeric,
    hinge_placement,
    normalize_theta,
    rebase,
    squared_distance,
    squared_distance_many,
    value_and_gradient_many,
)
from .chainfile import format_chain, load_chain, parse_chain_text
from .critical import (
    Census,
    Classification,
    CriticalRecord,
    SearchConfig,
    classify,
    euler_alt_sum,
    eulerian_bound,
    eulerian_numbers,
    find_critical,
    flat_index,
    incidence_residuals,
    intersection_params,
    max_ordered,
    min_ordered,
    polish,
    torus_distance,
)
from .geom import (
    AffineSubspace,
    HingeFrame,
    Incidence,
    closest_point,
    distance_to,
    hinge_frame,
    line,
    line_meet,
    plane_basis,
    rotate_about,
)
from .grid import grid_max, grid_seeds
from .kernels import BACKEND
from .panel import (
    FoldReport,
    MinReport,
    PanelChainSpec,
    flat_configurations,
    flatten_reference,
    fold_points,
    involution,
    min_candidates,
    orbit,
)
from .reach import (
    ArcWitness,
    Certification,
    ReachResult,
    arc_length,
    certify_global_max,
    max_reach,
    min_polygonal_arc,
    single_hinge_min,
    straighten,
)

__version__ = "0.1.0"

__all__ = [
    "AffineSubspace",
    "ArcWitness",
    "BACKEND",
    "Census",
    "Certification",
    "ChainSpec",
    "Classification",
    "CriticalHessian",
    "CriticalRecord",
    "FoldReport",
    "HingeFrame",
    "Incidence",
    "MinReport",
    "PanelChainSpec",
    "ReachResult",
    "SearchConfig",
    "arc_length",
    "certify_global_max",
    "classify",
    "closest_point",
    "distance_to",
    "end_point",
    "end_point_many",
    "euler_alt_sum",
    "eulerian_bound",
    "eulerian_numbers",
    "find_critical",
    "flat_configurations",
    "flat_index",
    "flatten_reference",
    "fold_points",
    "format_chain",
    "gradient",
    "grid_max",
    "grid_seeds",
    "hessian_critical",
    "hessian_numeric",
    "hinge_frame",
    "hinge_placement",
    "incidence_residuals",
    "intersection_params",
    "involution",
    "line",
    "line_meet",
    "load_chain",
    "max_ordered",
    "max_reach",
    "min_candidates",
    "min_ordered",
    "min_polygonal_arc",
    "normalize_theta",
    "orbit",
    "parse_chain_text",
    "plane_basis",
    "polish",
    "rebase",
    "rotate_about",
    "single_hinge_min",
    "squared_distance",
    "squared_distance_many",
    "straighten",
    "torus_distance",
    "value_and_gradient_many",
]
