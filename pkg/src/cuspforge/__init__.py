"""Cusp shapes of augmented links from circle packings, with cone-deformation bounds."""

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    HeightEnvelope,
    cusp_boundary_term,
    dehn_filling_check,
    height_envelope,
    knot_cusp_bounds,
    meridian_lower,
    quad_width,
    rate_bounds,
    teich_speed,
    two_bridge_bounds,
)
from .diagram import (
    AndreevViolation,
    DiagramError,
    NerveTriangulation,
    TwistDiagram,
    ValidationReport,
    dump_diagram,
    gen_two_bridge,
    load_diagram,
    nerve,
    parse_diagram,
    validate,
)
from .hkfun import HkConstants, HypothesisError, QuadratureConfig, constants
from .mobius import GeneralizedCircle
from .packing import (
    CirclePacking,
    CuspReport,
    PackingError,
    RectangleShape,
    cusp_report,
    dual_circle,
    pack_diagram,
    rectangle_at,
    slope_norm_length,
    solve_packing,
)
from .boundary_lab import (
    FeasiblePoint,
    QuadraticBoundarySystem,
    count_zeros_n2,
    eval_b,
    feasible_point,
    kerckhoff_point,
    rescale_min_one,
    validity_check,
)
