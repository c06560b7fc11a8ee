"""slelab: a numerical laboratory for chordal SLE.

Scaling calculus and closed-form hitting bounds, the circle-family
machinery behind the multi-point bound, a Loewner-equation simulation
engine (exact slit-map traces plus a fast conformal-flow engine for large
ensembles), Monte Carlo estimators for hitting probabilities and
Minkowski-content moments, and an experiment harness with reproducible
substreams.
"""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    HalfPlanePoint,
    MobiusMap,
    PointConfig,
    SleParams,
    boundary_green_upper,
    derive_params,
    green_domain,
    green_halfplane,
    multipoint_green_upper,
    multipoint_interior_bound,
    p_ratio,
    p_scaling,
)
from .estimators import (  # noqa: F401
    EstimateResult,
    ExponentFit,
    HalfDisk,
    Rect,
    content_moments,
    exponent_fit,
    hit_prob,
    hitting_exponent,
    integral_lk_bound,
    minkowski_content,
)
from .geometry import (  # noqa: F401
    Circle,
    CircleFamily,
    circle_family,
    family_bound_product,
)
from .loewner import (  # noqa: F401
    DrivingPath,
    HullProbe,
    SimConfig,
    Trace,
    dist_to_trace,
    forward_probe,
    hcap_estimate,
    sample_driver,
    trace_from_driver,
)
