"""Ray tracing: hairs of disjoint-type maps and canonical rays of the target map"""
from .canonical import (
    DEFAULT_TRACKED,
    CanonicalRay,
    InitialConfiguration,
    PathLifter,
    SplitEvent,
    build_canonical_rays,
    build_initial_configuration,
    check_agreement_interval,
    count_formula,
    default_tracked_addresses,
    extend_one_level,
    saturate_configuration,
    signed_addresses_of,
)
from .tracer import (
    HairTracer,
    PullbackConfig,
    RayTail,
    backward_contraction,
    endpoint_estimate,
    hair_points,
    inverse_branch,
    trace_many,
    trace_ray_disjoint,
    trace_ray_tail,
    verify_ray_dynamics,
)

__all__ = [
    "DEFAULT_TRACKED",
    "CanonicalRay",
    "HairTracer",
    "InitialConfiguration",
    "PathLifter",
    "PullbackConfig",
    "RayTail",
    "SplitEvent",
    "backward_contraction",
    "build_canonical_rays",
    "build_initial_configuration",
    "check_agreement_interval",
    "count_formula",
    "default_tracked_addresses",
    "endpoint_estimate",
    "extend_one_level",
    "hair_points",
    "inverse_branch",
    "saturate_configuration",
    "signed_addresses_of",
    "trace_many",
    "trace_ray_disjoint",
    "trace_ray_tail",
    "verify_ray_dynamics",
]
