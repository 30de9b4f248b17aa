"""
crinifer: dynamic rays of transcendental entire maps

Traces hairs of disjoint-type maps and canonical rays of their
postcritically separated relatives, orders them by signed external
address, and builds the semiconjugacy from the two-copy model space as a
limit of inverse-branch pullbacks.
"""
__version__ = "1.0.0"

from .config import Config
from .maps import EntireMap, make_map, parse_map_spec
from .model import ModelPoint, ModelStore, build_model_store
from .rays import CanonicalRay, PullbackConfig, RayTail, build_canonical_rays
from .semiconj import build_semiconjugacy, cauchy_report, phi_stage
from .symbolic import ExternalAddress, SignedAddress, parse_address

__all__ = [
    "CanonicalRay",
    "Config",
    "EntireMap",
    "ExternalAddress",
    "ModelPoint",
    "ModelStore",
    "PullbackConfig",
    "RayTail",
    "SignedAddress",
    "build_canonical_rays",
    "build_model_store",
    "build_semiconjugacy",
    "cauchy_report",
    "make_map",
    "parse_address",
    "parse_map_spec",
    "phi_stage",
]
