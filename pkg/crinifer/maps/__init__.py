"""Entire map families and their inverse branches"""
from .branches import SIDE_DIRECTION, SIDE_SIGN, SIDES, BranchGeometry
from .entire_maps import (
    EntireMap,
    Family,
    OrbitRecord,
    SingularData,
    critical_points_in_disc,
    default_disc_radius,
    disjoint_type_check,
    format_map_spec,
    local_degree,
    make_map,
    parse_map_spec,
    separation_check,
    singular_data,
)

__all__ = [
    "BranchGeometry",
    "EntireMap",
    "Family",
    "OrbitRecord",
    "SIDES",
    "SIDE_DIRECTION",
    "SIDE_SIGN",
    "SingularData",
    "critical_points_in_disc",
    "default_disc_radius",
    "disjoint_type_check",
    "format_map_spec",
    "local_degree",
    "make_map",
    "parse_map_spec",
    "separation_check",
    "singular_data",
]
