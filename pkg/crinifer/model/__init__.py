"""Model space of the disjoint-type map"""
from .space import (
    ModelPoint,
    ModelStore,
    build_model_store,
    cyclic_interval_member,
    divergence_criterion,
    model_map,
    moduli_diverge,
    order_correspondence_check,
    project,
    signed_compare,
)

__all__ = [
    "ModelPoint",
    "ModelStore",
    "build_model_store",
    "cyclic_interval_member",
    "divergence_criterion",
    "model_map",
    "moduli_diverge",
    "order_correspondence_check",
    "project",
    "signed_compare",
]
