"""Theta correspondence, surrogate metric and the pullback semiconjugacy"""
from .metric import MetricSurrogate, expansion_estimate
from .phi import (
    PhiApprox,
    SemiconjugacyContext,
    build_semiconjugacy,
    cauchy_report,
    divergence_equivalence,
    fiber_count_check,
    fit_ratio,
    landing_check,
    model_for,
    phi_stage,
    semiconjugacy_residual,
    stage_identity_defect,
)
from .theta import ThetaMap, build_theta

__all__ = [
    "MetricSurrogate",
    "PhiApprox",
    "SemiconjugacyContext",
    "ThetaMap",
    "build_semiconjugacy",
    "build_theta",
    "cauchy_report",
    "divergence_equivalence",
    "expansion_estimate",
    "fiber_count_check",
    "fit_ratio",
    "landing_check",
    "model_for",
    "phi_stage",
    "semiconjugacy_residual",
    "stage_identity_defect",
]
