"""
Shared enums and report models for crinifer
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple


class Sign(Enum):
    """Copy selector of a signed address; MINUS precedes PLUS"""
    MINUS = "-"
    PLUS = "+"

    @property
    def rank(self) -> int:
        return 0 if self is Sign.MINUS else 1

    @property
    def slug(self) -> str:
        return "minus" if self is Sign.MINUS else "plus"

    @classmethod
    def parse(cls, text: str) -> "Sign":
        lookup = {"-": cls.MINUS, "+": cls.PLUS, "minus": cls.MINUS, "plus": cls.PLUS}
        try:
            return lookup[text.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown sign {text!r}") from None


class Ordering(Enum):
    """Outcome of an order comparison"""
    LT = "lt"
    EQ = "eq"
    GT = "gt"
    UNDETERMINED = "undetermined"


class PrecisionMode(Enum):
    """Working precision of numerical routines"""
    DOUBLE = "double"
    EXTENDED = "extended"


def complex_pair(z: Optional[complex]) -> Optional[List[float]]:
    """Encode a complex number as [re, im] for JSON"""
    if z is None:
        return None
    z = complex(z)
    return [z.real, z.imag]


@dataclass
class SeparationReport:
    """Result of the relative separation test on postsingular Julia points"""
    passed: bool
    epsilon: float
    depth: int
    sample_size: int
    witness: Optional[Tuple[complex, complex]] = None
    ratio: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization"""
        return {
            "passed": self.passed,
            "epsilon": self.epsilon,
            "depth": self.depth,
            "sample_size": self.sample_size,
            "witness": [complex_pair(z) for z in self.witness] if self.witness else None,
            "ratio": self.ratio,
        }


@dataclass
class DisjointTypeReport:
    """Result of the disjoint-type test"""
    passed: bool
    fixed_point: Optional[complex] = None
    multiplier: Optional[float] = None
    iterations: int = 0
    reason: str = ""

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization"""
        return {
            "passed": self.passed,
            "fixed_point": complex_pair(self.fixed_point),
            "multiplier": self.multiplier,
            "iterations": self.iterations,
            "reason": self.reason,
        }


@dataclass
class RayDynamicsReport:
    """Forward-image containment of a ray tail in its shifted ray"""
    passed: bool
    max_defect: float
    worst_point: Optional[complex] = None
    checked: int = 0
    escape_increasing: bool = True
    reason: str = ""

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization"""
        return {
            "passed": self.passed,
            "max_defect": self.max_defect,
            "worst_point": complex_pair(self.worst_point),
            "checked": self.checked,
            "escape_increasing": self.escape_increasing,
            "reason": self.reason,
        }


@dataclass
class EndpointEstimate:
    """Endpoint of a ray, or the last increment when not yet converged"""
    converged: bool
    value: Optional[complex]
    last_increment: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "converged": self.converged,
            "value": complex_pair(self.value),
            "last_increment": self.last_increment,
        }


@dataclass
class AgreementReport:
    """Branch-chain agreement of canonical rays sharing an address prefix"""
    passed: bool
    level: int
    compared_pairs: int = 0
    outside_interval: List[Tuple[str, str]] = field(default_factory=list)
    mismatches: List[Tuple[str, str, int]] = field(default_factory=list)
    split_levels: Dict[str, List[int]] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization"""
        return {
            "passed": self.passed,
            "level": self.level,
            "compared_pairs": self.compared_pairs,
            "outside_interval": [list(p) for p in self.outside_interval],
            "mismatches": [list(m) for m in self.mismatches],
            "split_levels": self.split_levels,
        }


@dataclass
class OrderCorrespondenceReport:
    """Agreement of hair crossing orders with the signed-address order"""
    passed: bool
    radius: float
    compared_triples: int = 0
    disagreements: List[Tuple[str, str, str]] = field(default_factory=list)
    skipped: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization"""
        return {
            "passed": self.passed,
            "radius": self.radius,
            "compared_triples": self.compared_triples,
            "disagreements": [list(t) for t in self.disagreements],
            "skipped": self.skipped,
        }


@dataclass
class FiberCountReport:
    """Number of signed addresses through a point against the fiber bound"""
    passed: bool
    point: complex
    count: int
    bound: Optional[int]
    max_degree: int
    critical_visits: Optional[int]
    formula_count: Optional[int] = None
    determined: bool = True

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization"""
        return {
            "passed": self.passed,
            "point": complex_pair(self.point),
            "count": self.count,
            "bound": self.bound,
            "max_degree": self.max_degree,
            "critical_visits": self.critical_visits,
            "formula_count": self.formula_count,
            "determined": self.determined,
        }


@dataclass
class LandingReport:
    """Landing evidence for one canonical ray"""
    passed: bool
    inconclusive: bool
    address: str
    endpoint: Optional[complex] = None
    last_increment: Optional[float] = None
    forward_defect: Optional[float] = None
    reason: str = ""

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization"""
        return {
            "passed": self.passed,
            "inconclusive": self.inconclusive,
            "address": self.address,
            "endpoint": complex_pair(self.endpoint),
            "last_increment": self.last_increment,
            "forward_defect": self.forward_defect,
            "reason": self.reason,
        }
