"""
Exception hierarchy for crinifer

Checks return reports; these exceptions signal that an operation could not
produce a value at all.
"""
from typing import Any, Optional


class CriniferError(Exception):
    """Base class for all crinifer errors"""


class EscapedMagnitudeError(CriniferError):
    """A value left the representable range while evaluating a map"""

    def __init__(self, threshold: float, value: Any = None):
        self.threshold = threshold
        self.value = value
        super().__init__(f"escaped-to-infinity magnitude: |value| exceeded {threshold:g}")


class UnsupportedFamilyError(CriniferError):
    """The map family has no implementation for the requested operation"""


class MapSpecError(CriniferError):
    """A map specification string could not be parsed"""


class DegeneratePointError(CriniferError):
    """All derivatives up to the cap vanish at a point"""

    def __init__(self, point: complex, cap: int):
        self.point = point
        self.cap = cap
        super().__init__(f"degenerate point {point}: derivatives 1..{cap} below tolerance")


class DomainSpecError(CriniferError):
    """D or delta violates a containment condition"""

    def __init__(self, condition: str):
        self.condition = condition
        super().__init__(condition)


class AlphabetWindowError(CriniferError):
    """A symbol lies outside the materialized symbol window"""

    def __init__(self, symbol: Any, window: int):
        self.symbol = symbol
        self.window = window
        super().__init__(f"symbol {symbol} outside window |k| <= {window}")


class AddressError(CriniferError):
    """An orbit or address operation failed at a given index"""

    def __init__(self, message: str, index: Optional[int] = None):
        self.index = index
        suffix = f" (index {index})" if index is not None else ""
        super().__init__(f"{message}{suffix}")


class AddressSyntaxError(CriniferError):
    """An address literal is malformed"""

    def __init__(self, literal: str, position: int, reason: str):
        self.literal = literal
        self.position = position
        super().__init__(f"invalid address {literal!r} at position {position}: {reason}")


class UndeterminedOrderError(CriniferError):
    """Two addresses cannot be ordered at the available depth"""


class BranchDomainError(CriniferError):
    """An inverse branch was asked for a point outside W"""

    def __init__(self, w: complex, reason: str = "point outside W"):
        self.w = w
        super().__init__(f"{reason}: w={w}")


class BranchCutError(CriniferError):
    """Consecutive samples landed on different sides of a branch cut"""

    def __init__(self, w: complex, level: Optional[int] = None):
        self.w = w
        self.level = level
        super().__init__(f"branch-cut straddle at w={w} (pullback level {level})")


class PrecisionError(CriniferError):
    """The requested depth needs the extended precision mode"""


class AmbiguousContinuationError(CriniferError):
    """A split continuation cannot be ordered; the caller must refine"""

    def __init__(self, point: complex, level: int):
        self.point = point
        self.level = level
        super().__init__(f"ambiguous continuation at critical point {point} (level {level})")


class NotInConfigurationError(CriniferError):
    """A point lies on none of the tracked rays"""


class UndeterminedCountError(CriniferError):
    """The orbit meets a critical point at the truncation boundary"""


class RangeExhaustedError(CriniferError):
    """A model point or its image lies outside the traced range"""

    def __init__(self, message: str, required_depth: Optional[int] = None):
        self.required_depth = required_depth
        super().__init__(message)


class InsufficientEvidenceError(CriniferError):
    """A sequence is too short for the divergence criterion"""


class ThetaPairingError(CriniferError):
    """A g-hair has no f-ray to pair with"""

    def __init__(self, address: str):
        self.address = address
        super().__init__(f"unpaired address {address}")


class InitialConfigurationError(CriniferError):
    """A ray tail fails forward invariance"""

    def __init__(self, address: str, defect: float):
        self.address = address
        self.defect = defect
        super().__init__(f"forward-invariance defect {defect:.3g} for address {address}")


class MetricDomainError(CriniferError):
    """A point lies inside the excluded core disc"""


class BranchChainError(CriniferError):
    """No canonical curve is available at some pullback level"""

    def __init__(self, level: int, address: str = ""):
        self.level = level
        super().__init__(f"branch chain unavailable at level {level} {address}".rstrip())


class MissingTraceError(CriniferError):
    """Trace files needed by a command are absent"""


class ChecksumMismatchError(CriniferError):
    """A trace file no longer matches its manifest checksum"""

    def __init__(self, path: str):
        self.path = path
        super().__init__(f"checksum mismatch for {path}")
