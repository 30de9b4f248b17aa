"""
Entire map families: evaluation, derivatives, singular data and the
disjoint-type and separation tests
"""
import cmath
import logging
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy import optimize

from ..config import Config
from ..utils.errors import (
    DegeneratePointError,
    EscapedMagnitudeError,
    MapSpecError,
    UnsupportedFamilyError,
)
from ..utils.models import DisjointTypeReport, PrecisionMode, SeparationReport

logger = logging.getLogger(__name__)

DERIVATIVE_CAP = 8
DEGREE_TOL = 1e-9
DOUBLE_DIGITS = 15
# |Re z| (cosh, exp) or |Im z| (sin) above which log|f| is taken from its asymptotic form
ASYMPTOTIC_CUTOFF = 40.0


class Family(Enum):
    """Supported map families"""
    COSH = "cosh"
    SCALED_COSH = "scaled-cosh"
    SCALED_EXP = "scaled-exp"
    SCALED_SIN = "scaled-sin"

    @property
    def kind(self) -> str:
        """Shape of the family: 'cosh', 'exp' or 'sin'"""
        if self in (Family.COSH, Family.SCALED_COSH):
            return "cosh"
        if self is Family.SCALED_EXP:
            return "exp"
        return "sin"


@dataclass
class OrbitRecord:
    """Finite forward orbit with escape evidence"""
    seed: complex
    points: List[complex]
    escaped: bool
    escape_index: Optional[int] = None


@dataclass
class SingularData:
    """Singular values and a truncated postsingular sample"""
    critical_values: List[complex]
    asymptotic_values: List[complex]
    postsingular_sample: List[complex]
    depth: int
    orbits: List[OrbitRecord] = field(default_factory=list)

    @property
    def singular_values(self) -> List[complex]:
        return list(self.critical_values) + list(self.asymptotic_values)


@dataclass(frozen=True)
class EntireMap:
    """A member of one of the supported entire map families"""
    family: Family
    scale: complex = 1.0
    precision: int = DOUBLE_DIGITS

    def __post_init__(self):
        object.__setattr__(self, "scale", complex(self.scale))
        if self.family is Family.COSH and self.scale != 1:
            raise MapSpecError("cosh takes no scale; use scaled-cosh")
        if self.scale == 0:
            raise MapSpecError("scale must be nonzero")
        if self.precision < DOUBLE_DIGITS:
            raise MapSpecError(f"precision must be at least {DOUBLE_DIGITS} digits")

    # -- basic properties -------------------------------------------------

    @property
    def kind(self) -> str:
        return self.family.kind

    @property
    def precision_mode(self) -> PrecisionMode:
        if self.precision > DOUBLE_DIGITS:
            return PrecisionMode.EXTENDED
        return PrecisionMode.DOUBLE

    @property
    def growth_factor(self) -> float:
        """|f(z)| ~ growth_factor * exp(|log coordinate|) far out in a tract"""
        if self.kind == "exp":
            return abs(self.scale)
        return abs(self.scale) / 2.0

    @property
    def spec(self) -> str:
        return format_map_spec(self)

    # -- evaluation -------------------------------------------------------

    def eval(self, z: complex) -> complex:
        """f(z) in double precision"""
        z = complex(z)
        threshold = Config.ESCAPE_THRESHOLD
        try:
            if self.kind == "cosh":
                w = self.scale * cmath.cosh(z)
            elif self.kind == "exp":
                w = self.scale * cmath.exp(z)
            else:
                w = self.scale * cmath.sin(z)
        except OverflowError:
            raise EscapedMagnitudeError(threshold, z) from None
        if not cmath.isfinite(w) or abs(w) > threshold:
            raise EscapedMagnitudeError(threshold, w)
        return w

    def eval_array(self, zs: np.ndarray) -> np.ndarray:
        """Vectorized f; overflowing entries become inf"""
        zs = np.asarray(zs, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore"):
            if self.kind == "cosh":
                return self.scale * np.cosh(zs)
            if self.kind == "exp":
                return self.scale * np.exp(zs)
            return self.scale * np.sin(zs)

    def eval_mp(self, z: Any) -> Any:
        """f(z) in mpmath at the working precision"""
        with mpmath.workdps(self.precision):
            z = mpmath.mpmathify(z)
            scale = mpmath.mpc(self.scale.real, self.scale.imag)
            if self.kind == "cosh":
                return scale * mpmath.cosh(z)
            if self.kind == "exp":
                return scale * mpmath.exp(z)
            return scale * mpmath.sin(z)

    def derivative(self, z: complex, order: int = 1) -> complex:
        """The order-th derivative of f at z"""
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        if order == 0:
            return self.eval(z)
        z = complex(z)
        try:
            if self.kind == "cosh":
                base = cmath.sinh(z) if order % 2 else cmath.cosh(z)
            elif self.kind == "exp":
                base = cmath.exp(z)
            else:
                base = (cmath.sin(z), cmath.cos(z), -cmath.sin(z), -cmath.cos(z))[order % 4]
        except OverflowError:
            raise EscapedMagnitudeError(Config.ESCAPE_THRESHOLD, z) from None
        return self.scale * base

    def derivative_array(self, zs: np.ndarray) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore"):
            if self.kind == "cosh":
                return self.scale * np.sinh(zs)
            if self.kind == "exp":
                return self.scale * np.exp(zs)
            return self.scale * np.cos(zs)

    def log_modulus(self, z: Any) -> float:
        """log|f(z)|, using the asymptotic form where f overflows"""
        if isinstance(z, (mpmath.mpc, mpmath.mpf)):
            x, y = float(mpmath.re(z)), float(mpmath.im(z))
        else:
            z = complex(z)
            x, y = z.real, z.imag
        log_growth = math.log(self.growth_factor)
        if self.kind == "cosh" and abs(x) > ASYMPTOTIC_CUTOFF:
            return log_growth + abs(x)
        if self.kind == "exp" and x > ASYMPTOTIC_CUTOFF:
            return log_growth + x
        if self.kind == "sin" and abs(y) > ASYMPTOTIC_CUTOFF:
            return log_growth + abs(y)
        with mpmath.workdps(self.precision):
            value = abs(self.eval_mp(z))
            if value == 0:
                return float("-inf")
            return float(mpmath.log(value))

    def image_argument(self, z: Any) -> float:
        """arg f(z), from the asymptotic form where f overflows"""
        if isinstance(z, (mpmath.mpc, mpmath.mpf)):
            with mpmath.workdps(self.precision):
                x, y = mpmath.re(z), mpmath.im(z)
                two_pi = 2 * mpmath.pi
                y_mod = float(mpmath.fmod(y, two_pi))
                x_mod = float(mpmath.fmod(x, two_pi))
            x_float, y_float = float(x), float(y)
        else:
            z = complex(z)
            x_float, y_float = z.real, z.imag
            x_mod, y_mod = x_float, y_float
        base = cmath.phase(self.scale)
        if self.kind == "cosh" and abs(x_float) > ASYMPTOTIC_CUTOFF:
            return base + (y_mod if x_float > 0 else -y_mod)
        if self.kind == "exp" and x_float > ASYMPTOTIC_CUTOFF:
            return base + y_mod
        if self.kind == "sin" and abs(y_float) > ASYMPTOTIC_CUTOFF:
            if y_float > 0:
                return base + math.pi / 2 - x_mod
            return base - math.pi / 2 + x_mod
        with mpmath.workdps(self.precision):
            return float(mpmath.arg(self.eval_mp(z)))

    # -- critical and singular data ----------------------------------------

    def critical_values(self) -> List[complex]:
        if self.kind == "exp":
            return []
        return [self.scale, -self.scale]

    def asymptotic_values(self) -> List[complex]:
        if self.kind == "exp":
            return [0j]
        return []

    def singular_values(self) -> List[complex]:
        return self.critical_values() + self.asymptotic_values()

    def nearest_critical_point(self, z: complex) -> Optional[complex]:
        """The critical point closest to z, or None for families without any"""
        z = complex(z)
        if self.kind == "cosh":
            return complex(0.0, math.pi * round(z.imag / math.pi))
        if self.kind == "sin":
            k = round((z.real - math.pi / 2) / math.pi)
            return complex(math.pi / 2 + math.pi * k, 0.0)
        return None

    def orbit(self, z: complex, max_iter: int, threshold: Optional[float] = None) -> OrbitRecord:
        """Forward orbit of z, stopped at the first escape past threshold"""
        threshold = Config.ESCAPE_THRESHOLD if threshold is None else threshold
        z = complex(z)
        points = [z]
        if abs(z) > threshold:
            return OrbitRecord(seed=z, points=points, escaped=True, escape_index=0)
        current = z
        for n in range(1, max_iter + 1):
            try:
                current = self.eval(current)
            except EscapedMagnitudeError:
                return OrbitRecord(seed=z, points=points, escaped=True, escape_index=n)
            points.append(current)
            if abs(current) > threshold:
                return OrbitRecord(seed=z, points=points, escaped=True, escape_index=n)
        return OrbitRecord(seed=z, points=points, escaped=False)

    def attracting_fixed_point(
        self, seed: complex, max_iter: int = 100, tol: float = 1e-9
    ) -> Optional[Tuple[complex, float, int]]:
        """Fixed point reached by iterating from seed, refined by Newton

        Returns (point, |multiplier|, iterations) or None when the orbit does
        not settle within max_iter steps.
        """
        current = complex(seed)
        for n in range(1, max_iter + 1):
            try:
                following = self.eval(current)
            except EscapedMagnitudeError:
                return None
            if abs(following - current) < tol:
                try:
                    point = complex(optimize.newton(
                        lambda z: self.eval(z) - z,
                        following,
                        fprime=lambda z: self.derivative(z) - 1,
                        tol=1e-15,
                        maxiter=50,
                    ))
                except (RuntimeError, EscapedMagnitudeError):
                    point = following
                return point, abs(self.derivative(point)), n
            current = following
        return None


def critical_points_in_disc(map_f: EntireMap, radius: float) -> List[complex]:
    """All critical points of f with modulus at most radius"""
    if radius <= 0:
        raise ValueError("radius must be positive")
    points = []
    if map_f.kind == "cosh":
        k_max = int(math.floor(radius / math.pi))
        points = [complex(0.0, k * math.pi) for k in range(-k_max, k_max + 1)]
    elif map_f.kind == "sin":
        k_max = int(math.floor(radius / math.pi)) + 1
        points = [
            complex(math.pi / 2 + k * math.pi, 0.0)
            for k in range(-k_max - 1, k_max + 1)
            if abs(math.pi / 2 + k * math.pi) <= radius
        ]
    elif map_f.kind == "exp":
        return []
    else:
        raise UnsupportedFamilyError(f"no critical point enumeration for {map_f.family}")
    return sorted(points, key=lambda c: (abs(c), c.imag, c.real))


def local_degree(map_f: EntireMap, z: complex) -> int:
    """Order of the first nonvanishing derivative of f at z"""
    tol = DEGREE_TOL * max(1.0, abs(map_f.scale))
    for n in range(1, DERIVATIVE_CAP + 1):
        if abs(map_f.derivative(z, n)) > tol:
            return n
    raise DegeneratePointError(complex(z), DERIVATIVE_CAP)


def singular_data(map_f: EntireMap, depth: int) -> SingularData:
    """Singular values and their forward orbits up to depth points each"""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    orbits = [map_f.orbit(v, depth - 1) for v in map_f.singular_values()]
    sample: List[complex] = []
    for record in orbits:
        for point in record.points[:depth]:
            if not any(abs(point - seen) <= 1e-12 * max(1.0, abs(seen)) for seen in sample):
                sample.append(point)
    return SingularData(
        critical_values=map_f.critical_values(),
        asymptotic_values=map_f.asymptotic_values(),
        postsingular_sample=sample,
        depth=depth,
        orbits=orbits,
    )


def separation_check(
    map_f: EntireMap, epsilon: float, depth: int, escape_radius: float = 1e6
) -> SeparationReport:
    """Relative separation |z - w| >= epsilon * max(|z|, |w|) on postsingular Julia points

    A postsingular point counts as a Julia point when the orbit of its
    singular value escapes past escape_radius.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    data = singular_data(map_f, depth)
    julia = []
    for record in data.orbits:
        witness = map_f.orbit(record.seed, 64, threshold=escape_radius)
        if not witness.escaped:
            continue
        for point in record.points[:depth]:
            if not any(abs(point - seen) <= 1e-12 * max(1.0, abs(seen)) for seen in julia):
                julia.append(point)

    best_ratio = None
    best_pair = None
    for i, z in enumerate(julia):
        for w in julia[i + 1:]:
            scale = max(abs(z), abs(w))
            ratio = abs(z - w) / scale
            if best_ratio is None or ratio < best_ratio:
                best_ratio, best_pair = ratio, (z, w)

    passed = best_ratio is None or best_ratio >= epsilon
    logger.debug(f"separation: {len(julia)} points, min ratio {best_ratio}")
    return SeparationReport(
        passed=passed,
        epsilon=epsilon,
        depth=depth,
        sample_size=len(julia),
        witness=best_pair,
        ratio=best_ratio,
    )


def default_disc_radius(map_f: EntireMap) -> float:
    """Radius of D used when none is configured"""
    return max(1.0, 3.0 * abs(map_f.scale))


def disjoint_type_check(
    map_f: EntireMap, max_iter: int = 100, tol: float = 1e-9, disc_radius: Optional[float] = None
) -> DisjointTypeReport:
    """All singular orbits converge to one attracting fixed point inside D"""
    disc_radius = default_disc_radius(map_f) if disc_radius is None else disc_radius
    found = []
    iterations = 0
    for value in map_f.singular_values():
        result = map_f.attracting_fixed_point(value, max_iter=max_iter, tol=tol)
        if result is None:
            return DisjointTypeReport(
                passed=False, iterations=max_iter,
                reason=f"orbit of {value} did not converge within {max_iter} iterations",
            )
        found.append(result)
        iterations = max(iterations, result[2])

    point, multiplier, _ = found[0]
    for other, _, _ in found[1:]:
        if abs(other - point) > 1e-6:
            return DisjointTypeReport(
                passed=False, fixed_point=point, multiplier=multiplier, iterations=iterations,
                reason=f"singular orbits converge to distinct points {point} and {other}",
            )
    if multiplier >= 1.0:
        return DisjointTypeReport(
            passed=False, fixed_point=point, multiplier=multiplier, iterations=iterations,
            reason="fixed point is not attracting",
        )
    if abs(point) >= disc_radius:
        return DisjointTypeReport(
            passed=False, fixed_point=point, multiplier=multiplier, iterations=iterations,
            reason=f"fixed point outside D (radius {disc_radius})",
        )
    return DisjointTypeReport(
        passed=True, fixed_point=point, multiplier=multiplier, iterations=iterations,
    )


# -- map specification strings ---------------------------------------------

_NUMBER = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(rf"^(?P<re>{_NUMBER})re(?P<im>{_NUMBER})im$")


def _parse_scale(text: str) -> complex:
    text = text.strip()
    match = _COMPLEX_RE.match(text)
    if match:
        return complex(float(match.group("re")), float(match.group("im")))
    try:
        return complex(float(text), 0.0)
    except ValueError:
        raise MapSpecError(f"cannot parse scale {text!r}") from None


def _format_scale(scale: complex) -> str:
    if scale.imag == 0:
        return repr(scale.real)
    sign = "+" if math.copysign(1.0, scale.imag) > 0 else ""
    return f"{scale.real!r}re{sign}{scale.imag!r}im"


def parse_map_spec(text: str) -> EntireMap:
    """Parse 'family:key=value,...' into an EntireMap"""
    if not text or not text.strip():
        raise MapSpecError("empty map specification")
    name, _, params = text.strip().partition(":")
    try:
        family = Family(name.strip())
    except ValueError:
        known = ", ".join(f.value for f in Family)
        raise MapSpecError(f"unknown family {name!r} (known: {known})") from None

    values = {}
    for item in filter(None, (p.strip() for p in params.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise MapSpecError(f"expected key=value, got {item!r}")
        values[key.strip()] = value.strip()

    unknown = set(values) - {"lambda", "precision"}
    if unknown:
        raise MapSpecError(f"unknown parameters {sorted(unknown)}")
    if family is Family.COSH and "lambda" in values:
        raise MapSpecError("cosh takes no lambda; use scaled-cosh")
    if family is not Family.COSH and "lambda" not in values:
        raise MapSpecError(f"{family.value} requires lambda")

    scale = _parse_scale(values["lambda"]) if "lambda" in values else 1.0
    try:
        precision = int(values.get("precision", DOUBLE_DIGITS))
    except ValueError:
        raise MapSpecError(f"bad precision {values['precision']!r}") from None
    return EntireMap(family=family, scale=scale, precision=precision)


def format_map_spec(map_f: EntireMap) -> str:
    """Inverse of parse_map_spec"""
    params = []
    if map_f.family is not Family.COSH:
        params.append(f"lambda={_format_scale(map_f.scale)}")
    if map_f.precision != DOUBLE_DIGITS:
        params.append(f"precision={map_f.precision}")
    if not params:
        return map_f.family.value
    return f"{map_f.family.value}:{','.join(params)}"


def make_map(family: str, scale: complex = 1.0, precision: int = DOUBLE_DIGITS) -> EntireMap:
    """Convenience constructor from a family name"""
    return EntireMap(family=Family(family), scale=scale, precision=precision)
