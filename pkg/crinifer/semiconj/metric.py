"""
Hyperbolic-density surrogate on the complement of a disc
"""
import cmath
import math
from dataclasses import dataclass

from scipy import integrate

from ..maps.entire_maps import EntireMap
from ..utils.errors import EscapedMagnitudeError, MetricDomainError
from ..utils.helpers import principal_angle


@dataclass(frozen=True)
class MetricSurrogate:
    """Density rho(z) = 1 / (|z| log(|z| / K)) on |z| > K"""
    core_radius: float

    def __post_init__(self):
        if self.core_radius <= 0:
            raise ValueError("core radius must be positive")

    def _require(self, z: complex):
        if abs(z) <= self.core_radius:
            raise MetricDomainError(f"|{z}| is not above the core radius {self.core_radius}")

    def density(self, z: complex) -> float:
        self._require(z)
        r = abs(z)
        return 1.0 / (r * math.log(r / self.core_radius))

    def _radial(self, r1: float, r2: float) -> float:
        """Length of a radial segment between moduli r1 and r2"""
        k = self.core_radius
        return abs(math.log(math.log(r2 / k)) - math.log(math.log(r1 / k)))

    def _arc(self, r: float, sweep: float) -> float:
        """Length of a circular arc of radius r through angle sweep"""
        return abs(sweep) / math.log(r / self.core_radius)

    def _straight(self, a: complex, b: complex) -> float:
        """Length of the segment [a, b], infinite when it meets the core disc"""
        direction = b - a
        span = abs(direction)
        if span == 0:
            return 0.0
        u = max(0.0, min(1.0, -((a * direction.conjugate()).real) / span ** 2))
        if abs(a + u * direction) <= self.core_radius:
            return math.inf
        value, _ = integrate.quad(
            lambda s: self.density(a + s * direction) * span, 0.0, 1.0, limit=200
        )
        return value

    def distance(self, a: complex, b: complex) -> float:
        """Upper bound on the surrogate distance: shortest of three candidate paths"""
        a, b = complex(a), complex(b)
        self._require(a)
        self._require(b)
        if a == b:
            return 0.0
        sweep = principal_angle(cmath.phase(b) - cmath.phase(a))
        ra, rb = abs(a), abs(b)
        arc_first = self._arc(ra, sweep) + self._radial(ra, rb)
        radial_first = self._radial(ra, rb) + self._arc(rb, sweep)
        return min(self._straight(a, b), arc_first, radial_first)

    def length(self, points) -> float:
        """Surrogate length of a polyline"""
        points = [complex(p) for p in points]
        return sum(self.distance(p, q) for p, q in zip(points[:-1], points[1:]))


def expansion_estimate(map_f: EntireMap, metric: MetricSurrogate, z: complex) -> float:
    """|f'(z)| rho(f(z)) / rho(z)"""
    z = complex(z)
    try:
        image = map_f.eval(z)
        slope = abs(map_f.derivative(z))
    except EscapedMagnitudeError as exc:
        raise MetricDomainError(f"f({z}) escapes: {exc}") from exc
    if abs(z) <= metric.core_radius or abs(image) <= metric.core_radius:
        raise MetricDomainError(
            f"expansion at {z} needs |z| and |f(z)| above {metric.core_radius}"
        )
    return slope * metric.density(image) / metric.density(z)
