"""
Tracts, fundamental domains and itineraries
"""
import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import mpmath
import numpy as np

from ..config import Config
from ..maps.branches import SIDES, BranchGeometry
from ..maps.entire_maps import EntireMap, default_disc_radius
from ..utils.errors import (
    AddressError,
    AlphabetWindowError,
    DomainSpecError,
    EscapedMagnitudeError,
)
from ..utils.helpers import principal_angle
from ..utils.models import PrecisionMode
from .addresses import DEFAULT_DELTA, ExternalAddress, Symbol, SymbolOrder

logger = logging.getLogger(__name__)

# Directions of delta (relative to arg lambda) with an exact closed-form cut
_AXIS_TOL = 1e-12
_DELTA_SAMPLES = 400


@dataclass(frozen=True)
class DomainSpec:
    """Disc D around the origin and the direction of the cut ray delta"""
    disc_radius: float
    delta_direction: float

    def on_delta(self, w: complex, tol: float = 1e-12) -> bool:
        """True when w lies on the ray delta outside D"""
        if abs(w) < self.disc_radius:
            return False
        return abs(principal_angle(cmath.phase(w) - self.delta_direction)) <= tol

    def in_w(self, w: complex) -> bool:
        """Membership in W = C minus the closure of D and delta"""
        return abs(w) > self.disc_radius and not self.on_delta(w)


def default_domain_spec(map_f: EntireMap) -> DomainSpec:
    """D and delta used when none is configured"""
    return DomainSpec(default_disc_radius(map_f), DEFAULT_DELTA[map_f.kind])


def validate_domain_spec(map_f: EntireMap, spec: DomainSpec):
    """Raise DomainSpecError naming the first violated condition"""
    if spec.disc_radius <= 0:
        raise DomainSpecError("disc radius must be positive")
    for value in map_f.singular_values():
        if abs(value) >= spec.disc_radius:
            raise DomainSpecError(f"D must contain the singular value {value}")
    if abs(map_f.eval(0)) >= spec.disc_radius:
        raise DomainSpecError("D must contain f(0)")

    geometry = BranchGeometry(map_f, spec.delta_direction)
    if map_f.kind != "exp":
        quarter = geometry.cut_angle / (math.pi / 2)
        if abs(quarter - round(quarter)) > _AXIS_TOL:
            raise DomainSpecError(
                "delta must be parallel to an axis after rotating by arg lambda"
            )

    radii = spec.disc_radius * np.geomspace(1.0, 1e3, _DELTA_SAMPLES)
    points = radii * cmath.exp(1j * spec.delta_direction)
    images = np.abs(map_f.eval_array(points))
    if np.any(~np.isfinite(images)) or np.any(images >= spec.disc_radius):
        raise DomainSpecError("delta meets tract closure")


@dataclass(frozen=True)
class FundamentalDomain:
    """A preimage component of W, with a point known to lie in it"""
    symbol: Symbol
    representative: complex


@dataclass
class Alphabet:
    """Materialized window of fundamental domains for a map"""
    map_f: EntireMap
    spec: DomainSpec
    window: int
    domains: Dict[Symbol, FundamentalDomain] = field(default_factory=dict)

    @property
    def geometry(self) -> BranchGeometry:
        return BranchGeometry(self.map_f, self.spec.delta_direction)

    @property
    def order(self) -> SymbolOrder:
        return SymbolOrder(self.spec.delta_direction)

    def domain(self, symbol: Symbol) -> FundamentalDomain:
        try:
            return self.domains[symbol]
        except KeyError:
            raise AlphabetWindowError(symbol, self.window) from None

    def __len__(self) -> int:
        return len(self.domains)

    def __iter__(self):
        return iter(self.domains.values())


def build_alphabet(
    map_f: EntireMap, spec: Optional[DomainSpec] = None, window: Optional[int] = None
) -> Alphabet:
    """Fundamental domains with branch index |k| <= window, each with a verified representative"""
    spec = spec or default_domain_spec(map_f)
    window = Config.SYMBOL_WINDOW if window is None else window
    validate_domain_spec(map_f, spec)
    geometry = BranchGeometry(map_f, spec.delta_direction)

    # Opposite to delta, well outside D
    anchor = 2.0 * spec.disc_radius * cmath.exp(1j * (spec.delta_direction + math.pi))
    alphabet = Alphabet(map_f=map_f, spec=spec, window=window)
    for side in SIDES[map_f.kind]:
        for k in range(-window, window + 1):
            representative = complex(geometry.inverse(side, k, anchor))
            image = map_f.eval(representative)
            if not spec.in_w(image):
                raise DomainSpecError(f"representative of {side}{k} does not map into W")
            symbol = Symbol(side, k)
            alphabet.domains[symbol] = FundamentalDomain(symbol, representative)
    logger.debug(f"alphabet for {map_f.spec}: {len(alphabet)} domains")
    return alphabet


def _maps_into_w(map_f: EntireMap, spec: DomainSpec, z: Any) -> bool:
    if not isinstance(z, (mpmath.mpc, mpmath.mpf)):
        try:
            return spec.in_w(map_f.eval(z))
        except EscapedMagnitudeError:
            pass
    if map_f.log_modulus(z) <= math.log(spec.disc_radius):
        return False
    angle = map_f.image_argument(z)
    return abs(principal_angle(angle - spec.delta_direction)) > 1e-12


def classify_point(map_f: EntireMap, alphabet: Alphabet, z: Any) -> Optional[FundamentalDomain]:
    """The fundamental domain containing z, or None when f(z) is not in W"""
    if map_f != alphabet.map_f:
        raise ValueError("alphabet was built for a different map")
    if not _maps_into_w(map_f, alphabet.spec, z):
        return None
    if isinstance(z, (mpmath.mpc, mpmath.mpf)):
        with mpmath.workdps(max(map_f.precision, 30)):
            index = alphabet.geometry.branch_index_mp(z)
    else:
        index = alphabet.geometry.branch_index(complex(z))
    if index is None:
        return None
    side, k = index
    return alphabet.domain(Symbol(side, k))


def _orbit_points(map_f: EntireMap, z: complex, count: int) -> List[Any]:
    """First `count` orbit points, switching to mpmath once doubles overflow"""
    points: List[Any] = [z]
    extended = map_f.precision_mode is PrecisionMode.EXTENDED
    if extended:
        points = [mpmath.mpmathify(z)]
    while len(points) < count:
        current = points[-1]
        if not extended:
            try:
                points.append(map_f.eval(current))
                continue
            except EscapedMagnitudeError:
                extended = True
        points.append(map_f.eval_mp(current))
    return points


def address_of_orbit(
    map_f: EntireMap, alphabet: Alphabet, z: complex, depth: int
) -> ExternalAddress:
    """Itinerary F_0 ... F_{depth-1} of z through the unbounded parts of the domains"""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    radius = alphabet.spec.disc_radius
    symbols = []
    for n, point in enumerate(_orbit_points(map_f, z, depth)):
        if abs(point) <= radius:
            raise AddressError("iterate lies in the bounded part", n)
        domain = classify_point(map_f, alphabet, point)
        if domain is None:
            raise AddressError("iterate lies in no fundamental domain", n)
        symbols.append(domain.symbol)
    return ExternalAddress(tuple(symbols))
