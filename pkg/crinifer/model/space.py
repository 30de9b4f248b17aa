"""
Two-copy model space of a disjoint-type map

Points are (address, t, sign) coordinates on traced hairs. The model map
acts on the parameter and keeps the sign; the projection forgets the sign.
"""
import cmath
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import Config
from ..maps.branches import straight_line_growth
from ..maps.entire_maps import EntireMap
from ..rays.canonical import CanonicalRay
from ..rays.geometry import circle_crossing
from ..rays.tracer import (
    HairTracer,
    PullbackConfig,
    RayTail,
    endpoint_estimate,
    trace_many,
    verify_ray_dynamics,
)
from ..symbolic.addresses import (
    ExternalAddress,
    SignedAddress,
    SymbolOrder,
    lex_compare,
    shift_closure,
)
from ..symbolic.tracts import Alphabet, build_alphabet
from ..utils.errors import (
    InsufficientEvidenceError,
    MissingTraceError,
    RangeExhaustedError,
    UndeterminedOrderError,
)
from ..utils.helpers import ccw_offset, is_cyclically_ordered
from ..utils.models import OrderCorrespondenceReport, Ordering, RayDynamicsReport, Sign

logger = logging.getLogger(__name__)

MIN_DIVERGENCE_SAMPLES = 20
ENDPOINT_TOL = 1e-9


@dataclass(frozen=True)
class ModelPoint:
    """A point (address, t) of a traced hair together with a sign"""
    address: ExternalAddress
    t: float
    sign: Sign

    @property
    def signed_address(self) -> SignedAddress:
        return SignedAddress(self.address, self.sign)

    def to_dict(self) -> Dict[str, Any]:
        return {"address": str(self.address), "sign": self.sign.value, "t": self.t}


@dataclass
class ModelStore:
    """Traced hairs of the model map, indexed by address"""
    map_g: EntireMap
    cfg: PullbackConfig
    hairs: Dict[ExternalAddress, RayTail] = field(default_factory=dict)
    endpoint_flags: Dict[ExternalAddress, bool] = field(default_factory=dict)
    alphabet: Optional[Alphabet] = None

    def __post_init__(self):
        if self.alphabet is None:
            self.alphabet = build_alphabet(self.map_g)
        self._tracer = HairTracer(self.map_g, self.alphabet, self.cfg)

    @property
    def tracer(self) -> HairTracer:
        return self._tracer

    @property
    def addresses(self) -> List[ExternalAddress]:
        return list(self.hairs)

    def hair(self, address: ExternalAddress) -> RayTail:
        try:
            return self.hairs[address]
        except KeyError:
            raise MissingTraceError(f"no traced hair for address {address}") from None

    def lower_limit(self) -> float:
        return self._tracer.lower_limit()

    def point(self, address: ExternalAddress, t: float, sign: Sign = Sign.PLUS) -> ModelPoint:
        x = ModelPoint(address, float(t), sign)
        self.check(x)
        return x

    def check(self, x: ModelPoint):
        """Raise unless x refers to a traced hair inside its parameter range"""
        self.hair(x.address)
        lower = self.lower_limit()
        if x.t < lower * (1.0 - 1e-12):
            raise RangeExhaustedError(
                f"t={x.t} lies below the traced range starting at {lower}",
                required_depth=self.required_depth(x.t),
            )

    def required_depth(self, t: float, limit: int = 200) -> Optional[int]:
        """Smallest pullback depth whose traced range reaches down to t"""
        floors = self._tracer.parameter_floors(limit)
        for depth, floor in enumerate(floors):
            if floor <= t:
                return depth
        return None

    def endpoint(self, address: ExternalAddress, sign: Sign = Sign.PLUS) -> ModelPoint:
        """The smallest traced parameter of a hair"""
        return ModelPoint(address, float(self.hair(address).t[-1]), sign)

    def sample_points(self, per_hair: int = 5, signs: Sequence[Sign] = (Sign.MINUS, Sign.PLUS)) -> List[ModelPoint]:
        """Deterministic model points spread over each hair's parameter range"""
        points = []
        for address, hair in self.hairs.items():
            indices = np.linspace(0, len(hair) - 1, per_hair).round().astype(int)
            for index in np.unique(indices):
                for sign in signs:
                    points.append(ModelPoint(address, float(hair.t[index]), sign))
        return points

    def validate(self, tol: float = 1e-6) -> Dict[ExternalAddress, RayDynamicsReport]:
        """verify_ray_dynamics for every hair against its shift"""
        reports = {}
        for address, hair in self.hairs.items():
            shifted = self.hairs.get(address.shift())
            if shifted is None:
                continue
            reports[address] = verify_ray_dynamics(self.map_g, hair, shifted, tol)
        return reports


def build_model_store(
    map_g: EntireMap,
    addresses: Iterable[ExternalAddress],
    cfg: Optional[PullbackConfig] = None,
    alphabet: Optional[Alphabet] = None,
) -> ModelStore:
    """Trace the hairs of the shift-closure of addresses"""
    cfg = cfg or PullbackConfig()
    alphabet = alphabet or build_alphabet(map_g)
    hairs = trace_many(map_g, shift_closure(addresses), cfg, alphabet)
    flags = {address: endpoint_estimate(hair, ENDPOINT_TOL).converged for address, hair in hairs.items()}
    store = ModelStore(map_g, cfg, hairs, flags, alphabet)
    logger.info(f"model store for {map_g.spec}: {len(hairs)} hairs at depth {cfg.depth}")
    return store


def model_map(store: ModelStore, x: ModelPoint) -> ModelPoint:
    """(z, sign) -> (g(z), sign) in hair coordinates"""
    store.check(x)
    with np.errstate(over="ignore"):
        image_t = float(straight_line_growth(store.map_g, x.t))
    if not math.isfinite(image_t) or image_t > Config.ESCAPE_THRESHOLD:
        raise RangeExhaustedError(f"image of t={x.t} passes the escape threshold")
    return ModelPoint(x.address.shift(), image_t, x.sign)


def project(store: ModelStore, x: ModelPoint) -> complex:
    """The point of the g-hair that x refers to; the sign is forgotten"""
    store.check(x)
    return complex(store.tracer.points(x.address, [x.t])[0])


def _as_signed(item: Union[SignedAddress, Tuple[ExternalAddress, Sign], ModelPoint]) -> SignedAddress:
    if isinstance(item, SignedAddress):
        return item
    if isinstance(item, ModelPoint):
        return item.signed_address
    address, sign = item
    return SignedAddress(address, sign)


def signed_compare(a, b, order: Optional[SymbolOrder] = None) -> Ordering:
    """Lexicographic order of addresses, ties broken by - before +"""
    a, b = _as_signed(a), _as_signed(b)
    result = lex_compare(a.address, b.address, order)
    if result is Ordering.UNDETERMINED:
        raise UndeterminedOrderError(f"{a} and {b} undetermined at available depth")
    if result is not Ordering.EQ:
        return result
    if a.sign is b.sign:
        return Ordering.EQ
    return Ordering.LT if a.sign.rank < b.sign.rank else Ordering.GT


def cyclic_interval_member(a, x, b, order: Optional[SymbolOrder] = None) -> bool:
    """True iff x lies strictly inside the cyclic interval from a to b

    Degenerate triples, where x coincides with an endpoint or a == b, are
    never members.
    """
    a, x, b = _as_signed(a), _as_signed(x), _as_signed(b)
    if len({a, x, b}) < 3:
        return False

    def less(p, q) -> bool:
        return signed_compare(p, q, order) is Ordering.LT

    return (less(a, x) and less(x, b)) or (less(x, b) and less(b, a)) or (less(b, a) and less(a, x))


def _crossing_keys(curves: Dict[SignedAddress, np.ndarray], radius: float, delta: float):
    keys, skipped = {}, []
    for signed, curve in curves.items():
        point = circle_crossing(curve, radius)
        if cmath.isnan(point):
            skipped.append(str(signed))
            continue
        keys[signed] = (round(ccw_offset(cmath.phase(point), delta), 9), signed.sign.rank)
    return keys, skipped


def order_correspondence_check(
    store_g: ModelStore,
    rays_f: Union[Dict[SignedAddress, CanonicalRay], Sequence[CanonicalRay]] = (),
    radius: float = 50.0,
    delta_direction: Optional[float] = None,
) -> OrderCorrespondenceReport:
    """Compare the cyclic orders of hairs at |z| = radius with the signed-address order

    The two copies of a hair cross the circle at the same point and are
    ordered by sign there. Rays that never reach the circle are skipped.
    """
    order = store_g.alphabet.order
    delta = order.delta_direction if delta_direction is None else delta_direction
    ray_list = list(rays_f.values()) if isinstance(rays_f, dict) else list(rays_f)

    g_curves = {
        SignedAddress(address, sign): hair.z
        for address, hair in store_g.hairs.items()
        for sign in (Sign.MINUS, Sign.PLUS)
    }
    g_keys, skipped = _crossing_keys(g_curves, radius, delta)
    f_keys, f_skipped = _crossing_keys({ray.signed_address: ray.z for ray in ray_list}, radius, delta)
    skipped += f_skipped

    members = [s for s in g_keys if not ray_list or s in f_keys]
    report = OrderCorrespondenceReport(passed=True, radius=radius, skipped=sorted(set(skipped)))
    for a, b, c in itertools.combinations(members, 3):
        expected = cyclic_interval_member(a, b, c, order)
        observed = [is_cyclically_ordered(g_keys[a], g_keys[b], g_keys[c])]
        if ray_list:
            observed.append(is_cyclically_ordered(f_keys[a], f_keys[b], f_keys[c]))
        report.compared_triples += 1
        if any(value != expected for value in observed):
            report.disagreements.append((str(a), str(b), str(c)))
    report.passed = not report.disagreements and report.compared_triples > 0
    return report


def moduli_diverge(moduli: Sequence[float], threshold: float) -> bool:
    """Tail beyond threshold and no later return below the early minimum"""
    moduli = np.asarray(moduli, dtype=float)
    if moduli.size < MIN_DIVERGENCE_SAMPLES:
        raise InsufficientEvidenceError(
            f"{moduli.size} samples; at least {MIN_DIVERGENCE_SAMPLES} are needed"
        )
    tail = max(2, moduli.size // 10)
    if not np.all(moduli[-tail:] > threshold):
        return False
    half = moduli.size // 2
    return bool(moduli[half:].min() >= moduli[:half].min())


def divergence_criterion(
    store: ModelStore, xs: Sequence[ModelPoint], threshold: Optional[float] = None
) -> bool:
    """Finite-sample test that a sequence of model points tends to infinity"""
    if threshold is None:
        threshold = Config.DIVERGENCE_FACTOR * store.alphabet.spec.disc_radius
    return moduli_diverge([abs(project(store, x)) for x in xs], threshold)
