"""
Canonical rays of the target map

A canonical ray starts from a ray tail of the initial configuration and is
extended one level at a time: level n is the lift, starting at the inner end
of level n-1, of the part of the shifted ray's level n-1 curve beyond the
image of that end. When a lift runs into a critical point it continues
along the preimage selected by the sign and records a split event.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

import numpy as np

from ..config import Config
from ..maps.branches import BranchGeometry
from ..maps.entire_maps import EntireMap, local_degree
from ..symbolic.addresses import (
    DEFAULT_DELTA,
    ExternalAddress,
    SignedAddress,
    parse_address,
    shift_closure,
)
from ..utils.errors import (
    AmbiguousContinuationError,
    BranchCutError,
    EscapedMagnitudeError,
    InitialConfigurationError,
    NotInConfigurationError,
    UndeterminedCountError,
)
from ..utils.helpers import downsample_indices
from ..utils.models import AgreementReport, Sign
from .geometry import PolylineIndex, distance_to_polyline, polyline_length
from .tracer import RayTail

logger = logging.getLogger(__name__)

SPLIT_TOL = 1e-9
CRITICAL_VALUE_TOL = 1e-9
FIRST_STEP = 1e-3
ANGLE_TOL = 1e-3
MAX_BISECTIONS = 50
APPROACH = 1e-4
SATURATION_PASSES = 24
SATURATION_POINTS = 400
LEVEL_POINTS = 64
INVARIANCE_TOL = 1e-6

DEFAULT_TRACKED = ("(R)", "L.(R)", "R.L.(R)", "L1.L.(R)", "R1.(R)")


@dataclass(frozen=True)
class SplitEvent:
    """A critical point where a lift continued along the branch picked by the sign"""
    point: complex
    level: int
    local_degree: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "re": self.point.real,
            "im": self.point.imag,
            "level": self.level,
            "degree": self.local_degree,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SplitEvent":
        return cls(complex(data["re"], data["im"]), int(data["level"]), int(data["degree"]))


@dataclass
class InitialConfiguration:
    """The curves gamma^0 of every tracked address"""
    map_f: EntireMap
    rays: Dict[ExternalAddress, RayTail] = field(default_factory=dict)

    @property
    def addresses(self) -> List[ExternalAddress]:
        return list(self.rays)

    def ray(self, address: ExternalAddress) -> RayTail:
        try:
            return self.rays[address]
        except KeyError:
            raise NotInConfigurationError(f"address {address} is not in the configuration") from None

    def __contains__(self, address: ExternalAddress) -> bool:
        return address in self.rays


@dataclass(frozen=True)
class CanonicalRay:
    """Nested levels of a canonical ray stored as one polyline and level sizes"""
    signed_address: SignedAddress
    t: np.ndarray
    z: np.ndarray
    level_sizes: Tuple[int, ...]
    split_events: Tuple[SplitEvent, ...] = ()
    branch_log: Tuple[Tuple[int, str, Optional[str]], ...] = ()

    @classmethod
    def initial(cls, signed_address: SignedAddress, tail: RayTail) -> "CanonicalRay":
        return cls(signed_address, tail.t.copy(), tail.z.copy(), (len(tail),))

    @property
    def address(self) -> ExternalAddress:
        return self.signed_address.address

    @property
    def sign(self) -> Sign:
        return self.signed_address.sign

    @property
    def depth(self) -> int:
        return len(self.level_sizes) - 1

    @property
    def level_ends(self) -> Tuple[complex, ...]:
        return tuple(complex(self.z[size - 1]) for size in self.level_sizes)

    def level_curve(self, n: int) -> np.ndarray:
        if not 0 <= n <= self.depth:
            raise ValueError(f"level {n} not built (depth {self.depth})")
        return self.z[: self.level_sizes[n]]

    def level(self, n: int) -> RayTail:
        size = self.level_sizes[n]
        return RayTail(
            address=self.address,
            depth=n,
            t=self.t[:size],
            z=self.z[:size],
            level_ends=self.level_ends[: n + 1],
        )

    @property
    def levels(self) -> List[RayTail]:
        return [self.level(n) for n in range(self.depth + 1)]

    def split_levels(self) -> List[int]:
        return sorted({event.level for event in self.split_events})

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization"""
        return {
            "address": str(self.address),
            "sign": self.sign.value,
            "depth": self.depth,
            "points": [[float(t), float(z.real), float(z.imag)] for t, z in zip(self.t, self.z)],
            "levels": list(self.level_sizes),
            "split_events": [event.to_dict() for event in self.split_events],
            "branch_log": [list(entry) for entry in self.branch_log],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CanonicalRay":
        points = np.asarray(data["points"], dtype=float).reshape(-1, 3)
        return cls(
            signed_address=SignedAddress(parse_address(data["address"]), Sign.parse(data["sign"])),
            t=points[:, 0].copy(),
            z=points[:, 1] + 1j * points[:, 2],
            level_sizes=tuple(int(n) for n in data["levels"]),
            split_events=tuple(SplitEvent.from_dict(e) for e in data.get("split_events", [])),
            branch_log=tuple(
                (int(level), str(symbol), sign) for level, symbol, sign in data.get("branch_log", [])
            ),
        )


@dataclass
class LiftResult:
    points: List[complex]
    events: List[SplitEvent]
    stopped_at_critical: bool = False


class PathLifter:
    """Lifts polylines through f from a known preimage of their first vertex"""

    def __init__(self, map_f: EntireMap, delta_direction: Optional[float] = None):
        self.map_f = map_f
        delta = DEFAULT_DELTA[map_f.kind] if delta_direction is None else delta_direction
        self.geometry = BranchGeometry(map_f, delta)
        self.critical_values = map_f.critical_values()

    # -- critical data ------------------------------------------------------

    def critical_at(self, z: complex) -> Optional[complex]:
        c = self.map_f.nearest_critical_point(z)
        if c is not None and abs(z - c) < SPLIT_TOL:
            return c
        return None

    def _critical_distance(self, z: complex) -> float:
        c = self.map_f.nearest_critical_point(z)
        return float("inf") if c is None else abs(z - c)

    def _critical_value_on(self, w_a: complex, w_b: complex) -> Optional[Tuple[complex, float]]:
        """Critical value on the segment (w_a, w_b] and its fraction along it"""
        direction = w_b - w_a
        length2 = abs(direction) ** 2
        for v in self.critical_values:
            u = ((v - w_a) * direction.conjugate()).real / length2
            if not 0.0 < u <= 1.0:
                continue
            if abs(w_a + u * direction - v) <= CRITICAL_VALUE_TOL * max(1.0, abs(v)):
                return v, u
        return None

    # -- regular steps ------------------------------------------------------

    def _lift_segment(self, z: complex, w_a: complex, w_b: complex, level: int) -> List[complex]:
        """Continue the lift from z along [w_a, w_b], halving steps as needed"""
        out = []
        stack = [(w_a, w_b, 0)]
        while stack:
            a, b, depth = stack.pop()
            slope = self.map_f.derivative(z)
            predicted = z + (b - a) / slope
            candidates = self.geometry.preimage_candidates(b, near=predicted)
            dist = np.abs(candidates - predicted)
            order = np.argsort(dist)
            best = complex(candidates[order[0]])
            d1, d2 = dist[order[0]], dist[order[1]]
            if d1 > 0.25 * d2 or abs(best - z) > 0.25 * self._critical_distance(z):
                if depth >= MAX_BISECTIONS:
                    raise BranchCutError(b, level)
                mid = 0.5 * (a + b)
                stack.append((mid, b, depth + 1))
                stack.append((a, mid, depth + 1))
                continue
            z = best
            out.append(z)
        return out

    def _approach_critical(self, z: complex, w_a: complex, v: complex, level: int) -> List[complex]:
        """Lift [w_a, v] ending at the critical point over v"""
        near_v = w_a + (1.0 - APPROACH) * (v - w_a)
        out = self._lift_segment(z, w_a, near_v, level)
        last = out[-1] if out else z
        c = self.map_f.nearest_critical_point(last)
        if c is None or abs(self.map_f.eval(c) - v) > CRITICAL_VALUE_TOL * max(1.0, abs(v)):
            raise BranchCutError(v, level)
        out.append(c)
        return out

    def _continue_split(
        self,
        c: complex,
        incoming: Optional[complex],
        w_b: complex,
        sign: Optional[Sign],
        level: int,
    ) -> Tuple[complex, complex, SplitEvent]:
        """First step away from a critical point on the side chosen by the sign"""
        degree = local_degree(self.map_f, c)
        if degree != 2 or incoming is None or sign is None:
            raise AmbiguousContinuationError(c, level)
        v = self.map_f.eval(c)
        w_step = v + FIRST_STEP * (w_b - v)
        candidates = self.geometry.preimage_candidates(w_step, near=c)
        order = np.argsort(np.abs(candidates - c))
        reference = incoming - c
        chosen = None
        for index in order[:2]:
            q = complex(candidates[index])
            angle = np.angle((q - c) / reference)
            if abs(np.sin(angle)) < ANGLE_TOL:
                raise AmbiguousContinuationError(c, level)
            if (angle > 0) == (sign is Sign.PLUS):
                chosen = q
        if chosen is None:
            raise AmbiguousContinuationError(c, level)
        return chosen, w_step, SplitEvent(c, level, degree)

    # -- paths --------------------------------------------------------------

    def lift(
        self,
        start: complex,
        path: Sequence[complex],
        level: int,
        sign: Optional[Sign] = None,
        incoming: Optional[complex] = None,
        stop_at_critical: bool = False,
    ) -> LiftResult:
        """Lift the polyline `path` (path[0] = f(start)) starting at `start`"""
        z = complex(start)
        trail = [incoming, z]
        out: List[complex] = []
        events: List[SplitEvent] = []

        def advance(points: List[complex]):
            out.extend(points)
            trail.extend(points)

        for i in range(len(path) - 1):
            w_a, w_b = complex(path[i]), complex(path[i + 1])
            if w_a == w_b:
                continue
            c = self.critical_at(z)
            if c is not None:
                if stop_at_critical:
                    return LiftResult(out, events, True)
                q, w_a, event = self._continue_split(c, trail[-2], w_b, sign, level)
                events.append(event)
                advance([q])
                z = q
            hit = self._critical_value_on(w_a, w_b)
            if hit is not None:
                v, u = hit
                advance(self._approach_critical(z, w_a, v, level))
                z = out[-1]
                if u >= 1.0 - CRITICAL_VALUE_TOL:
                    continue
                if stop_at_critical:
                    return LiftResult(out, events, True)
                q, w_a, event = self._continue_split(z, trail[-2], w_b, sign, level)
                events.append(event)
                advance([q])
                z = q
            pieces = self._lift_segment(z, w_a, w_b, level)
            if pieces:
                advance(pieces)
                z = pieces[-1]
        stopped = stop_at_critical and self.critical_at(z) is not None
        return LiftResult(out, events, stopped)


def path_beyond(curve: np.ndarray, w: complex) -> np.ndarray:
    """The part of a polyline after the point w, which lies on it, toward the inner end"""
    curve = np.asarray(curve, dtype=complex)
    if curve.size < 2:
        return curve[-1:]
    starts, ends = curve[:-1], curve[1:]
    direction = ends - starts
    length2 = np.abs(direction) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.real(np.conj(direction) * (w - starts)) / length2
    u = np.where(length2 > 0, np.clip(u, 0.0, 1.0), 0.0)
    closest = starts + u * direction
    dist = np.abs(w - closest)
    on_curve = np.nonzero(dist <= SPLIT_TOL * max(1.0, abs(w)))[0]
    index = int(on_curve[-1]) if on_curve.size else int(np.argmin(dist))
    path = np.concatenate([[closest[index]], curve[index + 1:]])
    keep = np.concatenate([[True], np.abs(np.diff(path)) > 0])
    return path[keep]


def _append_points(
    t: np.ndarray, z: np.ndarray, new_points: List[complex], limit: int, keep: Iterable[complex] = ()
) -> Tuple[np.ndarray, np.ndarray]:
    """Append lifted points at the inner end with parameters below the current end"""
    new = np.asarray(new_points, dtype=complex)
    if new.size == 0:
        return t, z
    keep_index = [i for i, p in enumerate(new) if any(abs(p - k) < SPLIT_TOL for k in keep)]
    chosen = downsample_indices(new.size, limit, keep_index)
    new = new[chosen]
    lengths = polyline_length(np.concatenate([[z[-1]], new]))[1:]
    total = lengths[-1] if lengths[-1] > 0 else 1.0
    t_end = t[-1]
    new_t = t_end * (1.0 - 0.5 * lengths / total)
    valid = np.concatenate([[new_t[0] < t_end], np.diff(new_t) < 0])
    return np.concatenate([t, new_t[valid]]), np.concatenate([z, new[valid]])


def saturate_configuration(
    map_f: EntireMap,
    configuration: InitialConfiguration,
    passes: int = SATURATION_PASSES,
    lifter: Optional[PathLifter] = None,
) -> InitialConfiguration:
    """Extend every curve by critical-free lifts until none grows"""
    lifter = lifter or PathLifter(map_f)
    rays = dict(configuration.rays)
    for number in range(passes):
        snapshot = dict(rays)
        grown = 0
        for address, ray in snapshot.items():
            end = complex(ray.z[-1])
            if lifter.critical_at(end) is not None:
                continue
            shifted = snapshot.get(address.shift())
            if shifted is None:
                raise NotInConfigurationError(f"shift of {address} is not in the configuration")
            path = path_beyond(shifted.z, map_f.eval(end))
            if path.size < 2:
                continue
            result = lifter.lift(end, path, 0, incoming=complex(ray.z[-2]), stop_at_critical=True)
            if not result.points:
                continue
            t, z = _append_points(ray.t, ray.z, result.points, SATURATION_POINTS)
            rays[address] = RayTail(address, ray.depth, t, z, (complex(z[-1]),))
            grown += 1
        logger.debug(f"saturation pass {number}: {grown} curves extended")
        if not grown:
            break
    return InitialConfiguration(map_f, rays)


def forward_invariance_defect(map_f: EntireMap, ray: RayTail, shifted: RayTail) -> float:
    """Largest relative distance of f(vertices) to the shifted curve"""
    reach = np.max(np.abs(shifted.z))
    images = map_f.eval_array(ray.z)
    inside = np.isfinite(images) & (np.abs(images) <= reach)
    if not inside.any():
        return 0.0
    images = images[inside]
    distances = PolylineIndex(shifted.z).distance(images)
    return float(np.max(distances / np.maximum(1.0, np.abs(images))))


def build_initial_configuration(
    map_f: EntireMap,
    theta: Any,
    addresses: Iterable[ExternalAddress],
    tol: float = INVARIANCE_TOL,
    saturate: bool = True,
) -> InitialConfiguration:
    """gamma^0 of each address as the theta-image of its model hair, then saturated

    `theta` provides hair_image(address) -> RayTail.
    """
    addresses = shift_closure(addresses)
    configuration = InitialConfiguration(
        map_f, {address: theta.hair_image(address) for address in addresses}
    )
    if saturate:
        configuration = saturate_configuration(map_f, configuration)
    for address in addresses:
        defect = forward_invariance_defect(
            map_f, configuration.ray(address), configuration.ray(address.shift())
        )
        if defect > tol:
            raise InitialConfigurationError(str(address), defect)
    return configuration


def extend_one_level(
    map_f: EntireMap,
    ray: CanonicalRay,
    shifted: CanonicalRay,
    lifter: Optional[PathLifter] = None,
) -> CanonicalRay:
    """Level n+1 of a canonical ray from level n of the ray with the shifted signed address"""
    lifter = lifter or PathLifter(map_f)
    n = ray.depth + 1
    end = complex(ray.z[-1])
    incoming = complex(ray.z[-2]) if ray.z.size >= 2 else None
    path = path_beyond(shifted.level_curve(n - 1), map_f.eval(end))
    result = LiftResult([], [])
    if path.size >= 2:
        result = lifter.lift(end, path, n, sign=ray.sign, incoming=incoming)
    t, z = _append_points(
        ray.t, ray.z, result.points, LEVEL_POINTS, keep=[e.point for e in result.events]
    )
    symbol = ray.address.symbol(n - 1)
    split_sign = ray.sign.value if result.events else None
    return CanonicalRay(
        signed_address=ray.signed_address,
        t=t,
        z=z,
        level_sizes=ray.level_sizes + (int(z.size),),
        split_events=ray.split_events + tuple(result.events),
        branch_log=ray.branch_log + ((n, str(symbol), split_sign),),
    )


def build_canonical_rays(
    map_f: EntireMap,
    configuration: InitialConfiguration,
    addresses: Optional[Iterable[ExternalAddress]] = None,
    depth: int = 1,
) -> Dict[SignedAddress, CanonicalRay]:
    """Both signed copies of every address in the shift-closure, built level by level"""
    closure = shift_closure(addresses if addresses is not None else configuration.addresses)
    rays = {}
    for address in closure:
        tail = configuration.ray(address)
        for sign in (Sign.MINUS, Sign.PLUS):
            key = SignedAddress(address, sign)
            rays[key] = CanonicalRay.initial(key, tail)

    lifter = PathLifter(map_f)
    keys = list(rays)
    for n in range(1, depth + 1):
        snapshot = rays

        def step(key: SignedAddress) -> CanonicalRay:
            return extend_one_level(map_f, snapshot[key], snapshot[key.shift()], lifter)

        with ThreadPoolExecutor(max_workers=max(1, Config.THREADS)) as pool:
            results = list(pool.map(step, keys))
        rays = dict(zip(keys, results))
        splits = sum(len(r.split_events) for r in results)
        logger.debug(f"level {n}: {len(keys)} rays extended, {splits} split events so far")
    return rays


def _ray_list(rays: Union[Mapping[SignedAddress, CanonicalRay], Iterable[CanonicalRay]]):
    if isinstance(rays, Mapping):
        return list(rays.values())
    return list(rays)


def signed_addresses_of(
    rays: Union[Mapping[SignedAddress, CanonicalRay], Iterable[CanonicalRay]],
    z: complex,
    depth: Optional[int] = None,
    tol: Optional[float] = None,
) -> Set[SignedAddress]:
    """Signed addresses of the canonical rays passing within tol of z"""
    tol = Config.MEMBERSHIP_TOL if tol is None else tol
    found = set()
    for ray in _ray_list(rays):
        level = ray.depth if depth is None else min(depth, ray.depth)
        if distance_to_polyline([z], ray.level_curve(level))[0] <= tol:
            found.add(ray.signed_address)
    if not found:
        raise NotInConfigurationError(f"{z} lies on no tracked ray at this depth")
    return found


def count_formula(map_f: EntireMap, z: complex, depth: int) -> int:
    """2 times the product of local degrees along the first depth orbit points"""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    lifter = PathLifter(map_f)
    record = map_f.orbit(z, depth)
    points = record.points
    product = 1
    for point in points[:depth]:
        try:
            product *= local_degree(map_f, point)
        except EscapedMagnitudeError:
            break
    if len(points) > depth and lifter.critical_at(points[depth]) is not None:
        raise UndeterminedCountError(
            f"orbit of {z} meets a critical point at the truncation depth {depth}"
        )
    return 2 * product


def check_agreement_interval(
    rays: Union[Mapping[SignedAddress, CanonicalRay], Iterable[CanonicalRay]], level: int
) -> AgreementReport:
    """Compare the branch chains of rays whose signed addresses agree to depth `level`

    Same-sign rays agreeing to the depth must make identical choices. The two
    copies of one address must differ exactly at their split levels.
    """
    ray_list = _ray_list(rays)
    report = AgreementReport(passed=True, level=level)
    for ray in ray_list:
        report.split_levels[str(ray.signed_address)] = ray.split_levels()

    def chain(ray: CanonicalRay) -> Dict[int, Tuple[str, Optional[str]]]:
        return {lv: (symbol, sign) for lv, symbol, sign in ray.branch_log if lv <= level}

    for i, first in enumerate(ray_list):
        for second in ray_list[i + 1:]:
            name_a, name_b = str(first.signed_address), str(second.signed_address)
            prefix_a = first.address.symbols(first.address.available(level))
            prefix_b = second.address.symbols(second.address.available(level))
            chain_a, chain_b = chain(first), chain(second)
            if prefix_a != prefix_b:
                report.outside_interval.append((name_a, name_b))
                continue
            report.compared_pairs += 1
            differing = [
                lv for lv in sorted(set(chain_a) & set(chain_b))
                if chain_a[lv][0] != chain_b[lv][0]
                or (
                    chain_a[lv][1] is not None
                    and chain_b[lv][1] is not None
                    and chain_a[lv][1] != chain_b[lv][1]
                )
            ]
            if first.sign is second.sign:
                for lv in differing:
                    report.mismatches.append((name_a, name_b, lv))
            elif first.address == second.address:
                shared = set(first.split_levels()) & set(second.split_levels())
                expected = sorted(lv for lv in shared if lv <= level)
                if differing != expected:
                    for lv in sorted(set(differing) ^ set(expected)):
                        report.mismatches.append((name_a, name_b, lv))
            else:
                report.outside_interval.append((name_a, name_b))
    report.passed = not report.mismatches
    return report


def default_tracked_addresses() -> List[ExternalAddress]:
    return [parse_address(literal) for literal in DEFAULT_TRACKED]
