"""
Hair tracing by closed-form pullback along an external address

A point of the hair with address F_0 F_1 ... at parameter t is obtained by
placing a straight seed in the domain F_m at log-modulus growth^m(t), aimed
at the tract of F_{m+1}, and pulling it back through the branches
F_{m-1}, ..., F_0. The level m is as deep as the configured depth allows
without the seed modulus passing the escape threshold.

Sampling is organized in blocks: a fundamental parameter interval
[ginv(S), S] around the start radius S and its images under growth and
its inverse. The grid is therefore mapped into itself by the dynamics,
which keeps forward images of samples on vertices of the shifted hair.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import mpmath
import numpy as np

from ..config import Config
from ..maps.branches import (
    SIDE_DIRECTION,
    BranchGeometry,
    inverse_growth,
    straight_line_growth,
)
from ..maps.entire_maps import EntireMap, disjoint_type_check
from ..symbolic.addresses import DEFAULT_DELTA, ExternalAddress, Symbol, parse_address
from ..symbolic.tracts import Alphabet, DomainSpec, FundamentalDomain, build_alphabet
from ..utils.errors import BranchDomainError, PrecisionError
from ..utils.models import EndpointEstimate, PrecisionMode, RayDynamicsReport
from .geometry import PolylineIndex, diameter

logger = logging.getLogger(__name__)

MAX_DOUBLE_DEPTH = 40
TAIL_FLOOR = 4.0
_REFINE_ROUNDS = 6


@dataclass
class PullbackConfig:
    """Sampling and depth settings of a trace"""
    start_radius: float = 8.0
    samples: int = 32
    depth: int = 20
    refine_tol: float = 1e-7
    t_max: float = 64.0
    t_floor: Optional[float] = None
    max_points: int = 20000

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be non-negative")
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if self.t_max <= self.start_radius:
            raise ValueError("t_max must exceed start_radius")

    def with_depth(self, depth: int) -> "PullbackConfig":
        return replace(self, depth=depth)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "start_radius": self.start_radius,
            "samples": self.samples,
            "depth": self.depth,
            "refine_tol": self.refine_tol,
            "t_max": self.t_max,
            "t_floor": self.t_floor,
            "max_points": self.max_points,
        }


@dataclass(frozen=True)
class RayTail:
    """Sampled hair: parameters t strictly decreasing, matching points z"""
    address: ExternalAddress
    depth: int
    t: np.ndarray
    z: np.ndarray
    level_ends: Tuple[complex, ...] = field(default_factory=tuple)

    @property
    def points(self) -> List[Tuple[float, complex]]:
        return [(float(t), complex(z)) for t, z in zip(self.t, self.z)]

    def __len__(self) -> int:
        return int(self.z.size)

    @property
    def t_range(self) -> Tuple[float, float]:
        return float(self.t[-1]), float(self.t[0])

    def point_at(self, t: float) -> complex:
        """Linear interpolation along the polyline in the parameter"""
        ts, zs = self.t[::-1], self.z[::-1]
        if t < ts[0] or t > ts[-1]:
            raise ValueError(f"t={t} outside traced range [{ts[0]}, {ts[-1]}]")
        return complex(np.interp(t, ts, zs.real) + 1j * np.interp(t, ts, zs.imag))

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization"""
        return {
            "address": str(self.address),
            "depth": self.depth,
            "points": [[float(t), float(z.real), float(z.imag)] for t, z in zip(self.t, self.z)],
            "level_ends": [[float(e.real), float(e.imag)] for e in self.level_ends],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RayTail":
        points = np.asarray(data["points"], dtype=float).reshape(-1, 3)
        ends = tuple(complex(re, im) for re, im in data.get("level_ends", []))
        return cls(
            address=parse_address(data["address"]),
            depth=int(data["depth"]),
            t=points[:, 0].copy(),
            z=points[:, 1] + 1j * points[:, 2],
            level_ends=ends,
        )


class HairTracer:
    """Closed-form pullback tracer for one map"""

    def __init__(
        self,
        map_f: EntireMap,
        alphabet: Optional[Alphabet] = None,
        cfg: Optional[PullbackConfig] = None,
    ):
        self.map_f = map_f
        self.alphabet = alphabet or build_alphabet(map_f)
        self.cfg = cfg or PullbackConfig()
        self.geometry = self.alphabet.geometry
        if self.cfg.start_radius <= self.alphabet.spec.disc_radius:
            raise ValueError(
                f"start radius {self.cfg.start_radius} must exceed the disc radius "
                f"{self.alphabet.spec.disc_radius}"
            )
        self.extended = map_f.precision_mode is PrecisionMode.EXTENDED
        if not self.extended and self.cfg.depth > MAX_DOUBLE_DEPTH:
            raise PrecisionError(
                f"depth {self.cfg.depth} needs extended precision "
                f"(double precision supports depth <= {MAX_DOUBLE_DEPTH})"
            )

    # -- parameters ---------------------------------------------------------

    def growth(self, t):
        return straight_line_growth(self.map_f, t)

    def ginv(self, y):
        with np.errstate(invalid="ignore", divide="ignore"):
            return inverse_growth(self.map_f, y)

    def parameter_floors(self, depth: Optional[int] = None) -> List[float]:
        """t_min(m) for m = 0..depth: the parameter whose level-m seed sits at the start radius"""
        depth = self.cfg.depth if depth is None else depth
        floors = [float(self.cfg.start_radius)]
        for _ in range(depth):
            nxt = float(self.ginv(floors[-1]))
            if not np.isfinite(nxt) or nxt <= 0:
                break
            floors.append(nxt)
        return floors

    def lower_limit(self, depth: Optional[int] = None) -> float:
        floors = self.parameter_floors(depth)
        lower = floors[-1]
        if self.cfg.t_floor is not None:
            lower = max(lower, self.cfg.t_floor)
        return lower

    # -- points -------------------------------------------------------------

    def symbols_for(self, address: ExternalAddress, depth: int) -> List[Symbol]:
        """F_0 .. F_{depth+1} (fewer for short finite addresses), checked against the window"""
        count = address.available(depth + 2)
        symbols = address.symbols(count)
        for symbol in symbols:
            self.alphabet.domain(symbol)
        return symbols

    def _levels(self, ts: np.ndarray, depth: int) -> Tuple[np.ndarray, np.ndarray]:
        """Pullback level of each parameter and the matching seed log-modulus"""
        levels = np.zeros(ts.shape, dtype=int)
        moduli = ts.astype(float).copy()
        threshold = Config.ESCAPE_THRESHOLD
        for m in range(1, depth + 1):
            with np.errstate(over="ignore", invalid="ignore"):
                nxt = self.growth(moduli)
            ok = (levels == m - 1) & np.isfinite(nxt) & (nxt <= threshold)
            if not ok.any():
                break
            levels[ok] = m
            moduli[ok] = nxt[ok]
        return levels, moduli

    def points(self, address: ExternalAddress, ts, depth: Optional[int] = None) -> np.ndarray:
        """Hair points z(t) for an array of parameters"""
        depth = self.cfg.depth if depth is None else depth
        symbols = self.symbols_for(address, depth)
        depth = min(depth, len(symbols) - 1)
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if self.extended:
            return self._points_mp(symbols, ts, depth)

        levels, moduli = self._levels(ts, depth)
        result = np.empty(ts.shape, dtype=complex)
        for m in np.unique(levels):
            idx = np.nonzero(levels == m)[0]
            current = symbols[m]
            following = symbols[m + 1] if m + 1 < len(symbols) else current
            w = self.geometry.seed(
                current.side, current.branch, SIDE_DIRECTION[following.side], moduli[idx]
            )
            for j in range(m - 1, -1, -1):
                self.geometry.check_no_straddle(w, level=j)
                w = self.geometry.inverse(symbols[j].side, symbols[j].branch, w)
            result[idx] = w
        return result

    def _points_mp(self, symbols: List[Symbol], ts: np.ndarray, depth: int) -> np.ndarray:
        result = np.empty(ts.shape, dtype=complex)
        threshold = Config.ESCAPE_THRESHOLD
        with mpmath.workdps(self.map_f.precision):
            scale = self.map_f.growth_factor
            for i, t in enumerate(ts):
                modulus = mpmath.mpf(float(t))
                level = 0
                while level < depth:
                    nxt = scale * mpmath.exp(modulus)
                    if nxt > threshold:
                        break
                    modulus = nxt
                    level += 1
                current = symbols[level]
                following = symbols[level + 1] if level + 1 < len(symbols) else current
                w = self.geometry.seed_mp(
                    current.side, current.branch, SIDE_DIRECTION[following.side], modulus
                )
                for j in range(level - 1, -1, -1):
                    w = self.geometry.inverse_mp(symbols[j].side, symbols[j].branch, w)
                result[i] = complex(w)
        return result

    # -- sampling -----------------------------------------------------------

    def _blocks(self, base: np.ndarray, depth: int) -> np.ndarray:
        """Images of the fundamental block under growth and its inverse, one row each"""
        rows = [base]
        for _ in range(depth - 1):
            rows.append(self.ginv(rows[-1]))
        forward = []
        current = base
        while True:
            with np.errstate(over="ignore"):
                current = self.growth(current)
            if not np.isfinite(current[0]) or current[0] > self.cfg.t_max:
                break
            forward.append(current)
        blocks = np.vstack(forward[::-1] + rows)
        lower = self.lower_limit(depth)
        blocks[(blocks < lower) | (blocks > self.cfg.t_max) | ~np.isfinite(blocks)] = np.nan
        return blocks

    def _evaluate(self, address: ExternalAddress, blocks: np.ndarray, depth: int) -> np.ndarray:
        values = np.full(blocks.shape, np.nan, dtype=complex)
        mask = np.isfinite(blocks)
        values[mask] = self.points(address, blocks[mask], depth)
        return values

    def parameter_grid(self, address: ExternalAddress, depth: Optional[int] = None) -> np.ndarray:
        """Dynamically closed parameter grid, refined where chords deviate from the hair"""
        depth = self.cfg.depth if depth is None else depth
        start = float(self.cfg.start_radius)
        low = float(self.ginv(start))
        count = max(2, int(np.ceil((start - low) * self.cfg.samples)) + 1)
        base = np.linspace(low, start, count)
        rows = max(depth, 1)
        for _ in range(_REFINE_ROUNDS):
            blocks = self._blocks(base, rows)
            if base.size * blocks.shape[0] * 2 > self.cfg.max_points:
                break
            mids = 0.5 * (base[:-1] + base[1:])
            mid_blocks = self._blocks(mids, rows)
            z = self._evaluate(address, blocks, depth)
            zm = self._evaluate(address, mid_blocks, depth)
            chord = 0.5 * (z[:, :-1] + z[:, 1:])
            with np.errstate(invalid="ignore"):
                deviation = np.abs(zm - chord) / np.maximum(1.0, np.abs(zm))
            deviation = np.nan_to_num(deviation, nan=0.0)
            bad = deviation.max(axis=0) > self.cfg.refine_tol
            if not bad.any():
                break
            base = np.sort(np.concatenate([base, mids[bad]]))
        grid = self._blocks(base, rows).ravel()
        grid = grid[np.isfinite(grid)]
        extras = [self.lower_limit(depth), self.cfg.t_max]
        extras += [t for t in self.parameter_floors(depth) if t >= extras[0]]
        grid = np.unique(np.concatenate([grid, extras]))
        if depth == 0:
            grid = grid[grid >= start]
        return grid[::-1]

    # -- tracing ------------------------------------------------------------

    def level_ends(self, address: ExternalAddress, depth: Optional[int] = None) -> Tuple[complex, ...]:
        """e_m = z^m(t_min(m)): the inner end of the level-m curve"""
        depth = self.cfg.depth if depth is None else depth
        floor = self.cfg.t_floor
        ends = []
        for m, t in enumerate(self.parameter_floors(depth)):
            if floor is not None and t < floor:
                break
            ends.append(complex(self.points(address, [t], m)[0]))
        return tuple(ends)

    def trace(self, address: ExternalAddress, depth: Optional[int] = None) -> RayTail:
        depth = self.cfg.depth if depth is None else depth
        ts = self.parameter_grid(address, depth)
        zs = self.points(address, ts, depth)
        keep = np.concatenate([[True], np.abs(np.diff(zs)) > 0])
        ray = RayTail(
            address=address,
            depth=depth,
            t=ts[keep],
            z=zs[keep],
            level_ends=self.level_ends(address, depth),
        )
        logger.debug(f"traced {address} on {self.map_f.spec}: {len(ray)} points, depth {depth}")
        return ray


def hair_points(
    map_f: EntireMap,
    address: ExternalAddress,
    ts,
    depth: int,
    alphabet: Optional[Alphabet] = None,
) -> np.ndarray:
    """Closed-form hair points at the given parameters"""
    tracer = HairTracer(map_f, alphabet, PullbackConfig(depth=depth))
    return tracer.points(address, ts, depth)


def trace_ray_disjoint(
    map_g: EntireMap,
    address: ExternalAddress,
    cfg: Optional[PullbackConfig] = None,
    alphabet: Optional[Alphabet] = None,
) -> RayTail:
    """Hair of a disjoint-type map with the given address"""
    report = disjoint_type_check(map_g)
    if not report.passed:
        logger.warning(f"{map_g.spec} failed the disjoint-type check: {report.reason}")
    return HairTracer(map_g, alphabet, cfg).trace(address)


def trace_ray_tail(
    map_f: EntireMap,
    address: ExternalAddress,
    cfg: Optional[PullbackConfig] = None,
    alphabet: Optional[Alphabet] = None,
) -> RayTail:
    """Far ray tail of a map that need not be of disjoint type"""
    return HairTracer(map_f, alphabet, _tail_config(cfg)).trace(address)


def _tail_config(cfg: Optional[PullbackConfig]) -> PullbackConfig:
    cfg = cfg or PullbackConfig()
    if cfg.t_floor is None:
        cfg = replace(cfg, t_floor=TAIL_FLOOR)
    return cfg


def trace_many(
    map_f: EntireMap,
    addresses: Iterable[ExternalAddress],
    cfg: Optional[PullbackConfig] = None,
    alphabet: Optional[Alphabet] = None,
    tails: bool = False,
) -> Dict[ExternalAddress, RayTail]:
    """Trace several addresses in parallel; the result keeps the input order

    With tails=True the map need not be of disjoint type and the traces stop
    at the tail floor.
    """
    addresses = list(addresses)
    if tails:
        cfg = _tail_config(cfg)
    else:
        report = disjoint_type_check(map_f)
        if not report.passed:
            logger.warning(f"{map_f.spec} failed the disjoint-type check: {report.reason}")
    tracer = HairTracer(map_f, alphabet, cfg)
    with ThreadPoolExecutor(max_workers=max(1, Config.THREADS)) as pool:
        results = list(pool.map(tracer.trace, addresses))
    return dict(zip(addresses, results))


def inverse_branch(
    map_f: EntireMap,
    domain: Union[FundamentalDomain, Symbol],
    w: complex,
    spec: Optional[DomainSpec] = None,
) -> complex:
    """The preimage of w lying in the given fundamental domain

    With a domain spec, w must lie in W. Without one only the asymptotic
    value and the cut itself are excluded.
    """
    symbol = domain.symbol if isinstance(domain, FundamentalDomain) else domain
    w = complex(w)
    if spec is not None:
        if not spec.in_w(w):
            raise BranchDomainError(w)
        delta = spec.delta_direction
    else:
        delta = DEFAULT_DELTA[map_f.kind]
    if map_f.kind == "exp" and w == 0:
        raise BranchDomainError(w, "asymptotic value has no preimage")
    geometry = BranchGeometry(map_f, delta)
    return complex(geometry.inverse(symbol.side, symbol.branch, w))


def verify_ray_dynamics(
    map_f: EntireMap, ray: RayTail, shifted: RayTail, tol: float = 1e-6
) -> RayDynamicsReport:
    """Check that f maps the ray into the shifted ray and that moduli grow

    The defect of a sample is its image's distance to the shifted polyline,
    relative to max(1, |f(z)|). Samples whose image lies beyond the shifted
    trace's range are skipped.
    """
    growth = straight_line_growth(map_f, ray.t)
    inside = growth <= shifted.t[0]
    if not inside.any():
        return RayDynamicsReport(False, float("inf"), reason="no samples map into the shifted range")
    zs = ray.z[inside]
    images = map_f.eval_array(zs)
    finite = np.isfinite(images)
    zs, images = zs[finite], images[finite]
    if zs.size == 0:
        return RayDynamicsReport(False, float("inf"), reason="forward images overflow")

    index = PolylineIndex(shifted.z)
    defects = index.distance(images) / np.maximum(1.0, np.abs(images))
    worst = int(np.argmax(defects))
    max_defect = float(defects[worst])

    # far half of the checked samples: forward image must be further out
    far = zs[: max(1, zs.size // 2)]
    escape_increasing = bool(np.all(np.abs(map_f.eval_array(far)) > np.abs(far)))

    passed = max_defect < tol and escape_increasing
    reason = ""
    if max_defect >= tol:
        reason = f"defect {max_defect:.3g} not below {tol:g}"
    elif not escape_increasing:
        reason = "moduli do not increase under f"
    return RayDynamicsReport(
        passed=passed,
        max_defect=max_defect,
        worst_point=complex(zs[worst]),
        checked=int(zs.size),
        escape_increasing=escape_increasing,
        reason=reason,
    )


def endpoint_estimate(ray: Any, tol: float = 1e-9) -> EndpointEstimate:
    """Limit of the level ends if the last three increments are below tol"""
    ends = np.asarray(getattr(ray, "level_ends", ()), dtype=complex)
    if ray.depth < 2 or ends.size < 2:
        last = float(abs(ends[-1] - ends[-2])) if ends.size >= 2 else float("inf")
        return EndpointEstimate(False, None, last)
    increments = np.abs(np.diff(ends))
    last = float(increments[-1])
    if increments.size >= 3 and np.all(increments[-3:] < tol):
        return EndpointEstimate(True, complex(ends[-1]), last)
    return EndpointEstimate(False, None, last)


def backward_contraction(
    map_g: EntireMap,
    address: ExternalAddress,
    cfg: Optional[PullbackConfig] = None,
    levels: int = 8,
    alphabet: Optional[Alphabet] = None,
) -> Tuple[List[float], List[float]]:
    """Diameters of the seed arc at the start radius after n = 0..levels pullbacks

    Returns the diameters and the ratios of consecutive diameters.
    """
    cfg = cfg or PullbackConfig()
    tracer = HairTracer(map_g, alphabet, cfg.with_depth(min(levels, MAX_DOUBLE_DEPTH)))
    geometry = tracer.geometry
    symbols = tracer.symbols_for(address, levels)
    moduli = np.linspace(cfg.start_radius, 2.0 * cfg.start_radius, cfg.samples)
    diameters = []
    for n in range(levels + 1):
        current = symbols[n]
        following = symbols[n + 1] if n + 1 < len(symbols) else current
        w = geometry.seed(current.side, current.branch, SIDE_DIRECTION[following.side], moduli)
        for j in range(n - 1, -1, -1):
            w = geometry.inverse(symbols[j].side, symbols[j].branch, w)
        diameters.append(diameter(w))
    ratios = [b / a for a, b in zip(diameters[:-1], diameters[1:]) if a > 0]
    return diameters, ratios
