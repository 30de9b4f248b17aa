"""
Pullback approximations of the semiconjugacy

Stage n sends a model point x forward n times under the model map, across
to the target by theta, and back n times through the inverse branches that
follow the canonical rays of the shifted signed addresses of x. The gaps
between consecutive stages are measured in the surrogate metric.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..config import Config
from ..maps.entire_maps import EntireMap, make_map
from ..model.space import (
    ModelPoint,
    ModelStore,
    build_model_store,
    model_map,
    moduli_diverge,
    project,
)
from ..rays.canonical import (
    CanonicalRay,
    InitialConfiguration,
    PathLifter,
    build_canonical_rays,
    build_initial_configuration,
    count_formula,
    signed_addresses_of,
)
from ..rays.geometry import distance_to_polyline
from ..rays.tracer import PullbackConfig, endpoint_estimate
from ..symbolic.addresses import ExternalAddress, SignedAddress
from ..utils.errors import (
    BranchChainError,
    BranchDomainError,
    CriniferError,
    MetricDomainError,
    NotInConfigurationError,
    UndeterminedCountError,
)
from ..utils.models import FiberCountReport, LandingReport, Sign
from .metric import MetricSurrogate
from .theta import ThetaMap, build_theta

logger = logging.getLogger(__name__)

CAUCHY_CORE = 0.01
CHAIN_TOL = 0.05
LANDING_DEPTH = 5
LANDING_CAUCHY_TOL = 1e-5
LANDING_SLACK = 10.0

RayIndex = Mapping[SignedAddress, CanonicalRay]


def _chain_ray(rays: RayIndex, key: SignedAddress, level: int) -> np.ndarray:
    ray = rays.get(key)
    if ray is None or ray.depth < level:
        raise BranchChainError(level, str(key))
    return ray.level_curve(level)


def pull_back_along(map_f: EntireMap, curve: np.ndarray, w: complex, level: int) -> complex:
    """The preimage of w lying on (or closest to) the given curve"""
    with np.errstate(over="ignore", invalid="ignore"):
        images = map_f.eval_array(curve)
    finite = np.isfinite(images)
    if not finite.any():
        raise BranchChainError(level)
    gaps = np.where(finite, np.abs(images - w), np.inf)
    near = complex(curve[int(np.argmin(gaps))])
    lifter = PathLifter(map_f)
    candidates = lifter.geometry.preimage_candidates(w, near)
    distances = distance_to_polyline(candidates, curve)
    best = int(np.argmin(distances))
    z = complex(candidates[best])
    reach = float(np.max(np.abs(curve)))
    if abs(z) <= reach and distances[best] > CHAIN_TOL * max(1.0, abs(z)):
        raise BranchDomainError(complex(w), f"no preimage near the level {level} curve")
    return z


def phi_stage(
    map_f: EntireMap,
    theta: ThetaMap,
    store_g: ModelStore,
    x: ModelPoint,
    n: int,
    rays: RayIndex,
) -> complex:
    """phi_n(x): n model steps, theta, then n pullbacks along the branch chain"""
    if n < 0:
        raise ValueError("stage must be non-negative")
    y = x
    for _ in range(n):
        y = model_map(store_g, y)
    w = theta(y)
    for j in range(1, n + 1):
        key = SignedAddress(x.address.shifted(n - j), x.sign)
        w = pull_back_along(map_f, _chain_ray(rays, key, j), w, j)
    return w


@dataclass
class PhiApprox:
    """Stage-N values of the pullback sequence on a sample with their Cauchy gaps"""
    stage: int
    samples: List[Tuple[ModelPoint, complex]] = field(default_factory=list)
    gaps: List[float] = field(default_factory=list)
    fitted_ratio: float = math.nan
    mu_hat: float = math.nan
    residual: float = math.nan
    incomplete: bool = False
    failures: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization"""
        return {
            "stage": self.stage,
            "gaps": list(self.gaps),
            "fitted_ratio": self.fitted_ratio,
            "mu_hat": self.mu_hat,
            "residual": self.residual,
            "incomplete": self.incomplete,
            "samples": [
                {
                    "address": str(x.address),
                    "sign": x.sign.value,
                    "t": x.t,
                    "value_re": value.real,
                    "value_im": value.imag,
                }
                for x, value in self.samples
            ],
        }


def fit_ratio(gaps: Sequence[float]) -> float:
    """exp(-slope) of the least-squares line through (n, log gap_n)"""
    gaps = np.asarray(gaps, dtype=float)
    n = np.arange(gaps.size, dtype=float)
    usable = gaps > 0
    if usable.sum() < 2:
        return math.nan
    design = np.column_stack([n[usable], np.ones(int(usable.sum()))])
    (slope, _), *_ = np.linalg.lstsq(design, np.log(gaps[usable]), rcond=None)
    return float(math.exp(-slope))


def _stages(map_f, theta, store_g, x, N, rays) -> List[complex]:
    return [phi_stage(map_f, theta, store_g, x, n, rays) for n in range(N + 1)]


def cauchy_report(
    map_f: EntireMap,
    theta: ThetaMap,
    store_g: ModelStore,
    sample: Sequence[ModelPoint],
    N: int,
    rays: RayIndex,
    metric: Optional[MetricSurrogate] = None,
) -> PhiApprox:
    """Gaps d(phi_{n+1}, phi_n) for n < N and the fitted contraction ratio"""
    if N < 3:
        raise ValueError("Cauchy reports need N >= 3")
    metric = metric or MetricSurrogate(CAUCHY_CORE)
    report = PhiApprox(stage=N)

    def run(x: ModelPoint):
        try:
            return x, _stages(map_f, theta, store_g, x, N, rays), None
        except CriniferError as e:
            return x, None, e

    with ThreadPoolExecutor(max_workers=max(1, Config.THREADS)) as pool:
        results = list(pool.map(run, sample))

    gaps = np.zeros(N)
    mu = 0.0
    for x, values, error in results:
        if error is not None:
            report.incomplete = True
            report.failures.append(f"{x.signed_address} t={x.t:g}: {error}")
            continue
        try:
            steps = [metric.distance(values[n + 1], values[n]) for n in range(N)]
            mu = max(mu, metric.distance(project(store_g, x), values[0]))
        except MetricDomainError as e:
            report.incomplete = True
            report.failures.append(f"{x.signed_address} t={x.t:g}: {e}")
            continue
        gaps = np.maximum(gaps, steps)
        report.samples.append((x, values[N]))

    report.gaps = [float(g) for g in gaps]
    report.fitted_ratio = fit_ratio(report.gaps)
    report.mu_hat = max(report.gaps[0], mu) if report.samples else math.nan
    if report.samples:
        report.residual = semiconjugacy_residual(report, map_f, store_g, theta, rays)
    if report.incomplete:
        logger.warning(f"Cauchy report incomplete: {len(report.failures)} samples failed")
    logger.info(f"stage {N}: last gap {report.gaps[-1]:.3g}, ratio {report.fitted_ratio:.4g}")
    return report


def stage_identity_defect(
    phi: PhiApprox, map_f: EntireMap, store_g: ModelStore, theta: ThetaMap, rays: RayIndex
) -> float:
    """max over samples of |f(phi_N(x)) - phi_{N-1}(g~(x))|, relative to max(1, |.|)"""
    defect = 0.0
    for x, value in phi.samples:
        shifted = phi_stage(map_f, theta, store_g, model_map(store_g, x), phi.stage - 1, rays)
        image = map_f.eval(value)
        defect = max(defect, abs(image - shifted) / max(1.0, abs(shifted)))
    return defect


def semiconjugacy_residual(
    phi: PhiApprox, map_f: EntireMap, store_g: ModelStore, theta: ThetaMap, rays: RayIndex
) -> float:
    """Stage identity defect plus the geometric tail bound of the remaining gaps"""
    first = stage_identity_defect(phi, map_f, store_g, theta, rays)
    if not phi.gaps:
        return first
    ratio = phi.fitted_ratio
    if not ratio > 1.0:
        return math.inf
    return first + phi.gaps[-1] / (ratio - 1.0)


def divergence_equivalence(
    map_f: EntireMap,
    theta: ThetaMap,
    store_g: ModelStore,
    xs: Sequence[ModelPoint],
    n: int,
    rays: RayIndex,
    threshold: Optional[float] = None,
) -> Tuple[bool, bool]:
    """Whether pi(x_k) and phi_n(x_k) pass the divergence test, in that order"""
    if threshold is None:
        threshold = Config.DIVERGENCE_FACTOR * store_g.alphabet.spec.disc_radius
    model_side = moduli_diverge([abs(project(store_g, x)) for x in xs], threshold)
    target_side = moduli_diverge(
        [abs(phi_stage(map_f, theta, store_g, x, n, rays)) for x in xs], threshold
    )
    return model_side, target_side


def _critical_visits(map_f: EntireMap, rays: Sequence[CanonicalRay], depth: int) -> Optional[int]:
    """Largest number of critical points met by the orbit of a recorded split point"""
    lifter = PathLifter(map_f)
    visits = None
    for ray in rays:
        for event in ray.split_events:
            orbit = map_f.orbit(event.point, depth).points
            count = sum(1 for p in orbit if lifter.critical_at(p) is not None)
            visits = count if visits is None else max(visits, count)
    return visits


def fiber_count_check(
    map_f: EntireMap,
    rays: RayIndex,
    z: complex,
    tol: Optional[float] = None,
) -> FiberCountReport:
    """Signed addresses through z against the bound 2 N^c and the counting formula"""
    ray_list = list(rays.values())
    depth = max(ray.depth for ray in ray_list)
    count = len(signed_addresses_of(rays, z, tol=tol))
    max_degree = 2 if map_f.critical_values() else 1
    visits = _critical_visits(map_f, ray_list, depth)
    c = visits if visits is not None else 0
    bound = 2 * max_degree ** c

    formula = None
    determined = True
    try:
        formula = count_formula(map_f, z, max(1, depth))
    except UndeterminedCountError as e:
        logger.info(f"fiber count at {z}: {e}")
        determined = False

    passed = determined and count <= bound and count == formula
    return FiberCountReport(
        passed=passed,
        point=complex(z),
        count=count,
        bound=bound,
        max_degree=max_degree,
        critical_visits=visits,
        formula_count=formula,
        determined=determined,
    )


def landing_check(
    ray: CanonicalRay,
    shifted: CanonicalRay,
    map_f: EntireMap,
    tol: float = 1e-6,
    cauchy_tol: float = LANDING_CAUCHY_TOL,
) -> LandingReport:
    """Endpoint convergence of a canonical ray, checked against the endpoint of its shift

    f maps the estimated endpoint of the ray onto the estimated endpoint of
    the shifted ray. Both estimates carry an error of the order of their
    last increment; the ray's is stretched by |f'| at the endpoint.
    """
    name = str(ray.signed_address)
    if ray.depth < LANDING_DEPTH:
        return LandingReport(False, True, name, reason=f"depth {ray.depth} below {LANDING_DEPTH}")
    estimate = endpoint_estimate(ray, cauchy_tol)
    if not estimate.converged:
        return LandingReport(
            False, True, name, last_increment=estimate.last_increment, reason="not yet converged"
        )
    if shifted.depth < ray.depth - 1:
        raise BranchChainError(ray.depth - 1, str(shifted.signed_address))
    shifted_estimate = endpoint_estimate(shifted, cauchy_tol)
    if not shifted_estimate.converged:
        return LandingReport(
            False, True, name,
            endpoint=estimate.value,
            last_increment=estimate.last_increment,
            reason=f"shifted ray {shifted.signed_address} not yet converged",
        )
    target = shifted_estimate.value
    image = map_f.eval(estimate.value)
    scale = max(1.0, abs(target))
    stretch = abs(map_f.derivative(estimate.value))
    allowance = tol + LANDING_SLACK * (
        stretch * estimate.last_increment + shifted_estimate.last_increment
    ) / scale
    defect = abs(image - target) / scale
    passed = defect < allowance
    return LandingReport(
        passed=passed,
        inconclusive=False,
        address=name,
        endpoint=estimate.value,
        last_increment=estimate.last_increment,
        forward_defect=defect,
        reason="" if passed else f"forward defect {defect:.3g} not below {allowance:.3g}",
    )


@dataclass
class SemiconjugacyContext:
    """Everything the pullback stages need, built once per map pair"""
    map_f: EntireMap
    store_g: ModelStore
    theta: ThetaMap
    configuration: InitialConfiguration
    rays: Dict[SignedAddress, CanonicalRay]

    def phi(self, x: ModelPoint, n: int) -> complex:
        return phi_stage(self.map_f, self.theta, self.store_g, x, n, self.rays)

    def cauchy(self, sample: Sequence[ModelPoint], N: int) -> PhiApprox:
        return cauchy_report(self.map_f, self.theta, self.store_g, sample, N, self.rays)

    def ray(self, address: ExternalAddress, sign: Sign) -> CanonicalRay:
        try:
            return self.rays[SignedAddress(address, sign)]
        except KeyError:
            raise NotInConfigurationError(f"{address}{sign.value} is not tracked") from None

    def landing(self, address: ExternalAddress, sign: Sign, tol: float = 1e-6) -> LandingReport:
        ray = self.ray(address, sign)
        return landing_check(ray, self.ray(address.shift(), sign), self.map_f, tol)

    def fiber(self, z: complex) -> FiberCountReport:
        return fiber_count_check(self.map_f, self.rays, z)


def build_semiconjugacy(
    map_f: EntireMap,
    map_g: EntireMap,
    addresses: Sequence[ExternalAddress],
    cfg: Optional[PullbackConfig] = None,
    depth: int = 1,
) -> SemiconjugacyContext:
    """Model store, theta, initial configuration and canonical rays for a map pair"""
    cfg = cfg or PullbackConfig()
    store_g = build_model_store(map_g, addresses, cfg)
    theta = build_theta(map_f, store_g, cfg=cfg, measure=False)
    configuration = build_initial_configuration(map_f, theta, store_g.addresses)
    theta.rebind(configuration).measure()
    rays = build_canonical_rays(map_f, configuration, depth=depth)
    logger.info(
        f"semiconjugacy context {map_g.spec} -> {map_f.spec}: "
        f"{len(rays)} canonical rays at depth {depth}"
    )
    return SemiconjugacyContext(map_f, store_g, theta, configuration, rays)


def model_for(map_f: EntireMap, scale: float = 0.1) -> EntireMap:
    """The disjoint-type relative scale * f of a target map"""
    return make_map(f"scaled-{map_f.kind}", map_f.scale * scale, map_f.precision)
