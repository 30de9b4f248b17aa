"""
Modulus-matching correspondence from model hairs to ray tails of the target

A model-hair point of modulus r is sent to the point of modulus r - c on the
target ray with the same address, where c = log(growth_f / growth_g) makes
the two growth rates agree. Far out the ray tail has a closed form and the
match is solved with brentq; closer in it is read off the saturated
initial curve.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy import optimize

from ..maps.entire_maps import EntireMap
from ..model.space import ModelPoint, ModelStore, project
from ..rays.tracer import HairTracer, PullbackConfig, RayTail, TAIL_FLOOR, trace_many
from ..symbolic.addresses import ExternalAddress
from ..utils.errors import EscapedMagnitudeError, MetricDomainError, ThetaPairingError
from ..utils.helpers import downsample_indices
from .metric import MetricSurrogate

logger = logging.getLogger(__name__)

VALIDITY_DEFECT = 1e-3
VALIDITY_CORE = 2.0
ANNULUS_RADIUS = 50.0
CHECK_POINTS = 40


def monotone_run(curve: np.ndarray) -> int:
    """Length of the initial run of the polyline along which |z| strictly decreases"""
    moduli = np.abs(np.asarray(curve, dtype=complex))
    steps = np.diff(moduli) < 0
    if steps.all():
        return moduli.size
    return int(np.argmin(steps)) + 1


@dataclass
class ThetaMap:
    """Address-wise pairing of model hairs with target ray tails"""
    map_f: EntireMap
    store_g: ModelStore
    tails: Dict[ExternalAddress, RayTail]
    tracer_f: HairTracer
    offset: float
    curves: Dict[ExternalAddress, np.ndarray] = field(default_factory=dict)
    validity_radius: float = math.inf
    fitted_M: float = math.inf
    commutation_defect: float = math.inf

    @property
    def matching_rule(self) -> str:
        return f"modulus-matched, offset {self.offset:.6g}"

    def _tail(self, address: ExternalAddress) -> RayTail:
        try:
            return self.tails[address]
        except KeyError:
            raise ThetaPairingError(str(address)) from None

    def _tail_point(self, address: ExternalAddress, t: float) -> complex:
        return complex(self.tracer_f.points(address, [t])[0])

    def apply(self, address: ExternalAddress, z: complex) -> complex:
        """theta of a point z on the model hair with this address"""
        tail = self._tail(address)
        r = abs(complex(z)) - self.offset
        floor = float(tail.t[-1])
        inner = abs(self._tail_point(address, floor))
        if r >= inner:
            upper = max(2.0 * r + 10.0, float(tail.t[0]))
            t_f = optimize.brentq(
                lambda t: abs(self._tail_point(address, t)) - r, floor, upper, xtol=1e-13
            )
            return self._tail_point(address, t_f)
        curve = self.curves.get(address)
        if curve is None:
            return complex(tail.z[-1])
        run = monotone_run(curve)
        segment = curve[:run]
        moduli = np.abs(segment)
        if r <= moduli[-1]:
            return complex(segment[-1])
        # moduli decrease along the run; interpolate on the reversed arrays
        re = np.interp(r, moduli[::-1], segment.real[::-1])
        im = np.interp(r, moduli[::-1], segment.imag[::-1])
        return complex(re, im)

    def __call__(self, x: ModelPoint) -> complex:
        return self.apply(x.address, project(self.store_g, x))

    def hair_image(self, address: ExternalAddress) -> RayTail:
        """The theta-image of a whole model hair, as a ray tail of the target"""
        tail = self._tail(address)
        hair = self.store_g.hair(address)
        reach = float(np.max(np.abs(hair.z))) - self.offset
        keep = np.abs(tail.z) <= reach
        if keep.sum() < 2:
            raise ThetaPairingError(str(address))
        return RayTail(address, tail.depth, tail.t[keep], tail.z[keep], (complex(tail.z[keep][-1]),))

    def rebind(self, configuration: Any) -> "ThetaMap":
        """Use the saturated initial curves for points inside the tail range"""
        self.curves = {address: ray.z for address, ray in configuration.rays.items()}
        return self

    # -- measured constants -------------------------------------------------

    def _check_points(self) -> List[Tuple[ExternalAddress, complex]]:
        points = []
        for address, hair in self.store_g.hairs.items():
            for index in downsample_indices(len(hair), CHECK_POINTS):
                points.append((address, complex(hair.z[index])))
        return points

    def measure(self) -> "ThetaMap":
        """Fit the annulus constant M and the radius beyond which theta commutes"""
        metric = MetricSurrogate(VALIDITY_CORE)
        ratios = []
        defects = []
        for address, z in self._check_points():
            image = self.apply(address, z)
            if abs(z) >= ANNULUS_RADIUS and abs(image) > 0:
                ratios.append(max(abs(image) / abs(z), abs(z) / abs(image)))
            try:
                forward = self.map_f.eval(image)
                g_image = self.store_g.map_g.eval(z)
                shifted = self.apply(address.shift(), g_image)
                defects.append((abs(z), metric.distance(forward, shifted)))
            except (EscapedMagnitudeError, MetricDomainError, ValueError):
                continue
        self.fitted_M = max(ratios) if ratios else math.inf
        self.validity_radius = math.inf
        self.commutation_defect = math.inf
        if defects:
            defects.sort()
            moduli = np.array([m for m, _ in defects])
            values = np.array([d for _, d in defects])
            bad = np.nonzero(values >= VALIDITY_DEFECT)[0]
            start = 0 if bad.size == 0 else int(bad[-1]) + 1
            if start < moduli.size:
                self.validity_radius = float(moduli[start])
                self.commutation_defect = float(values[start:].max())
        logger.info(
            f"theta: M={self.fitted_M:.4g}, validity radius={self.validity_radius:.4g}"
        )
        return self


def build_theta(
    map_f: EntireMap,
    store_g: ModelStore,
    rays_f: Optional[Any] = None,
    cfg: Optional[PullbackConfig] = None,
    addresses: Optional[Iterable[ExternalAddress]] = None,
    measure: bool = True,
) -> ThetaMap:
    """Pair model hairs with target ray tails of the same address"""
    cfg = cfg or store_g.cfg
    addresses = list(addresses) if addresses is not None else store_g.addresses
    for address in addresses:
        store_g.hair(address)
    tails = trace_many(map_f, addresses, cfg, tails=True)
    tracer_f = HairTracer(map_f, cfg=tails_config(cfg))
    offset = math.log(map_f.growth_factor / store_g.map_g.growth_factor)
    theta = ThetaMap(map_f, store_g, tails, tracer_f, offset)
    if rays_f is not None:
        theta.rebind(rays_f)
    if measure:
        theta.measure()
    return theta


def tails_config(cfg: PullbackConfig) -> PullbackConfig:
    if cfg.t_floor is None:
        return PullbackConfig(**{**cfg.to_dict(), "t_floor": TAIL_FLOOR})
    return cfg
