"""
Integration tests for the cosh / 0.1 cosh pair end to end
"""
import math

import numpy as np
import pytest

from crinifer.model import build_model_store, model_map, order_correspondence_check
from crinifer.rays import CanonicalRay, PullbackConfig, count_formula, signed_addresses_of
from crinifer.semiconj import MetricSurrogate, build_theta, expansion_estimate, stage_identity_defect
from crinifer.symbolic import SignedAddress, parse_address, periodic_addresses
from crinifer.utils.errors import RangeExhaustedError
from crinifer.utils.models import Sign

STAGE = 12
SAMPLE_SIZE = 50


@pytest.fixture(scope="module")
def periodic_store(model_g):
    """Hairs of 0.1 cosh for every address of period <= 3 over R, L and R1"""
    addresses = list(periodic_addresses(["R", "L", "R1"], 3))
    return build_model_store(model_g, addresses, PullbackConfig(depth=20))


def stage_ready(store, n, size):
    """Up to `size` model points spread over those admitting n model steps"""
    ready = []
    for x in store.sample_points(per_hair=400):
        y = x
        try:
            for _ in range(n):
                y = model_map(store, y)
        except RangeExhaustedError:
            continue
        ready.append(x)
    step = max(1, len(ready) // size)
    return ready[::step][:size]


@pytest.mark.integration
@pytest.mark.slow
class TestPeriodicHairs:
    """Test hairs of many periodic addresses"""

    def test_ray_dynamics(self, periodic_store):
        """Test g maps every traced hair into the hair of its shift"""
        reports = periodic_store.validate(tol=1e-6)
        assert len(reports) >= 20
        failed = {str(a): r.reason for a, r in reports.items() if not r.passed}
        assert not failed

    def test_three_orders_agree(self, cosh_map, periodic_store):
        """Test g-hair, f-ray and signed-address orders agree on all triples"""
        theta = build_theta(cosh_map, periodic_store, measure=False)
        rays_f = {}
        for address in periodic_store.addresses:
            tail = theta.hair_image(address)
            for sign in (Sign.MINUS, Sign.PLUS):
                key = SignedAddress(address, sign)
                rays_f[key] = CanonicalRay.initial(key, tail)
        report = order_correspondence_check(periodic_store, rays_f, radius=50.0)
        assert report.passed, report.disagreements[:5]
        assert report.compared_triples == math.comb(2 * len(periodic_store.addresses), 3)


@pytest.mark.integration
class TestSplitStructure:
    """Test the four overlapping ray tails through 0"""

    def test_vertical_segments(self, cosh_map, context):
        """Test level 1 of the real rays runs up and down the imaginary axis"""
        ends = set()
        for literal in ("(R)", "L.(R)"):
            for sign in (Sign.MINUS, Sign.PLUS):
                ray = context.ray(parse_address(literal), sign)
                end = ray.level_ends[1]
                assert abs(end.real) < 1e-9
                assert abs(abs(end.imag) - math.pi / 2) < 1e-9
                assert abs(cosh_map.eval(end)) < 1e-12
                ends.add(round(end.imag, 6))
                assert any(e.point == 0j and e.local_degree == 2 for e in ray.split_events)
        assert len(ends) == 2

    @pytest.mark.parametrize("z,count", [(0j, 4), (5.0, 2), (1j * math.pi, 4)])
    def test_counts_agree(self, cosh_map, context, z, count):
        """Test the counting formula and the traced rays give the same number"""
        assert len(signed_addresses_of(context.rays, z)) == count
        assert count_formula(cosh_map, z, 3) == count


@pytest.mark.integration
class TestExpansion:
    """Test the expansion property along tracked rays"""

    def test_expansion_on_rays(self, cosh_map, context):
        """Test the surrogate metric is expanded at every sampled ray point"""
        metric = MetricSurrogate(2.0)
        points = np.unique(np.concatenate([ray.z for ray in context.rays.values()]))
        images = cosh_map.eval_array(points)
        usable = (np.abs(points) > 2 * metric.core_radius) & np.isfinite(images) & (
            np.abs(images) > 2 * metric.core_radius
        )
        sample = points[usable]
        assert sample.size >= 500
        values = np.array([expansion_estimate(cosh_map, metric, z) for z in sample])
        assert np.all(values > 1.0), sample[np.argmin(values)]


@pytest.mark.integration
@pytest.mark.slow
class TestDeepPullbacks:
    """Test Cauchy decay, the stage identity and landing at depth 12"""

    def test_cauchy_decay(self, cosh_map, deep_context):
        """Test gaps decay geometrically and the stage identity holds"""
        sample = stage_ready(deep_context.store_g, STAGE, SAMPLE_SIZE)
        assert len(sample) == SAMPLE_SIZE
        report = deep_context.cauchy(sample, STAGE)
        assert len(report.samples) >= SAMPLE_SIZE // 2, report.failures[:3]
        assert all(gap > 0 for gap in report.gaps)
        assert report.fitted_ratio > 1.0
        assert report.gaps[-1] / report.gaps[0] < 0.1
        defect = stage_identity_defect(
            report, cosh_map, deep_context.store_g, deep_context.theta, deep_context.rays
        )
        assert defect < 1e-8

    def test_landing(self, deep_context):
        """Test every tracked signed ray lands"""
        landed = []
        for key in deep_context.rays:
            report = deep_context.landing(key.address, key.sign)
            assert not report.inconclusive, report.reason
            if report.passed:
                landed.append(key)
        assert len(landed) >= 10
