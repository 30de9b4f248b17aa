"""
Unit tests for hair tracing
"""
import math

import numpy as np
import pytest

from crinifer.maps import make_map
from crinifer.rays import (
    HairTracer,
    PullbackConfig,
    RayTail,
    backward_contraction,
    endpoint_estimate,
    hair_points,
    inverse_branch,
    trace_many,
    trace_ray_disjoint,
    trace_ray_tail,
    verify_ray_dynamics,
)
from crinifer.symbolic import Symbol, default_domain_spec, parse_address
from crinifer.utils.errors import AlphabetWindowError, BranchDomainError, PrecisionError

# repelling fixed point of 0.1 cosh on the positive real axis
G_ENDPOINT = 4.4996


@pytest.fixture(scope="module")
def real_hair(model_g):
    """The hair of 0.1 cosh with address (R)"""
    return trace_ray_disjoint(model_g, parse_address("(R)"), PullbackConfig(depth=20))


@pytest.mark.unit
class TestPullbackConfig:
    """Test trace settings"""

    def test_defaults(self):
        """Test the default settings"""
        cfg = PullbackConfig()
        assert cfg.depth == 20
        assert cfg.to_dict()["t_floor"] is None

    def test_invalid(self):
        """Test validation of settings"""
        with pytest.raises(ValueError):
            PullbackConfig(depth=-1)
        with pytest.raises(ValueError):
            PullbackConfig(samples=0)
        with pytest.raises(ValueError):
            PullbackConfig(start_radius=8.0, t_max=8.0)

    def test_with_depth(self):
        """Test copying with another depth"""
        assert PullbackConfig().with_depth(3).depth == 3


@pytest.mark.unit
class TestHairTracer:
    """Test the closed-form pullback tracer"""

    def test_double_precision_depth_limit(self, model_g):
        """Test deep traces need extended precision"""
        with pytest.raises(PrecisionError):
            HairTracer(model_g, cfg=PullbackConfig(depth=41))

    def test_extended_precision_allows_depth(self):
        """Test the same depth in extended precision"""
        g = make_map("scaled-cosh", 0.1, precision=30)
        tracer = HairTracer(g, cfg=PullbackConfig(depth=41))
        assert tracer.extended

    def test_start_radius_outside_disc(self, cosh_map):
        """Test the start radius must exceed the disc radius"""
        with pytest.raises(ValueError):
            HairTracer(cosh_map, cfg=PullbackConfig(start_radius=2.0))

    def test_symbol_window(self, model_g):
        """Test addresses outside the symbol window"""
        tracer = HairTracer(model_g)
        with pytest.raises(AlphabetWindowError):
            tracer.symbols_for(parse_address("(R99)"), 3)

    def test_parameter_floors_decrease(self, model_g):
        """Test t_min(m) decreases toward the fixed point of the growth"""
        floors = HairTracer(model_g).parameter_floors(20)
        assert floors[0] == 8.0
        assert all(a > b for a, b in zip(floors[:-1], floors[1:]))
        assert floors[-1] == pytest.approx(G_ENDPOINT, abs=1e-2)

    def test_real_hair_is_real(self, real_hair):
        """Test the hair (R) lies on the positive real axis"""
        assert np.max(np.abs(real_hair.z.imag)) < 1e-9
        assert np.all(real_hair.z.real > 0)

    def test_parameters_decrease(self, real_hair):
        """Test t is strictly decreasing along the trace"""
        assert np.all(np.diff(real_hair.t) < 0)
        assert len(real_hair) == real_hair.t.size

    def test_real_hair_endpoint(self, real_hair):
        """Test the hair ends at the repelling fixed point"""
        assert real_hair.z[-1].real == pytest.approx(G_ENDPOINT, abs=1e-2)
        estimate = endpoint_estimate(real_hair, 1e-6)
        assert estimate.converged
        assert estimate.value.real == pytest.approx(G_ENDPOINT, abs=1e-2)

    def test_hair_points_near_parameter(self, model_g):
        """Test z(t) is close to t far out on (R)"""
        z = hair_points(model_g, parse_address("(R)"), [10.0, 20.0], depth=8)
        assert np.allclose(z, [10.0, 20.0], atol=1e-3)

    def test_point_at_outside_range(self, real_hair):
        """Test interpolation refuses parameters outside the trace"""
        with pytest.raises(ValueError):
            real_hair.point_at(real_hair.t[0] + 1.0)

    def test_serialization(self, real_hair):
        """Test RayTail to_dict/from_dict"""
        copy = RayTail.from_dict(real_hair.to_dict())
        assert copy.address == real_hair.address
        assert np.array_equal(copy.t, real_hair.t)
        assert np.array_equal(copy.z, real_hair.z)
        assert copy.level_ends == real_hair.level_ends

    def test_trace_many_keeps_order(self, model_g):
        """Test parallel traces come back in input order"""
        addresses = [parse_address(a) for a in ("L.(R)", "(R)", "R.L.(R)")]
        traces = trace_many(model_g, addresses, PullbackConfig(depth=4))
        assert list(traces) == addresses
        assert all(traces[a].address == a for a in addresses)

    def test_tail_floor(self, cosh_map):
        """Test ray tails of a non-disjoint-type map stop at the tail floor"""
        tail = trace_ray_tail(cosh_map, parse_address("(R)"), PullbackConfig(depth=6))
        assert tail.t[-1] >= 4.0
        assert np.max(np.abs(tail.z.imag)) < 1e-9


@pytest.mark.unit
class TestRayDynamics:
    """Test forward invariance of traced hairs"""

    def test_hair_maps_into_itself(self, model_g, real_hair):
        """Test g maps the hair (R) into itself"""
        report = verify_ray_dynamics(model_g, real_hair, real_hair)
        assert report.passed
        assert report.escape_increasing
        assert report.checked > 0

    def test_hair_maps_into_shift(self, model_store):
        """Test g maps each tracked hair into the hair of its shift"""
        for address, report in model_store.validate().items():
            assert report.passed, f"{address}: {report.reason}"

    def test_wrong_shift_fails(self, model_g, model_store):
        """Test the check notices a hair paired with the wrong shift"""
        hair = model_store.hair(parse_address("R.L.(R)"))
        wrong = model_store.hair(parse_address("R.L.(R)"))
        assert not verify_ray_dynamics(model_g, hair, wrong).passed

    def test_backward_contraction(self, model_g):
        """Test diameters of pulled-back seed arcs shrink"""
        diameters, ratios = backward_contraction(model_g, parse_address("(R.L)"), levels=6)
        assert len(diameters) == 7
        assert all(r < 1 for r in ratios)


@pytest.mark.unit
class TestInverseBranch:
    """Test single inverse branches"""

    def test_branch_r(self, cosh_map):
        """Test the R branch at a real point"""
        assert inverse_branch(cosh_map, Symbol("R"), math.cosh(2.0)) == pytest.approx(2.0)

    def test_branch_with_domain_spec(self, cosh_map):
        """Test that points of D are refused when a spec is given"""
        with pytest.raises(BranchDomainError):
            inverse_branch(cosh_map, Symbol("R"), 1.5, default_domain_spec(cosh_map))

    def test_exp_asymptotic_value(self):
        """Test the omitted value of exp"""
        with pytest.raises(BranchDomainError):
            inverse_branch(make_map("scaled-exp", 0.2), Symbol("", 0), 0.0)
