"""
Unit tests for canonical rays of cosh
"""
import math

import numpy as np
import pytest

from crinifer.rays import (
    CanonicalRay,
    PathLifter,
    build_initial_configuration,
    check_agreement_interval,
    count_formula,
    signed_addresses_of,
)
from crinifer.rays.canonical import path_beyond
from crinifer.symbolic import SignedAddress, parse_address
from crinifer.utils.errors import (
    InitialConfigurationError,
    NotInConfigurationError,
    UndeterminedCountError,
)
from crinifer.utils.models import Sign


def signed(literal, sign):
    return SignedAddress(parse_address(literal), sign)


@pytest.mark.unit
class TestInitialConfiguration:
    """Test the saturated curves gamma^0"""

    def test_contains_shift_closure(self, context):
        """Test every tracked address and its shifts are present"""
        assert len(context.configuration.addresses) == 5
        assert parse_address("(R)") in context.configuration

    @pytest.mark.parametrize("literal,end", [
        ("(R)", 0j),
        ("L.(R)", 0j),
        ("R.L.(R)", 1j * math.pi),
        ("L1.L.(R)", 1j * math.pi),
        ("R1.(R)", 2j * math.pi),
    ])
    def test_saturated_ends(self, context, literal, end):
        """Test each curve is extended up to a critical point"""
        ray = context.configuration.ray(parse_address(literal))
        assert abs(ray.z[-1] - end) < 1e-9

    def test_real_curves(self, context):
        """Test gamma^0 of (R) and L.(R) are the two real half-lines"""
        right = context.configuration.ray(parse_address("(R)")).z
        left = context.configuration.ray(parse_address("L.(R)")).z
        assert np.max(np.abs(right.imag)) < 1e-9 and np.all(right.real >= -1e-12)
        assert np.max(np.abs(left.imag)) < 1e-9 and np.all(left.real <= 1e-12)

    def test_unknown_address(self, context):
        """Test lookups outside the configuration"""
        with pytest.raises(NotInConfigurationError):
            context.configuration.ray(parse_address("(L)"))

    def test_invariance_tolerance(self, cosh_map, context):
        """Test a negative tolerance rejects any configuration"""
        with pytest.raises(InitialConfigurationError):
            build_initial_configuration(
                cosh_map, context.theta, context.store_g.addresses, tol=-1.0, saturate=False
            )


@pytest.mark.unit
class TestCanonicalRays:
    """Test levels and split events"""

    def test_both_signs_built(self, context):
        """Test two signed copies per address at the requested depth"""
        assert len(context.rays) == 10
        assert all(ray.depth == 3 for ray in context.rays.values())

    def test_levels_are_nested(self, context):
        """Test each level extends the previous one"""
        ray = context.rays[signed("(R)", Sign.PLUS)]
        for n in range(ray.depth):
            shorter, longer = ray.level_curve(n), ray.level_curve(n + 1)
            assert np.array_equal(longer[: shorter.size], shorter)
        with pytest.raises(ValueError):
            ray.level_curve(ray.depth + 1)

    def test_split_at_zero(self, context):
        """Test the first lift of (R) starts at the critical point 0"""
        ray = context.rays[signed("(R)", Sign.PLUS)]
        first = ray.split_events[0]
        assert first.point == 0j
        assert first.level == 1
        assert first.local_degree == 2
        assert 1 in ray.split_levels()

    @pytest.mark.parametrize("literal,sign,end", [
        ("(R)", Sign.PLUS, 0.5j * math.pi),
        ("(R)", Sign.MINUS, -0.5j * math.pi),
        ("L.(R)", Sign.PLUS, -0.5j * math.pi),
        ("L.(R)", Sign.MINUS, 0.5j * math.pi),
    ])
    def test_level_one_ends(self, context, literal, sign, end):
        """Test the sign picks the side of the split at 0"""
        ray = context.rays[signed(literal, sign)]
        assert abs(ray.level_ends[1] - end) < 1e-6

    def test_branch_log(self, context):
        """Test the branch log records the symbol and split sign per level"""
        ray = context.rays[signed("(R)", Sign.MINUS)]
        assert ray.branch_log[0] == (1, "R", "-")
        assert [entry[0] for entry in ray.branch_log] == [1, 2, 3]

    def test_serialization(self, context):
        """Test CanonicalRay to_dict/from_dict"""
        ray = context.rays[signed("R.L.(R)", Sign.PLUS)]
        copy = CanonicalRay.from_dict(ray.to_dict())
        assert copy.signed_address == ray.signed_address
        assert copy.level_sizes == ray.level_sizes
        assert copy.split_events == ray.split_events
        assert copy.branch_log == ray.branch_log
        assert np.array_equal(copy.z, ray.z)


@pytest.mark.unit
class TestSignedAddresses:
    """Test signed_addresses_of and the counting formula"""

    @pytest.mark.parametrize("z,count", [
        (0j, 4),
        (5.0, 2),
        (0.5j * math.pi, 4),
        (1j * math.pi, 4),
    ])
    def test_counts(self, context, z, count):
        """Test the number of signed addresses through sample points"""
        assert len(signed_addresses_of(context.rays, z)) == count

    def test_real_point(self, context):
        """Test a point on the positive real axis carries both copies of (R)"""
        found = signed_addresses_of(context.rays, 5.0)
        assert found == {signed("(R)", Sign.MINUS), signed("(R)", Sign.PLUS)}

    def test_point_off_rays(self, context):
        """Test a point on no tracked ray"""
        with pytest.raises(NotInConfigurationError):
            signed_addresses_of(context.rays, 5 + 5j)

    @pytest.mark.parametrize("z,depth,count", [
        (0j, 3, 4),
        (5.0, 3, 2),
        (1j * math.pi, 3, 4),
        (0.5j * math.pi, 2, 4),
        (0.5j * math.pi, 3, 4),
    ])
    def test_count_formula(self, cosh_map, z, depth, count):
        """Test 2 times the product of local degrees along the orbit"""
        assert count_formula(cosh_map, z, depth) == count

    def test_count_undetermined(self, cosh_map):
        """Test an orbit meeting a critical point at the truncation depth"""
        with pytest.raises(UndeterminedCountError):
            count_formula(cosh_map, 0.5j * math.pi, 1)

    def test_count_depth(self, cosh_map):
        """Test the depth must be positive"""
        with pytest.raises(ValueError):
            count_formula(cosh_map, 5.0, 0)


@pytest.mark.unit
class TestAgreement:
    """Test branch-chain agreement"""

    def test_agreement_at_level_one(self, context):
        """Test rays sharing a first symbol agree and copies differ at splits"""
        report = check_agreement_interval(context.rays, 1)
        assert report.passed, report.mismatches
        assert report.compared_pairs > 0
        assert 1 in report.split_levels["(R)+"]

    def test_report_serializes(self, context):
        """Test the agreement report is plain data"""
        data = check_agreement_interval(context.rays, 2).to_dict()
        assert data["level"] == 2
        assert isinstance(data["mismatches"], list)


@pytest.mark.unit
class TestPathLifter:
    """Test lifting of polylines"""

    def test_regular_lift(self, cosh_map):
        """Test lifting a real segment away from critical values"""
        lifter = PathLifter(cosh_map)
        result = lifter.lift(2.0, [math.cosh(2.0), math.cosh(3.0)], level=0)
        assert result.points[-1] == pytest.approx(3.0)
        assert not result.events

    def test_path_beyond(self):
        """Test the part of a curve past a point on it"""
        path = path_beyond(np.array([10.0, 5.0, 0.0], dtype=complex), 7.0)
        assert np.allclose(path, [7.0, 5.0, 0.0])
