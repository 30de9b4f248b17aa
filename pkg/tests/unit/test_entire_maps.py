"""
Unit tests for entire map families
"""
import cmath
import math

import pytest

from crinifer.maps import (
    EntireMap,
    Family,
    critical_points_in_disc,
    disjoint_type_check,
    format_map_spec,
    local_degree,
    make_map,
    parse_map_spec,
    separation_check,
    singular_data,
)
from crinifer.utils.errors import EscapedMagnitudeError, MapSpecError


@pytest.mark.unit
class TestMapSpec:
    """Test map specification strings"""

    def test_parse_cosh(self):
        """Test the plain cosh family"""
        f = parse_map_spec("cosh")
        assert f.family is Family.COSH
        assert f.scale == 1

    def test_parse_scaled(self):
        """Test a scaled family with a real lambda"""
        g = parse_map_spec("scaled-cosh:lambda=0.1")
        assert g.family is Family.SCALED_COSH
        assert g.scale == pytest.approx(0.1)

    def test_parse_complex_lambda(self):
        """Test the re/im form of lambda"""
        f = parse_map_spec("scaled-exp:lambda=0.2re+0.5im")
        assert f.scale == complex(0.2, 0.5)

    def test_format_round_trip(self):
        """Test format_map_spec inverts parse_map_spec"""
        for text in ("cosh", "scaled-cosh:lambda=0.1", "scaled-sin:lambda=0.3re-0.1im"):
            f = parse_map_spec(text)
            assert parse_map_spec(format_map_spec(f)) == f

    def test_precision_parameter(self):
        """Test extended precision in the map string"""
        f = parse_map_spec("scaled-cosh:lambda=0.1,precision=40")
        assert f.precision == 40
        assert "precision=40" in f.spec

    @pytest.mark.parametrize("text", [
        "",
        "tanh",
        "cosh:lambda=2",
        "scaled-cosh",
        "scaled-cosh:lambda=abc",
        "scaled-cosh:lambda=0.1,mu=2",
        "scaled-cosh:lambda",
    ])
    def test_invalid_specs(self, text):
        """Test that malformed specs are rejected"""
        with pytest.raises(MapSpecError):
            parse_map_spec(text)

    def test_cosh_refuses_scale(self):
        """Test that Family COSH takes no scale"""
        with pytest.raises(MapSpecError):
            EntireMap(Family.COSH, 2.0)

    def test_zero_scale(self):
        """Test that lambda = 0 is rejected"""
        with pytest.raises(MapSpecError):
            make_map("scaled-exp", 0.0)


@pytest.mark.unit
class TestEvaluation:
    """Test evaluation and derivatives"""

    def test_eval_cosh(self, cosh_map):
        """Test cosh at a few points"""
        assert cosh_map.eval(0) == 1
        assert cosh_map.eval(1j * math.pi) == pytest.approx(-1)

    def test_eval_array_matches_scalar(self, model_g):
        """Test the vectorized form"""
        zs = [0.5, 2 + 1j, -3 - 0.5j]
        values = model_g.eval_array(zs)
        for z, w in zip(zs, values):
            assert abs(model_g.eval(z) - w) < 1e-14

    def test_overflow_is_reported(self, cosh_map):
        """Test that escaping values raise instead of returning inf"""
        with pytest.raises(EscapedMagnitudeError):
            cosh_map.eval(1000)

    def test_derivatives(self, cosh_map):
        """Test derivatives of cosh alternate between sinh and cosh"""
        z = 0.3 + 0.2j
        assert cosh_map.derivative(z) == pytest.approx(cmath.sinh(z))
        assert cosh_map.derivative(z, 2) == pytest.approx(cmath.cosh(z))

    def test_log_modulus_asymptotic(self, cosh_map):
        """Test log|f| far beyond the double range"""
        assert cosh_map.log_modulus(1000) == pytest.approx(1000 - math.log(2))

    def test_growth_factor(self, cosh_map, model_g):
        """Test |f| ~ growth * exp(|Re z|)"""
        assert cosh_map.growth_factor == 0.5
        assert model_g.growth_factor == pytest.approx(0.05)
        assert make_map("scaled-exp", 0.2).growth_factor == pytest.approx(0.2)


@pytest.mark.unit
class TestSingularData:
    """Test critical points, singular values and postsingular orbits"""

    def test_cosh_singular_values(self, cosh_map):
        """Test S(cosh) = {-1, 1}"""
        values = sorted(cosh_map.singular_values(), key=lambda v: v.real)
        assert values == [-1, 1]
        assert cosh_map.asymptotic_values() == []

    def test_cosh_critical_points(self, cosh_map):
        """Test critical points k pi i of local degree 2"""
        points = critical_points_in_disc(cosh_map, 7.0)
        assert len(points) == 5
        for c in points:
            assert abs(c.real) < 1e-12
            assert abs(c.imag / math.pi - round(c.imag / math.pi)) < 1e-12
            assert abs(cosh_map.derivative(c)) < 1e-12
            assert local_degree(cosh_map, c) == 2

    def test_regular_point_degree(self, cosh_map):
        """Test local degree 1 away from critical points"""
        assert local_degree(cosh_map, 1.0) == 1

    def test_exp_has_asymptotic_value(self):
        """Test that scaled exp has 0 as its only singular value"""
        f = make_map("scaled-exp", 0.2)
        assert f.critical_values() == []
        assert f.singular_values() == [0j]
        assert critical_points_in_disc(f, 10.0) == []

    def test_postsingular_sample(self, cosh_map):
        """Test the truncated postsingular set of cosh"""
        data = singular_data(cosh_map, 3)
        sample = data.postsingular_sample
        assert any(abs(p - 1) < 1e-12 for p in sample)
        assert any(abs(p + 1) < 1e-12 for p in sample)
        assert any(abs(p - math.cosh(1)) < 1e-12 for p in sample)

    def test_orbit_escapes(self, cosh_map):
        """Test that the orbit of 1 under cosh escapes"""
        record = cosh_map.orbit(1.0, 10)
        assert record.escaped
        assert record.escape_index is not None


@pytest.mark.unit
class TestDisjointType:
    """Test the disjoint-type check"""

    def test_model_is_disjoint_type(self, model_g):
        """Test 0.1 cosh has an attracting fixed point near 0.1005"""
        report = disjoint_type_check(model_g)
        assert report.passed
        assert report.fixed_point == pytest.approx(0.10050, abs=1e-4)
        assert report.multiplier < 0.02
        assert report.iterations <= 100
        assert abs(model_g.eval(report.fixed_point) - report.fixed_point) < 1e-9

    def test_cosh_is_not_disjoint_type(self, cosh_map):
        """Test that cosh itself fails"""
        report = disjoint_type_check(cosh_map)
        assert not report.passed
        assert report.reason

    def test_report_serializes(self, model_g):
        """Test DisjointTypeReport serialization"""
        data = disjoint_type_check(model_g).to_dict()
        assert data["passed"] is True
        assert len(data["fixed_point"]) == 2


@pytest.mark.unit
class TestSeparation:
    """Test relative separation of postsingular Julia points"""

    def test_cosh_separated(self, cosh_map):
        """Test cosh passes at epsilon 0.3"""
        report = separation_check(cosh_map, 0.3, 6)
        assert report.passed
        assert report.ratio >= 0.3

    def test_witness_on_failure(self, cosh_map):
        """Test the closest pair is reported when the check fails"""
        report = separation_check(cosh_map, 3.0, 2)
        assert not report.passed
        pair = sorted(report.witness, key=lambda z: z.real)
        assert pair[0] == pytest.approx(1.0)
        assert pair[1] == pytest.approx(math.cosh(1.0))

    @pytest.mark.parametrize("epsilon,depth", [(0.5, 6), (3.0, 2)])
    def test_minimizing_pair_is_one_and_cosh_one(self, cosh_map, epsilon, depth):
        """Test the reported pair is the closest one, (1, cosh 1), not (-1, 1)"""
        report = separation_check(cosh_map, epsilon, depth)
        assert not report.passed
        pair = sorted(report.witness, key=lambda z: z.real)
        assert pair[0] == pytest.approx(1.0)
        assert pair[1] == pytest.approx(math.cosh(1.0))
        assert report.ratio == pytest.approx(1.0 - 1.0 / math.cosh(1.0))

    def test_negative_one_is_in_the_sample(self, cosh_map):
        """Test both singular values contribute points"""
        report = separation_check(cosh_map, 0.3, 2)
        assert report.sample_size == 3

    def test_monotone_in_epsilon(self, cosh_map):
        """Test the pass threshold sits at the minimal ratio"""
        assert separation_check(cosh_map, 0.35, 2).passed
        assert not separation_check(cosh_map, 0.36, 2).passed

    def test_depth_must_be_positive(self, cosh_map):
        """Test depth validation"""
        with pytest.raises(ValueError):
            separation_check(cosh_map, 0.3, 0)
