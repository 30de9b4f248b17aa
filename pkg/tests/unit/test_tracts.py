"""
Unit tests for fundamental domains and itineraries
"""
import math

import pytest

from crinifer.maps import make_map
from crinifer.symbolic import (
    DomainSpec,
    Symbol,
    address_of_orbit,
    build_alphabet,
    classify_point,
    default_domain_spec,
    parse_address,
    validate_domain_spec,
)
from crinifer.utils.errors import AddressError, AlphabetWindowError, DomainSpecError


@pytest.mark.unit
class TestDomainSpec:
    """Test D and delta"""

    def test_default_spec(self, cosh_map):
        """Test the default disc and cut for cosh"""
        spec = default_domain_spec(cosh_map)
        assert spec.disc_radius == 3.0
        assert spec.delta_direction == pytest.approx(-math.pi / 2)
        validate_domain_spec(cosh_map, spec)

    def test_membership_in_w(self, cosh_map):
        """Test W excludes the disc and the cut"""
        spec = default_domain_spec(cosh_map)
        assert spec.in_w(5.0)
        assert not spec.in_w(1.0)
        assert not spec.in_w(-5j)
        assert spec.on_delta(-5j)

    def test_disc_must_contain_singular_values(self, cosh_map):
        """Test a disc that misses S(f)"""
        with pytest.raises(DomainSpecError) as info:
            validate_domain_spec(cosh_map, DomainSpec(0.5, -math.pi / 2))
        assert "singular value" in str(info.value)

    def test_delta_must_be_axis_parallel(self, cosh_map):
        """Test an oblique cut is refused"""
        with pytest.raises(DomainSpecError):
            validate_domain_spec(cosh_map, DomainSpec(3.0, 0.3))

    def test_delta_must_avoid_tracts(self, cosh_map):
        """Test a cut running inside the right tract"""
        with pytest.raises(DomainSpecError) as info:
            validate_domain_spec(cosh_map, DomainSpec(3.0, 0.0))
        assert "tract" in str(info.value)

    def test_delta_along_positive_imaginary_axis(self, cosh_map):
        """Test the upward cut is as valid as the default downward one"""
        spec = DomainSpec(3.0, math.pi / 2)
        validate_domain_spec(cosh_map, spec)
        assert spec.on_delta(5j)
        assert not spec.in_w(5j)

    def test_negative_radius(self, cosh_map):
        """Test the disc radius must be positive"""
        with pytest.raises(DomainSpecError):
            validate_domain_spec(cosh_map, DomainSpec(-1.0, -math.pi / 2))


@pytest.mark.unit
class TestAlphabet:
    """Test the materialized alphabet"""

    def test_window_size(self, cosh_alphabet):
        """Test two sides times 2 * window + 1 branches"""
        window = cosh_alphabet.window
        assert len(cosh_alphabet) == 2 * (2 * window + 1)

    def test_representatives_map_into_w(self, cosh_map, cosh_alphabet):
        """Test each representative lies in its own domain"""
        for domain in cosh_alphabet:
            assert cosh_alphabet.spec.in_w(cosh_map.eval(domain.representative))
            assert classify_point(cosh_map, cosh_alphabet, domain.representative) == domain

    def test_outside_window(self, cosh_alphabet):
        """Test symbols beyond the window"""
        with pytest.raises(AlphabetWindowError):
            cosh_alphabet.domain(Symbol("R", cosh_alphabet.window + 1))

    def test_small_window(self, cosh_map):
        """Test an explicit window"""
        assert len(build_alphabet(cosh_map, window=2)) == 10

    @pytest.mark.parametrize("family,scale", [("scaled-sin", 0.1), ("scaled-exp", 0.2)])
    def test_other_families(self, family, scale):
        """Test alphabets of the sine and exponential families"""
        alphabet = build_alphabet(make_map(family, scale), window=3)
        sides = 2 if family == "scaled-sin" else 1
        assert len(alphabet) == sides * 7


@pytest.mark.unit
class TestClassification:
    """Test classify_point and address_of_orbit"""

    def test_classify(self, cosh_map, cosh_alphabet):
        """Test points in the first few domains"""
        assert classify_point(cosh_map, cosh_alphabet, 2 + 0.1j).symbol == Symbol("R")
        assert classify_point(cosh_map, cosh_alphabet, 2 + (2 * math.pi + 0.1) * 1j).symbol == Symbol("R", 1)
        assert classify_point(cosh_map, cosh_alphabet, -2.0 + 0.1j).symbol == Symbol("L")

    def test_classify_bounded_part(self, cosh_map, cosh_alphabet):
        """Test points whose image lies in D"""
        assert classify_point(cosh_map, cosh_alphabet, 0.5) is None

    def test_classify_wrong_map(self, model_g, cosh_alphabet):
        """Test the alphabet must belong to the map"""
        with pytest.raises(ValueError):
            classify_point(model_g, cosh_alphabet, 5.0)

    def test_real_orbit(self, cosh_map, cosh_alphabet):
        """Test the itinerary of a point on the positive real axis"""
        address = address_of_orbit(cosh_map, cosh_alphabet, 5.0, 3)
        assert address == parse_address("R.R.R")

    def test_orbit_switches_to_mpmath(self, cosh_map, cosh_alphabet):
        """Test itineraries past the double range"""
        address = address_of_orbit(cosh_map, cosh_alphabet, 5.0, 4)
        assert address == parse_address("R.R.R.R")

    def test_orbit_in_disc(self, cosh_map, cosh_alphabet):
        """Test an orbit that starts inside D"""
        with pytest.raises(AddressError) as info:
            address_of_orbit(cosh_map, cosh_alphabet, 1.0, 3)
        assert info.value.index == 0
