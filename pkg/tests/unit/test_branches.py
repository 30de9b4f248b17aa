"""
Unit tests for closed-form inverse branches
"""
import math

import numpy as np
import pytest

from crinifer.maps import BranchGeometry, make_map
from crinifer.maps.branches import inverse_growth, straight_line_growth
from crinifer.utils.errors import BranchCutError, BranchDomainError


@pytest.fixture
def geometry(cosh_map):
    """Branch geometry of cosh with delta along the negative imaginary axis"""
    return BranchGeometry(cosh_map, -math.pi / 2)


@pytest.mark.unit
class TestBranchGeometry:
    """Test inverse branches of cosh"""

    def test_principal_branches(self, geometry):
        """Test R and L branches of the real preimages"""
        w = math.cosh(2.0)
        assert complex(geometry.inverse("R", 0, w)) == pytest.approx(2.0)
        assert complex(geometry.inverse("L", 0, w)) == pytest.approx(-2.0)
        assert complex(geometry.inverse("R", 1, w)) == pytest.approx(2.0 + 2j * math.pi)

    @pytest.mark.parametrize("side", ["R", "L"])
    @pytest.mark.parametrize("k", [-2, 0, 3])
    def test_inverse_is_right_inverse(self, cosh_map, geometry, side, k):
        """Test f(branch(w)) = w and branch_index recovers the branch"""
        w = 5.0 + 3.0j
        z = complex(geometry.inverse(side, k, w))
        assert abs(cosh_map.eval(z) - w) < 1e-12 * abs(w)
        assert geometry.branch_index(z) == (side, k)

    def test_vectorized(self, cosh_map, geometry):
        """Test inverse on an array"""
        ws = np.array([4.0, 10.0 + 1j, -7.0 + 2j])
        zs = geometry.inverse("R", 0, ws)
        assert np.allclose(cosh_map.eval_array(zs), ws)

    def test_mp_agrees_with_double(self, geometry):
        """Test the mpmath branch against the double one"""
        w = 3.0 - 4.0j
        assert complex(geometry.inverse_mp("L", 1, w)) == pytest.approx(
            complex(geometry.inverse("L", 1, w))
        )

    def test_side_of(self, geometry):
        """Test the separating line has no side"""
        assert geometry.side_of(1.0 + 1j) == "R"
        assert geometry.side_of(-1.0) == "L"
        assert geometry.side_of(2j) is None

    def test_straddle_detected(self, geometry):
        """Test consecutive samples across the cut raise"""
        with pytest.raises(BranchCutError):
            geometry.check_no_straddle(np.array([-0.1 - 10j, 0.1 - 10j]), level=0)

    def test_no_straddle_on_one_side(self, geometry):
        """Test a curve away from the cut passes"""
        geometry.check_no_straddle(np.array([10.0, 11.0 + 1j, 12.0 + 2j]))

    def test_preimage_candidates(self, geometry):
        """Test the candidate set contains the nearby preimage"""
        candidates = geometry.preimage_candidates(math.cosh(2.0), near=2.1)
        assert np.min(np.abs(candidates - 2.0)) < 1e-12

    def test_exp_asymptotic_value(self):
        """Test that 0 has no preimage under exp"""
        geometry = BranchGeometry(make_map("scaled-exp", 0.2), math.pi)
        with pytest.raises(BranchDomainError):
            geometry.preimage_candidates(0.0, near=1.0)

    def test_sin_branches(self):
        """Test inverse branches of a scaled sine"""
        f = make_map("scaled-sin", 0.5)
        geometry = BranchGeometry(f, math.pi)
        for side in ("U", "D"):
            z = complex(geometry.inverse(side, 0, 6.0 + 1j))
            assert abs(f.eval(z) - (6.0 + 1j)) < 1e-12 * 7


@pytest.mark.unit
class TestGrowth:
    """Test the straight-line growth and its inverse"""

    def test_inverse_growth(self, model_g):
        """Test inverse_growth undoes straight_line_growth"""
        t = np.array([4.6, 6.0, 12.0])
        assert np.allclose(inverse_growth(model_g, straight_line_growth(model_g, t)), t)
