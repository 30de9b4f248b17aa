"""
Closed-form inverse branches of the supported families

Every family is handled in a log coordinate in which a fundamental domain
reads sigma * L + 2 pi i k, where L is a logarithm with its cut along the
preimage of delta:

    cosh:  coordinate z,               L = log(zeta(w / lambda))
    sin:   coordinate u = i(z - pi/2), L = log(zeta(w / lambda))
    exp:   coordinate z,               L = log(w / lambda)

with zeta(u) = u + sqrt(u - 1) sqrt(u + 1), the root of zeta + 1/zeta = 2u
with |zeta| >= 1.
"""
import cmath
import math
from dataclasses import dataclass
from typing import Any, Optional, Tuple

import mpmath
import numpy as np

from ..utils.errors import BranchCutError, BranchDomainError
from ..utils.helpers import principal_angle, wrap_to_interval
from .entire_maps import EntireMap

TWO_PI = 2.0 * math.pi

SIDES = {"cosh": ("R", "L"), "sin": ("D", "U"), "exp": ("",)}
SIDE_SIGN = {"R": 1, "L": -1, "D": 1, "U": -1, "": 1}
# Direction in which the tracts of a side go to infinity
SIDE_DIRECTION = {"R": 0.0, "L": math.pi, "U": math.pi / 2, "D": -math.pi / 2, "": 0.0}


@dataclass(frozen=True)
class BranchGeometry:
    """Log-cut data of a map for a given direction of delta"""
    map_f: EntireMap
    delta_direction: float

    @property
    def cut_angle(self) -> float:
        """Argument of zeta (or w / lambda) along the preimage of delta"""
        return principal_angle(self.delta_direction - cmath.phase(self.map_f.scale))

    @property
    def center(self) -> float:
        """Middle of the argument interval (center - pi, center + pi]"""
        return principal_angle(self.cut_angle + math.pi)

    @property
    def step(self) -> complex:
        """Period of the fundamental domains in the z-plane"""
        if self.map_f.kind == "sin":
            return complex(TWO_PI, 0.0)
        return complex(0.0, TWO_PI)

    # -- coordinates ------------------------------------------------------

    def to_log(self, z):
        """z -> log coordinate (works on scalars and numpy arrays)"""
        if self.map_f.kind == "sin":
            return 1j * (z - math.pi / 2)
        return z

    def from_log(self, coord):
        if self.map_f.kind == "sin":
            return math.pi / 2 - 1j * coord
        return coord

    def side_of(self, z: complex) -> Optional[str]:
        """Side of the z-plane containing z; None on the separating line"""
        kind = self.map_f.kind
        if kind == "exp":
            return ""
        if kind == "cosh":
            if z.real > 0:
                return "R"
            return "L" if z.real < 0 else None
        if z.imag < 0:
            return "D"
        return "U" if z.imag > 0 else None

    # -- logarithms -------------------------------------------------------

    def _zeta(self, u):
        if self.map_f.kind == "exp":
            return u
        return u + np.sqrt(u - 1) * np.sqrt(u + 1)

    def log_cut(self, x):
        """Logarithm with arguments in (center - pi, center + pi]"""
        x = np.asarray(x, dtype=complex)
        rotation = cmath.exp(-1j * self.center)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(x)) + 1j * (self.center + np.angle(x * rotation))

    def log_cut_mp(self, x: Any) -> Any:
        rotation = mpmath.expj(-self.center)
        return mpmath.log(abs(x)) + 1j * (self.center + mpmath.arg(x * rotation))

    # -- inverse branches -------------------------------------------------

    def inverse(self, side: str, k: int, w):
        """Branch (side, k) of f^{-1}, vectorized over w"""
        w = np.asarray(w, dtype=complex)
        u = w / self.map_f.scale
        logs = self.log_cut(self._zeta(u))
        coord = SIDE_SIGN[side] * logs + 1j * TWO_PI * k
        return self.from_log(coord)

    def inverse_mp(self, side: str, k: int, w: Any) -> Any:
        """Branch (side, k) of f^{-1} in mpmath"""
        scale = mpmath.mpc(self.map_f.scale.real, self.map_f.scale.imag)
        u = mpmath.mpmathify(w) / scale
        if self.map_f.kind == "exp":
            zeta = u
        else:
            zeta = u + mpmath.sqrt(u - 1) * mpmath.sqrt(u + 1)
        coord = SIDE_SIGN[side] * self.log_cut_mp(zeta) + 2j * mpmath.pi * k
        if self.map_f.kind == "sin":
            return mpmath.pi / 2 - 1j * coord
        return coord

    def check_no_straddle(self, w: np.ndarray, level: Optional[int] = None):
        """Raise when consecutive samples of a curve lie on both sides of the cut"""
        w = np.asarray(w, dtype=complex)
        if w.size < 2:
            return
        zeta = self._zeta(w / self.map_f.scale)
        angles = np.angle(zeta * cmath.exp(-1j * self.center))
        jumps = np.abs(np.diff(angles)) > math.pi
        if np.any(jumps):
            index = int(np.argmax(jumps))
            raise BranchCutError(complex(w[index + 1]), level)

    def branch_index(self, z: complex) -> Optional[Tuple[str, int]]:
        """(side, k) of the fundamental domain whose closed form produces z"""
        z = complex(z)
        side = self.side_of(z)
        if side is None:
            return None
        sigma = SIDE_SIGN[side]
        y = sigma * complex(self.to_log(z)).imag
        offset = y - self.center
        k = sigma * (offset - principal_angle(offset)) / TWO_PI
        return side, int(round(k))

    def branch_index_mp(self, z: Any) -> Optional[Tuple[str, int]]:
        """branch_index for mpmath values too large for doubles"""
        x, y_raw = mpmath.re(z), mpmath.im(z)
        kind = self.map_f.kind
        if kind == "exp":
            side = ""
        elif kind == "cosh":
            side = "R" if x > 0 else ("L" if x < 0 else None)
        else:
            side = "D" if y_raw < 0 else ("U" if y_raw > 0 else None)
        if side is None:
            return None
        sigma = SIDE_SIGN[side]
        coord_imag = (x - mpmath.pi / 2) if kind == "sin" else y_raw
        offset = sigma * coord_imag - self.center
        reduced = offset - 2 * mpmath.pi * mpmath.nint(offset / (2 * mpmath.pi))
        k = sigma * (offset - reduced) / (2 * mpmath.pi)
        return side, int(mpmath.nint(k))

    # -- seeds ------------------------------------------------------------

    def seed(self, side: str, k: int, target_direction: float, log_modulus):
        """Point of domain (side, k) whose image points toward target_direction

        The image has modulus about growth_factor * exp(log_modulus).
        """
        theta = wrap_to_interval(target_direction - cmath.phase(self.map_f.scale), self.center)
        log_modulus = np.asarray(log_modulus, dtype=float)
        coord = SIDE_SIGN[side] * (log_modulus + 1j * theta) + 1j * TWO_PI * k
        return self.from_log(coord)

    def seed_mp(self, side: str, k: int, target_direction: float, log_modulus: Any) -> Any:
        theta = wrap_to_interval(target_direction - cmath.phase(self.map_f.scale), self.center)
        coord = SIDE_SIGN[side] * (mpmath.mpf(log_modulus) + 1j * mpmath.mpf(theta))
        coord += 2j * mpmath.pi * k
        if self.map_f.kind == "sin":
            return mpmath.pi / 2 - 1j * coord
        return coord

    # -- unrestricted preimages -------------------------------------------

    def preimage_candidates(self, w: complex, near: complex, spread: int = 1) -> np.ndarray:
        """All preimages of w in the period strips around `near`"""
        u = complex(w) / self.map_f.scale
        kind = self.map_f.kind
        if kind == "exp":
            if u == 0:
                raise BranchDomainError(complex(w), "asymptotic value has no preimage")
            bases = [cmath.log(u)]
        else:
            base = complex(np.arccosh(np.complex128(u)))
            bases = [base, -base]
        near_coord = complex(self.to_log(complex(near)))
        candidates = []
        for base in bases:
            k0 = int(round((near_coord.imag - base.imag) / TWO_PI))
            for k in range(k0 - spread, k0 + spread + 1):
                candidates.append(base + 1j * TWO_PI * k)
        return np.asarray(self.from_log(np.asarray(candidates)), dtype=complex)


def straight_line_growth(map_f: EntireMap, t):
    """Modulus reached by one step from log-modulus t along a tract"""
    with np.errstate(over="ignore"):
        return map_f.growth_factor * np.exp(t)


def inverse_growth(map_f: EntireMap, y):
    """Log-modulus whose one-step image has modulus y"""
    return np.log(np.asarray(y, dtype=float) / map_f.growth_factor)
