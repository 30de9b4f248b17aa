"""
Helper functions for crinifer
"""
import math
import re
from typing import List, Sequence

TWO_PI = 2.0 * math.pi


def principal_angle(angle: float) -> float:
    """Reduce an angle to (-pi, pi]"""
    reduced = math.remainder(angle, TWO_PI)
    if reduced <= -math.pi:
        reduced += TWO_PI
    return reduced


def wrap_to_interval(angle: float, center: float) -> float:
    """Reduce an angle to (center - pi, center + pi]"""
    return center + principal_angle(angle - center)


def ccw_offset(angle: float, origin: float) -> float:
    """Counter-clockwise angle from origin to angle, in [0, 2pi)"""
    return (angle - origin) % TWO_PI


def is_cyclically_ordered(a, b, c) -> bool:
    """True iff b lies strictly between a and c going in the positive direction

    Arguments are mutually comparable keys; the relation is the cyclic order
    obtained by closing up the linear order on keys.
    """
    return (a < b < c) or (b < c < a) or (c < a < b)


def slugify(text: str) -> str:
    """File-system safe slug for address literals"""
    slug = text.replace("(", "p").replace(")", "")
    slug = re.sub(r"-", "m", slug)
    slug = re.sub(r"[^A-Za-z0-9_]+", "_", slug)
    return slug.strip("_") or "empty"


def downsample_indices(length: int, max_points: int, keep: Sequence[int] = ()) -> List[int]:
    """Evenly spaced indices into a sequence, always keeping both ends and `keep`"""
    if length <= max_points:
        return list(range(length))
    step = (length - 1) / (max_points - 1)
    chosen = {int(round(i * step)) for i in range(max_points)}
    chosen.update(k for k in keep if 0 <= k < length)
    chosen.update((0, length - 1))
    return sorted(chosen)
