"""
Polyline geometry on sampled curves
"""
from typing import Tuple

import numpy as np
from scipy.spatial import cKDTree

_CHUNK = 512


def _segment_distances(points: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """Distance from each point to each segment; shape (len(points), len(starts))"""
    direction = ends - starts
    length2 = np.abs(direction) ** 2
    offset = points[:, None] - starts[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.real(np.conj(direction)[None, :] * offset) / length2[None, :]
    u = np.where(length2[None, :] > 0, np.clip(u, 0.0, 1.0), 0.0)
    closest = starts[None, :] + u * direction[None, :]
    return np.abs(points[:, None] - closest)


def distance_to_polyline(points, polyline) -> np.ndarray:
    """Exact Euclidean distance from points to a polyline (brute force)"""
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    polyline = np.atleast_1d(np.asarray(polyline, dtype=complex))
    if polyline.size == 1:
        return np.abs(points - polyline[0])
    starts, ends = polyline[:-1], polyline[1:]
    result = np.empty(points.size)
    for first in range(0, points.size, _CHUNK):
        block = points[first:first + _CHUNK]
        result[first:first + _CHUNK] = _segment_distances(block, starts, ends).min(axis=1)
    return result


def project_onto_polyline(point: complex, polyline) -> Tuple[int, float, complex]:
    """Nearest point of a polyline as (segment index, fraction along it, point)"""
    polyline = np.atleast_1d(np.asarray(polyline, dtype=complex))
    if polyline.size == 1:
        return 0, 0.0, complex(polyline[0])
    starts, ends = polyline[:-1], polyline[1:]
    direction = ends - starts
    length2 = np.abs(direction) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.real(np.conj(direction) * (point - starts)) / length2
    u = np.where(length2 > 0, np.clip(u, 0.0, 1.0), 0.0)
    closest = starts + u * direction
    index = int(np.argmin(np.abs(point - closest)))
    return index, float(u[index]), complex(closest[index])


class PolylineIndex:
    """Nearest-segment queries on a long polyline via a vertex k-d tree"""

    def __init__(self, polyline, neighbours: int = 8):
        self.polyline = np.atleast_1d(np.asarray(polyline, dtype=complex))
        self.neighbours = min(neighbours, self.polyline.size)
        self._tree = cKDTree(np.column_stack([self.polyline.real, self.polyline.imag]))

    def distance(self, points) -> np.ndarray:
        points = np.atleast_1d(np.asarray(points, dtype=complex))
        if self.polyline.size < 2:
            return np.abs(points - self.polyline[0])
        _, nearest = self._tree.query(
            np.column_stack([points.real, points.imag]), k=self.neighbours
        )
        nearest = np.atleast_2d(nearest).reshape(points.size, -1)
        last = self.polyline.size - 1
        # segments touching each nearby vertex
        seg_a = np.clip(nearest - 1, 0, last - 1)
        seg_b = np.clip(nearest, 0, last - 1)
        segments = np.concatenate([seg_a, seg_b], axis=1)
        starts = self.polyline[segments]
        ends = self.polyline[segments + 1]
        direction = ends - starts
        length2 = np.abs(direction) ** 2
        offset = points[:, None] - starts
        with np.errstate(invalid="ignore", divide="ignore"):
            u = np.real(np.conj(direction) * offset) / length2
        u = np.where(length2 > 0, np.clip(u, 0.0, 1.0), 0.0)
        return np.abs(offset - u * direction).min(axis=1)


def circle_crossing(polyline, radius: float) -> complex:
    """First point, walking from the far end, where the polyline meets |z| = radius

    The polyline is ordered from the far end inward. Returns nan when the
    curve never reaches the circle.
    """
    polyline = np.asarray(polyline, dtype=complex)
    moduli = np.abs(polyline)
    outside = moduli >= radius
    for i in range(polyline.size - 1):
        if outside[i] and not outside[i + 1]:
            r0, r1 = moduli[i], moduli[i + 1]
            fraction = (r0 - radius) / (r0 - r1)
            return complex(polyline[i] + fraction * (polyline[i + 1] - polyline[i]))
    return complex(np.nan, np.nan)


def polyline_length(polyline) -> np.ndarray:
    """Cumulative arc length along a polyline, starting at 0"""
    polyline = np.asarray(polyline, dtype=complex)
    if polyline.size == 0:
        return np.zeros(0)
    return np.concatenate([[0.0], np.cumsum(np.abs(np.diff(polyline)))])


def diameter(points) -> float:
    points = np.asarray(points, dtype=complex)
    if points.size < 2:
        return 0.0
    return float(np.max(np.abs(points[:, None] - points[None, :])))
