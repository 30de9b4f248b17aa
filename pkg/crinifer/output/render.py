"""
Deterministic SVG rendering of canonical rays, split events and endpoints
"""
import logging
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config import Config
from ..rays.canonical import CanonicalRay
from ..rays.tracer import endpoint_estimate
from ..symbolic.addresses import SignedAddress
from ..utils.models import Sign

logger = logging.getLogger(__name__)

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#ff7f0e",
)

PREAMBLE = """\
<?xml version="1.0" encoding="UTF-8" standalone="no"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">
<rect x="0" y="0" width="{width}" height="{height}" style="fill:#ffffff"/>
"""

POSTAMBLE = "</svg>\n"


class RenderSpec(BaseModel):
    """Viewport in the complex plane and drawing rules"""
    model_config = ConfigDict(extra="forbid")

    re_min: float = -4.0
    re_max: float = 4.0
    im_min: float = -4.0
    im_max: float = 4.0
    width: int = Field(800, ge=1)
    height: int = Field(800, ge=1)
    stroke_width: float = Field(1.5, gt=0)
    minus_dash: str = "6,3"
    marker_radius: float = Field(4.0, gt=0)
    legend: bool = True

    @model_validator(mode="after")
    def _check_bounds(self) -> "RenderSpec":
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("viewport must be nonempty")
        limit = Config.MAX_RESOLUTION
        if self.width > limit or self.height > limit:
            raise ValueError(f"resolution above {limit} px per side")
        return self

    def contains(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return (
            (z.real >= self.re_min) & (z.real <= self.re_max)
            & (z.imag >= self.im_min) & (z.imag <= self.im_max)
        )

    def to_pixels(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        z = np.asarray(z, dtype=complex)
        x = (z.real - self.re_min) / (self.re_max - self.re_min) * self.width
        y = (self.im_max - z.imag) / (self.im_max - self.im_min) * self.height
        return x, y


def _fmt(value: float) -> str:
    return f"{value:.3f}"


class SVGCanvas:
    """Accumulates SVG elements in call order"""

    def __init__(self, spec: RenderSpec):
        self.spec = spec
        self.commands: List[str] = []

    def polyline(self, points: np.ndarray, color: str, dash: Optional[str] = None):
        x, y = self.spec.to_pixels(points)
        coords = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(x, y))
        style = f"fill:none;stroke:{color};stroke-width:{_fmt(self.spec.stroke_width)}"
        if dash:
            style += f";stroke-dasharray:{dash}"
        self.commands.append(f'<polyline points="{coords}" style="{style}"/>')

    def marker(self, z: complex, color: str, filled: bool, title: str):
        x, y = self.spec.to_pixels([z])
        fill = color if filled else "none"
        self.commands.append(
            f'<circle cx="{_fmt(x[0])}" cy="{_fmt(y[0])}" r="{_fmt(self.spec.marker_radius)}" '
            f'style="fill:{fill};stroke:{color};stroke-width:1"><title>{title}</title></circle>'
        )

    def text(self, x: float, y: float, text: str, color: str):
        self.commands.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" fill="{color}" font-size="12" '
            f'font-family="monospace">{text}</text>'
        )

    def render(self) -> str:
        head = PREAMBLE.format(width=self.spec.width, height=self.spec.height)
        return head + "".join(c + "\n" for c in self.commands) + POSTAMBLE


def visible_runs(points: np.ndarray, spec: RenderSpec) -> List[np.ndarray]:
    """Maximal runs of consecutive vertices inside the viewport, with one vertex of margin"""
    points = np.asarray(points, dtype=complex)
    inside = spec.contains(points) & np.isfinite(points)
    runs = []
    start = None
    for i, flag in enumerate(inside):
        if flag and start is None:
            start = max(0, i - 1)
        elif not flag and start is not None:
            runs.append(points[start:i + 1])
            start = None
    if start is not None:
        runs.append(points[start:])
    return [run[np.isfinite(run)] for run in runs if run.size >= 2]


def render_svg(
    rays: Mapping[SignedAddress, CanonicalRay],
    spec: Optional[RenderSpec] = None,
    endpoint_tol: float = 1e-5,
) -> str:
    """SVG text with one polyline per signed ray, split markers and endpoint markers"""
    spec = spec or RenderSpec()
    canvas = SVGCanvas(spec)
    keys = sorted(rays, key=str)
    addresses = sorted({str(k.address) for k in keys})
    colors: Dict[str, str] = {a: PALETTE[i % len(PALETTE)] for i, a in enumerate(addresses)}
    drawn = 0

    for key in keys:
        ray = rays[key]
        color = colors[str(key.address)]
        dash = spec.minus_dash if key.sign is Sign.MINUS else None
        for run in visible_runs(ray.z, spec):
            canvas.polyline(run, color, dash)
            drawn += 1

    splits = sorted(
        {(round(e.point.real, 9), round(e.point.imag, 9)) for r in rays.values() for e in r.split_events}
    )
    for re, im in splits:
        z = complex(re, im)
        if spec.contains([z])[0]:
            canvas.marker(z, "#000000", True, f"split {z}")

    for key in keys:
        estimate = endpoint_estimate(rays[key], endpoint_tol)
        end = estimate.value if estimate.converged else rays[key].level_ends[-1]
        if spec.contains([end])[0]:
            canvas.marker(end, colors[str(key.address)], False, f"endpoint {key}")

    if spec.legend:
        for i, key in enumerate(keys):
            style = "dashed" if key.sign is Sign.MINUS else "solid"
            canvas.text(8, 16 + 14 * i, f"{key} ({style})", colors[str(key.address)])

    if drawn == 0:
        logger.warning("no ray meets the viewport; writing an empty picture")
    return canvas.render()


def write_svg(path: Path, rays: Mapping[SignedAddress, CanonicalRay], spec: Optional[RenderSpec] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_svg(rays, spec))
    return path
