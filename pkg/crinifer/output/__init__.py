"""Run configuration, trace persistence and SVG output"""
from .persistence import (
    RunConfig,
    TraceSettings,
    dumps,
    hair_filename,
    load_store,
    ray_filename,
    read_manifest,
    save_store,
    verify_manifest,
)
from .render import RenderSpec, render_svg, visible_runs, write_svg

__all__ = [
    "RenderSpec",
    "RunConfig",
    "TraceSettings",
    "dumps",
    "hair_filename",
    "load_store",
    "ray_filename",
    "read_manifest",
    "render_svg",
    "save_store",
    "verify_manifest",
    "visible_runs",
    "write_svg",
]
