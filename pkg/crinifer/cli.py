#!/usr/bin/env python3
"""
Command-line driver: trace, phi, render and check
"""
import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd
from pydantic import ValidationError

from .maps.entire_maps import disjoint_type_check, parse_map_spec, separation_check
from .model.space import order_correspondence_check
from .output.persistence import RunConfig, dumps, load_store, read_manifest, save_store
from .output.render import RenderSpec, write_svg
from .rays.canonical import InitialConfiguration
from .rays.tracer import HairTracer
from .semiconj.metric import MetricSurrogate
from .semiconj.phi import build_semiconjugacy, cauchy_report, fiber_count_check
from .semiconj.theta import build_theta
from .utils.errors import CriniferError, MissingTraceError
from .utils.logger import RunLogger
from .utils.models import Sign

logger = logging.getLogger(__name__)

SEPARATION_EPSILON = 0.3
SEPARATION_DEPTH = 6
ORDER_RADIUS = 50.0


def load_config(args: argparse.Namespace) -> RunConfig:
    """Config file (if any) overridden by command-line flags"""
    base = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides: Dict[str, Any] = {}
    if args.map:
        overrides["map"] = args.map
    if args.model_lambda is not None:
        overrides["model_lambda"] = args.model_lambda
    if args.addresses:
        overrides["addresses"] = list(args.addresses)
        overrides["max_period"] = None
    if args.depth is not None:
        overrides["canonical_depth"] = args.depth
    if args.output:
        overrides["output_dir"] = args.output
    if getattr(args, "stage", None) is not None:
        overrides["stage"] = args.stage
    if not overrides:
        return base
    return RunConfig.model_validate({**base.model_dump(mode="json"), **overrides})


def print_header(title: str):
    print(f"\n{'='*60}")
    print(title)
    print(f"{'='*60}")


# -- trace --------------------------------------------------------------------

def cmd_trace(config: RunConfig, run_logger: RunLogger) -> int:
    """Trace model hairs and canonical rays and write them with a manifest"""
    map_f, map_g = config.target_map(), config.model_map()
    cfg = config.trace.pullback()
    tracer = HairTracer(map_g, cfg=cfg)
    usable, failures = [], {}
    for address in config.address_list():
        try:
            tracer.symbols_for(address, cfg.depth)
            usable.append(address)
        except CriniferError as e:
            run_logger.log_failure(f"trace {address}", e)
            failures[str(address)] = str(e)
    if not usable:
        print("❌ every address failed")
        return 1

    context = build_semiconjugacy(map_f, map_g, usable, cfg, depth=config.canonical_depth)
    for address, hair in context.store_g.hairs.items():
        run_logger.log_trace(map_g.spec, str(address), hair.depth, len(hair))
    path = save_store(
        config.output_path,
        context.store_g,
        context.rays,
        map_f,
        extra={"config": config.model_dump(mode="json"), "failures": failures},
    )

    print_header("TRACE")
    print(f"Target map: {map_f.spec}")
    print(f"Model map: {map_g.spec}")
    print(f"Hairs: {len(context.store_g.hairs)}")
    print(f"Canonical rays: {len(context.rays)} (depth {config.canonical_depth})")
    print(f"Failures: {len(failures)}")
    print(f"Manifest: {path}")
    return 0


# -- phi ----------------------------------------------------------------------

def _load_context(config: RunConfig):
    directory = config.output_path
    store, rays = load_store(directory)
    if store is None or not rays:
        raise MissingTraceError(
            f"{directory} holds no traces; run 'crinifer trace --config <file>' first"
        )
    manifest = read_manifest(directory)
    map_f = parse_map_spec(manifest["target_map"])
    configuration = InitialConfiguration(
        map_f,
        {key.address: ray.level(0) for key, ray in rays.items() if key.sign is Sign.PLUS},
    )
    theta = build_theta(map_f, store, cfg=store.cfg, measure=False).rebind(configuration)
    return map_f, store, rays, theta


def phi_sample(store, size: int):
    """Deterministic model points spread over all hairs and both copies"""
    per_hair = max(2, math.ceil(size / (2 * max(1, len(store.hairs)))))
    return store.sample_points(per_hair=per_hair)[:size]


def cmd_phi(config: RunConfig) -> int:
    """Cauchy report of the pullback stages with a stage/gap/ratio table"""
    map_f, store, rays, theta = _load_context(config)
    depth = min(ray.depth for ray in rays.values())
    if depth < config.stage:
        raise MissingTraceError(
            f"canonical rays reach depth {depth} < {config.stage}; "
            f"rerun 'crinifer trace --depth {config.stage}'"
        )
    report = cauchy_report(
        map_f, theta, store, phi_sample(store, config.sample_size), config.stage, rays,
        metric=MetricSurrogate(config.core_radius),
    )
    path = config.output_path / f"phi-{config.stage}.json"
    path.write_text(dumps(report.to_dict()))

    table = pd.DataFrame(
        {"stage": range(len(report.gaps)), "gap": report.gaps}
    )
    table["ratio"] = table["gap"].shift(1) / table["gap"]
    print_header(f"PHI STAGE {report.stage}")
    print(table.to_string(index=False))
    print(f"\nFitted ratio: {report.fitted_ratio:.6g}")
    print(f"mu estimate: {report.mu_hat:.6g}")
    print(f"Residual: {report.residual:.6g}")
    if report.incomplete:
        print(f"⚠️  incomplete: {len(report.failures)} samples failed")
    print(f"Report: {path}")
    return 0


# -- render -------------------------------------------------------------------

def cmd_render(config: RunConfig, spec: RenderSpec, out: Optional[Path] = None) -> int:
    """SVG picture of the stored canonical rays"""
    _, rays = load_store(config.output_path)
    if not rays:
        raise MissingTraceError(
            f"{config.output_path} holds no canonical rays; run 'crinifer trace' first"
        )
    path = write_svg(out or config.output_path / "rays.svg", rays, spec)
    print(f"SVG: {path}")
    return 0


# -- check --------------------------------------------------------------------

def _fiber_points(rays) -> List[complex]:
    points = sorted(
        {complex(round(e.point.real, 9), round(e.point.imag, 9)) for r in rays.values() for e in r.split_events},
        key=lambda z: (z.real, z.imag),
    )
    if points:
        return points[:4]
    first = rays[sorted(rays, key=str)[0]]
    return [first.level_ends[-1]]


def cmd_check(config: RunConfig, run_logger: RunLogger) -> int:
    """Separation, disjoint type, order correspondence and fiber counts"""
    map_f, map_g = config.target_map(), config.model_map()
    store, rays = load_store(config.output_path)
    reports = {
        "separation": separation_check(map_f, SEPARATION_EPSILON, SEPARATION_DEPTH),
        "disjoint_type": disjoint_type_check(map_g),
    }
    if store is not None:
        reports["order_correspondence"] = order_correspondence_check(store, rays, ORDER_RADIUS)
    if rays:
        for z in _fiber_points(rays):
            reports[f"fiber {z}"] = fiber_count_check(map_f, rays, z)

    print_header("CHECK")
    for name, report in reports.items():
        run_logger.log_report(name, report)
        print(f"{'PASS' if report.passed else 'FAIL'}  {name}")
    summary = {name: report.to_dict() for name, report in reports.items()}
    (config.output_path / "check.json").write_text(dumps(summary))
    return 0 if all(report.passed for report in reports.values()) else 1


# -- entry point ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crinifer",
        description="Dynamic rays, model space and pullback semiconjugacy of entire maps",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Trace hairs of 0.1 cosh and canonical rays of cosh
  crinifer trace --map cosh --model-lambda 0.1 --addresses 'R.(R)' --depth 20

  # Cauchy table of the pullback stages
  crinifer phi --config run.json --stage 12

  # Picture of the rays near the origin
  crinifer render --config run.json --viewport -4 4 -4 4

  # Run all checks
  crinifer check --config run.json
        """,
    )
    subparsers = parser.add_subparsers(dest="command", help="Command")

    def common(sub: argparse.ArgumentParser):
        sub.add_argument("--config", type=Path, help="Run configuration (JSON)")
        sub.add_argument("--map", type=str, help="Target map, e.g. 'cosh' or 'scaled-exp:lambda=0.2'")
        sub.add_argument("--model-lambda", type=float, help="Scale of the disjoint-type model")
        sub.add_argument("--addresses", nargs="+", help="Address literals such as 'R.(R)'")
        sub.add_argument("--depth", type=int, help="Canonical-ray depth")
        sub.add_argument("--output", type=str, help="Output directory")

    common(subparsers.add_parser("trace", help="Trace hairs and canonical rays"))
    phi_parser = subparsers.add_parser("phi", help="Cauchy report of the pullback stages")
    common(phi_parser)
    phi_parser.add_argument("--stage", type=int, help="Stage N (at least 3)")
    render_parser = subparsers.add_parser("render", help="Render canonical rays to SVG")
    common(render_parser)
    render_parser.add_argument(
        "--viewport", nargs=4, type=float, metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"),
        default=(-4.0, 4.0, -4.0, 4.0),
    )
    render_parser.add_argument("--size", nargs=2, type=int, metavar=("WIDTH", "HEIGHT"), default=(800, 800))
    render_parser.add_argument("--out", type=Path, help="SVG file (default: <output>/rays.svg)")
    common(subparsers.add_parser("check", help="Run the structural checks"))
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 0

    run_logger = RunLogger()
    try:
        config = load_config(args)
        if args.command == "trace":
            return cmd_trace(config, run_logger)
        if args.command == "phi":
            return cmd_phi(config)
        if args.command == "render":
            re_min, re_max, im_min, im_max = args.viewport
            spec = RenderSpec(
                re_min=re_min, re_max=re_max, im_min=im_min, im_max=im_max,
                width=args.size[0], height=args.size[1],
            )
            return cmd_render(config, spec, args.out)
        return cmd_check(config, run_logger)
    except CriniferError as e:
        run_logger.log_failure(args.command, e)
        print(f"\n❌ Error: {e}", file=sys.stderr)
        return 2
    except ValidationError as e:
        run_logger.log_failure(f"{args.command} configuration", e)
        print(f"\n❌ Invalid configuration: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
