"""
Shared plumbing for the gsketch subcommands: flag/config resolution, input loading and
plan construction.
"""
import dataclasses
import logging
from dataclasses import dataclass
from typing import List, Optional

from pydantic import ValidationError

from modules.config_loader import get_accuracy_defaults, get_compress_settings, get_sketch_settings
from modules.errors import UsageError
from modules.parsers.pointset_parser import parse_pointsets, parse_single_pointset
from modules.sketching.planner import AccuracyTarget, PlannedConfig, estimate_radius, plan
from modules.sketching.pointset import PointSet

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    """Result of a subcommand; ``message`` is what goes to stdout."""
    message: str
    success: bool = True
    exit_code: int = 0


def flag_or_config(value, section: dict, key: str):
    """CLI flags win over the merged config."""
    return section[key] if value is None else value


def _rescale(point_set: PointSet, bandwidth: Optional[float]) -> PointSet:
    if bandwidth is None:
        return point_set
    if bandwidth <= 0:
        raise UsageError(f"--bandwidth must be positive, got {bandwidth}")
    return point_set.scaled(1.0 / bandwidth)


def load_pointset(path: str, args) -> PointSet:
    return _rescale(parse_single_pointset(path, getattr(args, "format", None)), getattr(args, "bandwidth", None))


def load_pointsets(path: str, args) -> List[PointSet]:
    return [_rescale(P, getattr(args, "bandwidth", None)) for P in parse_pointsets(path, getattr(args, "format", None))]


def resolve_radius(args, point_sets: List[PointSet], variant: str) -> float:
    """--radius when given (L for gs, R for hd), else a max-norm pass over the inputs."""
    if args.radius is not None:
        return args.radius
    if not point_sets:
        raise UsageError("--radius is required when no input points are given")
    radius = max(estimate_radius(P.points, variant) for P in point_sets)
    logger.info("estimated %s radius %g from the inputs", "L-infinity" if variant == "gs" else "L2", radius)
    return radius


def accuracy_target(args, config: dict, d: int, radius: float) -> AccuracyTarget:
    defaults = get_accuracy_defaults(config)
    variant = resolve_variant(args)
    radius_key = "radius_linf" if variant == "gs" else "radius_l2"
    try:
        return AccuracyTarget(
            epsilon=flag_or_config(args.epsilon, defaults, "epsilon"),
            alpha=flag_or_config(args.alpha, defaults, "alpha"),
            delta=flag_or_config(args.delta, defaults, "delta"),
            dimension=d,
            **{radius_key: radius},
        )
    except ValidationError as e:
        raise UsageError(f"invalid accuracy target: {e.errors()[0]['loc']}: {e.errors()[0]['msg']}")


def resolve_variant(args) -> str:
    return args.variant or "gs"


def resolve_seed(args, config: dict) -> int:
    return int(flag_or_config(args.seed, get_sketch_settings(config), "seed"))


def build_plan(args, config: dict, d: int, point_sets: List[PointSet], task: str = "distance",
               n: Optional[int] = None) -> PlannedConfig:
    """PlannedConfig for the flags, the merged config and the inputs; --jl-dim and --replicas override."""
    variant = resolve_variant(args)
    radius = resolve_radius(args, point_sets, variant)
    target = accuracy_target(args, config, d, radius)
    sketch = get_sketch_settings(config)
    compress = get_compress_settings(config)
    planned = plan(target, variant, task=task, n=n, variance_constant=float(sketch["variance_constant"]),
                   c_jl=float(compress["jl_constant"]), c_med=float(compress["median_constant"]),
                   s_cap=int(sketch["s_cap"]))
    overrides = {}
    if args.jl_dim is not None:
        if args.jl_dim < 1:
            raise UsageError(f"--jl-dim must be positive, got {args.jl_dim}")
        overrides["jl_dim"] = args.jl_dim
    if args.replicas is not None:
        if args.replicas < 1 or args.replicas % 2 == 0:
            raise UsageError(f"--replicas must be a positive odd integer, got {args.replicas}")
        overrides["replicas"] = args.replicas
    return dataclasses.replace(planned, **overrides) if overrides else planned
