"""
Command handler for `gsketch bench`: per-point sketch latency against d and s.
"""
import logging
import time

import numpy as np

from commands.command_support import CommandResult, flag_or_config, resolve_seed
from modules.config_loader import get_accuracy_defaults, get_sketch_settings
from modules.errors import UsageError
from modules.sketching.planner import sketch_dims
from modules.sketching.seeding import generator
from modules.sketching.sketchers import build_sketch

logger = logging.getLogger(__name__)

SUPERLINEAR_SLACK = 1.5


def _int_list(text: str):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}")
    if not values or min(values) < 1:
        raise UsageError(f"expected positive integers, got {text!r}")
    return values


def time_per_point(G, points: np.ndarray, repeats: int) -> float:
    """Best-of-``repeats`` wall time of one batch, divided by the batch size."""
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        G.apply(points)
        best = min(best, time.perf_counter() - start)
    return best / points.shape[0]


def growth_is_superlinear(d_small: int, t_small: float, d_large: int, t_large: float) -> bool:
    return t_large > SUPERLINEAR_SLACK * (d_large / d_small) * t_small


def execute(args, config):
    epsilon = float(flag_or_config(args.epsilon, get_accuracy_defaults(config), "epsilon"))
    variance_constant = float(get_sketch_settings(config)["variance_constant"])
    seed = resolve_seed(args, config)
    variants = [args.variant] if args.variant else ["gs", "hd"]
    grids = {"gs": _int_list(args.gs_dims), "hd": _int_list(args.hd_dims)}
    orders = _int_list(args.orders)

    lines = []
    for variant in variants:
        for s in orders:
            timings = []
            for d in grids[variant]:
                dims = sketch_dims(variant, d if variant == "gs" else s, epsilon, variance_constant)
                G = build_sketch(variant, d, s, dims, seed)
                points = generator(seed, "bench", d).uniform(-0.5, 0.5, size=(args.points, d)) / np.sqrt(d)
                seconds = time_per_point(G, points, args.repeats)
                timings.append((d, seconds))
                lines.append(f"variant={variant} d={d} s={s} m={G.output_dim} seconds_per_point={seconds:.6e}")
            if variant == "hd" and len(timings) > 1:
                (d_small, t_small), (d_large, t_large) = timings[0], timings[-1]
                superlinear = growth_is_superlinear(d_small, t_small, d_large, t_large)
                if superlinear:
                    logger.warning("hd sketch time grew %.2fx from d=%d to d=%d at s=%d (linear would be %.2fx)",
                                   t_large / t_small, d_small, d_large, s, d_large / d_small)
                lines.append(f"variant=hd s={s} superlinear={str(superlinear).lower()}")
    return CommandResult("\n".join(lines))
