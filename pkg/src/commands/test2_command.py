"""
Command handler for `gsketch test2`: sketched kernel two-sample test.
"""
from commands.command_support import (
    CommandResult, flag_or_config, load_pointset, resolve_radius, resolve_seed, resolve_variant,
)
from modules.config_loader import get_sketch_settings, get_two_sample_settings
from modules.sketching.apps import two_sample_test
from modules.sketching.kernel_distance import pointset_pair
from modules.sketching.planner import plan_two_sample
from modules.sketching.seeding import child_seed
from modules.sketching.sketchers import sketch_from_plan

TWO_SAMPLE_EPSILON = 0.2


def execute(args, config):
    P, Q = pointset_pair(load_pointset(args.p, args), load_pointset(args.q, args))
    settings = get_two_sample_settings(config)
    variant = resolve_variant(args)
    seed = resolve_seed(args, config)

    pooled = P.union(Q)
    radius = resolve_radius(args, [pooled], variant)
    epsilon = args.epsilon if args.epsilon is not None else TWO_SAMPLE_EPSILON
    planned = plan_two_sample(pooled.n, pooled.d, radius, variant, epsilon,
                              float(get_sketch_settings(config)["variance_constant"]))
    G = sketch_from_plan(planned, child_seed(seed, "two_sample", "sketch"))

    result = two_sample_test(
        P, Q,
        q=int(flag_or_config(args.trials, settings, "trials")),
        level=float(flag_or_config(args.level, settings, "level")),
        G=G,
        resample_mode=flag_or_config(args.resample_mode, settings, "resample_mode"),
        seed=seed,
    )
    return CommandResult("\n".join(result.as_lines()))
