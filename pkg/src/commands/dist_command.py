"""
Command handler for `gsketch dist`: exact and/or sketched squared kernel distance.
"""
from commands.command_support import CommandResult, build_plan, load_pointset, resolve_seed
from modules.errors import UsageError
from modules.sketching.compress import replicated_dk2
from modules.sketching.kernel_distance import DistanceReport, exact_dk2, pointset_pair, sketched_dk2
from modules.sketching.sketchers import sketch_from_plan


def execute(args, config):
    if args.exact_only and args.sketch_only:
        raise UsageError("--exact-only and --sketch-only are mutually exclusive")
    P, Q = pointset_pair(load_pointset(args.p, args), load_pointset(args.q, args))

    if args.exact_only:
        return CommandResult(f"exact_dk2={exact_dk2(P, Q)!r}")

    planned = build_plan(args, config, P.d, [P, Q])
    seed = resolve_seed(args, config)
    if args.replicas is not None or args.jl_dim is not None:
        sketched = replicated_dk2(planned, P, Q, seed)
    else:
        sketched = sketched_dk2(sketch_from_plan(planned, seed), P, Q)

    exact = None if args.sketch_only else exact_dk2(P, Q)
    report = DistanceReport.build(sketched, planned.epsilon, planned.alpha, exact)
    return CommandResult("\n".join(report.as_lines()))
