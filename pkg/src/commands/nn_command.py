"""
Command handler for `gsketch nn`: builds a set index and answers nearest-neighbor queries.
"""
from commands.command_support import CommandResult, build_plan, load_pointsets, resolve_seed
from modules.errors import InputShapeError
from modules.sketching.apps import nn_index_build


def execute(args, config):
    sets = load_pointsets(args.index, args)
    queries = load_pointsets(args.query, args)
    dims = {P.d for P in sets + queries}
    if len(dims) != 1:
        raise InputShapeError(f"index and query sets have inconsistent dimensions {sorted(dims)}")

    planned = build_plan(args, config, sets[0].d, sets + queries)
    index = nn_index_build(sets, planned, resolve_seed(args, config))
    lines = [f"indexed={len(index)}"]
    for i, (label, distance) in enumerate(index.query_many(queries)):
        query_label = queries[i].label if queries[i].label is not None else str(i)
        lines.append(f"query={query_label}\tnearest={label}\tdistance={distance!r}")
    return CommandResult("\n".join(lines))
