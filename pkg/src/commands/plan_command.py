"""
Command handler for `gsketch plan`: prints the planned sketch parameters.
"""
from commands.command_support import CommandResult, build_plan
from modules.errors import UsageError


def execute(args, config):
    if args.d is None or args.d < 1:
        raise UsageError("plan needs --d (the input dimension)")
    if args.radius is None:
        raise UsageError("plan needs --radius (L for gs, R for hd)")
    if args.task == "pca" and not args.n:
        raise UsageError("plan --task pca needs --n (the number of points)")
    planned = build_plan(args, config, args.d, [], task=args.task, n=args.n)
    return CommandResult("\n".join(planned.as_lines()))
