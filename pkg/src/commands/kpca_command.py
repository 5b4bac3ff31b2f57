"""
Command handler for `gsketch kpca`: sketched rank-k kernel PCA basis as CSV.
"""
from commands.command_support import (
    CommandResult, flag_or_config, load_pointset, resolve_radius, resolve_seed, resolve_variant,
)
from modules.config_loader import get_accuracy_defaults, get_kpca_settings
from modules.errors import UsageError
from modules.parsers.pointset_parser import format_matrix_csv
from modules.sketching.kpca import kpca_error, kpca_fit


def execute(args, config):
    if args.k is None or args.k < 1:
        raise UsageError("kpca needs --k >= 1")
    X = load_pointset(args.input, args)
    settings = get_kpca_settings(config)
    accuracy = get_accuracy_defaults(config)
    variant = resolve_variant(args)
    epsilon = float(flag_or_config(args.epsilon, accuracy, "epsilon"))
    alpha = float(flag_or_config(args.alpha, accuracy, "alpha"))

    basis = kpca_fit(
        X, args.k, epsilon, alpha,
        variant=variant,
        seed=resolve_seed(args, config),
        radius=resolve_radius(args, [X], variant),
        c_m=float(settings["c_m"]),
        c_r=float(settings["c_r"]),
        r_schedule=flag_or_config(args.r_schedule, settings, "r_schedule"),
        max_sketch_dim=int(settings["max_sketch_dim"]),
    )
    csv_text = format_matrix_csv(basis.V)
    lines = [f"k={basis.k}", f"s={basis.s}", f"m={basis.m}", f"r={basis.r}"]
    if args.out:
        with open(args.out, "w", encoding="utf-8") as file:
            file.write(csv_text)
        lines.append(f"out={args.out}")
    else:
        lines.append(csv_text.rstrip("\n"))

    if args.verify:
        residual, optimum = kpca_error(X, basis, args.k)
        bound = (1 + epsilon) * optimum + alpha
        lines += [f"residual={residual!r}", f"optimum={optimum!r}", f"bound={bound!r}",
                  f"within_bound={str(residual <= bound).lower()}"]
    return CommandResult("\n".join(lines))
