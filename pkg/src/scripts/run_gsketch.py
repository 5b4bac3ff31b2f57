import sys
import os
import argparse
import logging

# Ensure Python finds 'modules/' and 'commands/'
SCRIPT_DIR = os.path.dirname(os.path.abspath(__file__))
PROJECT_ROOT = os.path.abspath(os.path.join(SCRIPT_DIR, ".."))
if PROJECT_ROOT not in sys.path:
    sys.path.append(PROJECT_ROOT)

from modules.config_loader import resolve_config, get_debug_settings, get_sketch_settings
from modules.logging_utils import setup_logging
from modules.app_state import state
from modules.errors import GSketchError, UsageError
from commands import (
    plan_command, sketch_command, dist_command, test2_command, kpca_command, nn_command, bench_command,
)

logger = logging.getLogger("gsketch")

COMMANDS = {
    "plan": plan_command,
    "sketch": sketch_command,
    "dist": dist_command,
    "test2": test2_command,
    "kpca": kpca_command,
    "nn": nn_command,
    "bench": bench_command,
}

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


def _global_flags():
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("global options")
    group.add_argument("--epsilon", type=float, help="Relative error (default from config)")
    group.add_argument("--alpha", type=float, help="Additive error (default from config)")
    group.add_argument("--delta", type=float, help="Failure probability for the median trick")
    group.add_argument("--radius", type=float, help="Domain radius: L (max |x_j|) for gs, R (max ||x||) for hd")
    group.add_argument("--variant", choices=["gs", "hd"], help="Sketch family (default gs)")
    group.add_argument("--seed", type=int, help="Master seed; all randomness derives from it")
    group.add_argument("--jl-dim", dest="jl_dim", type=int, help="JL post-compression dimension")
    group.add_argument("--replicas", type=int, help="Odd number of independent replicas (median trick)")
    group.add_argument("--threads", type=int, help="Worker threads for per-point sketching")
    group.add_argument("--config", type=str, help="Override file: key=value lines or a YAML mapping")
    group.add_argument("--bandwidth", type=float, help="Kernel bandwidth sigma; inputs are scaled by 1/sigma")
    group.add_argument("--format", choices=["csv", "jsonl"], help="Input format (default: from extension)")
    group.add_argument("--debug", action="store_true", help="Enable debug logging")
    return common


def build_parser():
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="gsketch", description="gsketch - Gaussian kernel sketching of points and point sets")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", parents=[common], help="Print planned sketch parameters")
    p.add_argument("--d", type=int, help="Input dimension")
    p.add_argument("--task", choices=["distance", "pca"], default="distance")
    p.add_argument("--n", type=int, help="Number of points (pca plans)")

    p = sub.add_parser("sketch", parents=[common], help="Embed point sets into a binary sketch file")
    p.add_argument("input", help="csv (one set) or jsonl (labeled sets)")
    p.add_argument("--out", required=True, help="Output sketch file")

    p = sub.add_parser("dist", parents=[common], help="Exact and/or sketched squared kernel distance")
    p.add_argument("p")
    p.add_argument("q")
    p.add_argument("--exact-only", dest="exact_only", action="store_true")
    p.add_argument("--sketch-only", dest="sketch_only", action="store_true")

    p = sub.add_parser("test2", parents=[common], help="Kernel two-sample test on sketches")
    p.add_argument("p")
    p.add_argument("q")
    p.add_argument("--trials", type=int, help="Resampling trials q (>= 20)")
    p.add_argument("--level", type=float, help="Test level (default 0.05)")
    p.add_argument("--resample-mode", dest="resample_mode", choices=["iid_with_replacement", "permutation"])

    p = sub.add_parser("kpca", parents=[common], help="Sketched rank-k kernel PCA")
    p.add_argument("input")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", help="CSV file for the n x k basis (stdout when omitted)")
    p.add_argument("--verify", action="store_true", help="Also print residual and optimum")
    p.add_argument("--r-schedule", dest="r_schedule", choices=["linear", "geometric"])

    p = sub.add_parser("nn", parents=[common], help="Nearest point set by sketched kernel distance")
    p.add_argument("index", help="jsonl of labeled sets to index")
    p.add_argument("query", help="csv or jsonl query set(s)")

    p = sub.add_parser("bench", parents=[common], help="Per-point sketch latency against d and s")
    p.add_argument("--gs-dims", dest="gs_dims", default="2,4,8,16")
    p.add_argument("--hd-dims", dest="hd_dims", default="64,128,256,512")
    p.add_argument("--orders", default="4,8", help="Truncation orders s")
    p.add_argument("--points", type=int, default=64)
    p.add_argument("--repeats", type=int, default=3)
    return parser


def _configure(args, config):
    debug = get_debug_settings(config)
    state.debug_mode = bool(args.debug or debug["debug_mode"])
    setup_logging(state.debug_mode, debug["log_level"])
    sketch = get_sketch_settings(config)
    state.threads = int(args.threads if args.threads is not None else sketch["threads"])
    state.chunk_size = int(sketch["chunk_size"])
    state.sequential = state.threads <= 1
    if state.threads < 1:
        raise UsageError(f"--threads must be >= 1, got {state.threads}")


def run_cli(argv=None):
    """Parse ``argv``, run one subcommand and return the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        config = resolve_config(args.config)
    except (FileNotFoundError, ValueError) as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        _configure(args, config)
        result = COMMANDS[args.command].execute(args, config)
    except UsageError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (GSketchError, OSError, ValueError, ArithmeticError) as e:
        print(f"ERROR: {e}", file=sys.stderr)
        logger.debug("command %s failed", args.command, exc_info=True)
        return EXIT_RUNTIME
    finally:
        state.reset()

    print(result.message)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(run_cli())
