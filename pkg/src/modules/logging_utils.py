import logging
import sys

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(debug=False, level="WARNING"):
    """Configure root logging on stderr; stdout stays reserved for command output."""
    resolved = logging.DEBUG if debug else getattr(logging, str(level).upper(), logging.WARNING)
    logging.basicConfig(level=resolved, format=LOG_FORMAT, stream=sys.stderr, force=True)
    return resolved
