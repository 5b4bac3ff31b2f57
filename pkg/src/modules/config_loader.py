import os
import copy
import logging
import yaml

CONFIG_PATH = os.path.abspath(os.path.join(os.path.dirname(__file__), "../../config.yaml"))

logger = logging.getLogger(__name__)

# Built-in fallbacks for keys missing from config.yaml.
DEFAULTS = {
    "debugging": {"debug_mode": False, "log_level": "WARNING"},
    "sketch": {"variance_constant": 20.0, "seed": 0, "chunk_size": 256, "threads": 1, "s_cap": 100000},
    "accuracy": {"epsilon": 0.5, "alpha": 1e-3, "delta": 0.1},
    "compress": {"jl_constant": 8.0, "median_constant": 2.0},
    "kpca": {"c_m": 1.0, "c_r": 1.0, "r_schedule": "linear", "max_sketch_dim": 65536},
    "two_sample": {"trials": 1000, "level": 0.05, "resample_mode": "iid_with_replacement"},
}


def get_config_path():
    """Get the path to the config file."""
    return CONFIG_PATH


def load_config(path=None):
    """Loads the entire config.yaml file."""
    path = path or CONFIG_PATH
    try:
        with open(path, 'r') as file:
            return yaml.safe_load(file) or {}
    except FileNotFoundError:
        raise FileNotFoundError(f"ERROR: Config file not found at {path}. Please check the path.")
    except yaml.YAMLError as e:
        raise ValueError(f"ERROR: Failed to parse YAML in {os.path.basename(path)}: {e}")


def _coerce(value):
    """Turn a key=value string into the scalar YAML would produce."""
    try:
        return yaml.safe_load(value)
    except yaml.YAMLError:
        return value


def load_override_file(path):
    """
    Load a --config override file.

    Accepts either `key=value` lines with dotted keys (e.g. `kpca.c_m=2`) or a YAML mapping.
    Returns a nested dict.
    """
    try:
        with open(path, 'r', encoding='utf-8') as file:
            lines = file.read().splitlines()
    except FileNotFoundError:
        raise FileNotFoundError(f"ERROR: Config file not found at {path}. Please check the path.")

    content = [line.strip() for line in lines if line.strip() and not line.strip().startswith('#')]
    if content and all('=' in line for line in content):
        overrides = {}
        for line in content:
            key, value = line.split('=', 1)
            node = overrides
            parts = key.strip().split('.')
            for part in parts[:-1]:
                node = node.setdefault(part, {})
            node[parts[-1]] = _coerce(value.strip())
        return overrides

    data = load_config(path)
    if not isinstance(data, dict):
        raise ValueError(f"ERROR: Config override {path} must be key=value lines or a YAML mapping.")
    return data


def merge_config(base, overrides):
    """Recursively merge overrides into a copy of base."""
    merged = copy.deepcopy(base)
    for key, value in (overrides or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_config(merged[key], value)
        else:
            merged[key] = value
    return merged


def resolve_config(override_path=None):
    """Built-in defaults, then config.yaml, then the optional override file."""
    config = copy.deepcopy(DEFAULTS)
    if os.path.exists(CONFIG_PATH):
        config = merge_config(config, load_config())
    else:
        logger.debug("No config.yaml at %s; using built-in defaults", CONFIG_PATH)
    if override_path:
        config = merge_config(config, load_override_file(override_path))
    return config


def _section(name, config=None):
    config = config if config is not None else resolve_config()
    return {**DEFAULTS.get(name, {}), **(config.get(name) or {})}


def get_sketch_settings(config=None):
    """Gets the sketch section (variance constant, seed, chunking, threads)."""
    return _section("sketch", config)


def get_accuracy_defaults(config=None):
    """Gets the default epsilon/alpha/delta."""
    return _section("accuracy", config)


def get_compress_settings(config=None):
    """Gets the JL and median-trick constants."""
    return _section("compress", config)


def get_kpca_settings(config=None):
    """Gets the kernel PCA constants and dimension cap."""
    return _section("kpca", config)


def get_two_sample_settings(config=None):
    """Gets the two-sample test defaults."""
    return _section("two_sample", config)


def get_debug_settings(config=None):
    """Gets debug mode and log level."""
    return _section("debugging", config)
