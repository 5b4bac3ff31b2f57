"""
Deterministic seed expansion for all randomized maps.

Every hash table in the library is drawn from a Philox counter-mode generator whose key
is derived from a master seed and a path of labels (e.g. ``(seed, "leaf", 3)``). The
derivation uses BLAKE2b over a canonical byte encoding, so it is identical across
processes, platforms and Python hash salts.
"""
import hashlib
import struct
from typing import Union

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF

SeedPart = Union[int, str, bytes]


def _to_bytes(part: SeedPart) -> bytes:
    if isinstance(part, bytes):
        return b"b" + part
    if isinstance(part, (int, np.integer)):
        return b"i" + struct.pack("<Q", int(part) & MASK64)
    return b"s" + str(part).encode("utf-8")


def child_seed(seed: int, *parts: SeedPart) -> int:
    """Derive an independent 64-bit sub-seed from ``seed`` and a label path."""
    h = hashlib.blake2b(digest_size=8)
    h.update(_to_bytes(seed))
    for part in parts:
        encoded = _to_bytes(part)
        h.update(struct.pack("<I", len(encoded)))
        h.update(encoded)
    return int.from_bytes(h.digest(), "little")


def generator(seed: int, *parts: SeedPart) -> np.random.Generator:
    """A Philox generator keyed by the derived sub-seed."""
    return np.random.Generator(np.random.Philox(key=child_seed(seed, *parts)))


def random_signs(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform {-1.0, +1.0} array."""
    return rng.integers(0, 2, size=size).astype(np.float64) * 2.0 - 1.0


SKETCH_MAGIC = b"GSKETCH1"
SKETCH_FORMAT_VERSION = 1
VARIANT_CODES = {"gs": 0, "hd": 1}


def header_fields(variant: str, d: int, s: int, dims, seed: int) -> bytes:
    """Little-endian encoding of every parameter that fixes a drawn sketch."""
    dims = [int(m) for m in dims]
    return b"".join([
        SKETCH_MAGIC,
        struct.pack("<I", SKETCH_FORMAT_VERSION),
        struct.pack("<B", VARIANT_CODES[variant]),
        struct.pack("<II", int(d), int(s)),
        struct.pack("<I", len(dims)),
        struct.pack(f"<{len(dims)}I", *dims),
        struct.pack("<Q", int(seed) & MASK64),
    ])


def config_fingerprint(variant: str, d: int, s: int, dims, seed: int) -> bytes:
    """SHA-256 over the header fields; the same digest is stored in sketch files."""
    return hashlib.sha256(header_fields(variant, d, s, dims, seed)).digest()
