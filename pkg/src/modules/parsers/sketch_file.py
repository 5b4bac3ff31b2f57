"""
Binary sketch files.

Layout (little-endian):

    magic "GSKETCH1" | version u32 | variant u8 | d u32 | s u32 | ndims u32 | dims u32[ndims] | seed u64
    fingerprint: sha256 of everything above (32 bytes)
    jl_dim u32 (0 when uncompressed) | jl_seed u64
    n_records u32
    per record: count u64 | label_len u32 | label utf-8 | width float64 values

width is sum(dims), or jl_dim for compressed files.
"""
import hashlib
import logging
import struct
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from modules.errors import SketchFileError
from modules.sketching.compress import JlProjector
from modules.sketching.seeding import SKETCH_FORMAT_VERSION, SKETCH_MAGIC, VARIANT_CODES, header_fields
from modules.sketching.sketchers import Embedding, GaussianSketch

logger = logging.getLogger(__name__)

_VARIANT_NAMES = {code: name for name, code in VARIANT_CODES.items()}


@dataclass(frozen=True)
class SketchFileHeader:
    variant: str
    d: int
    s: int
    dims: Tuple[int, ...]
    seed: int
    jl_dim: int = 0
    jl_seed: int = 0

    @property
    def fields(self) -> bytes:
        return header_fields(self.variant, self.d, self.s, self.dims, self.seed)

    @property
    def fingerprint(self) -> bytes:
        return hashlib.sha256(self.fields).digest()

    @property
    def width(self) -> int:
        return self.jl_dim or int(sum(self.dims))

    @property
    def embedding_fingerprint(self) -> str:
        fingerprint = self.fingerprint.hex()
        if self.jl_dim:
            fingerprint = f"{fingerprint}+jl:{self.jl_dim}:{self.jl_seed}"
        return fingerprint

    @classmethod
    def for_sketch(cls, G: GaussianSketch, projector: Optional[JlProjector] = None) -> "SketchFileHeader":
        return cls(variant=G.variant, d=G.d, s=G.s, dims=tuple(G.output_dims), seed=G.seed,
                   jl_dim=projector.out_dim if projector else 0, jl_seed=projector.seed if projector else 0)


def encode_sketch_file(header: SketchFileHeader, embeddings: Sequence[Embedding]) -> bytes:
    chunks = [header.fields, header.fingerprint, struct.pack("<IQ", header.jl_dim, header.jl_seed),
              struct.pack("<I", len(embeddings))]
    for embedding in embeddings:
        if embedding.fingerprint != header.embedding_fingerprint:
            raise SketchFileError("embedding was not produced by the sketch described in the header")
        vector = np.asarray(embedding.vector, dtype="<f8")
        if vector.shape != (header.width,):
            raise SketchFileError(f"embedding has shape {vector.shape}, header declares width {header.width}")
        label = (embedding.label or "").encode("utf-8")
        chunks.append(struct.pack("<QI", embedding.count, len(label)))
        chunks.append(label)
        chunks.append(vector.tobytes())
    return b"".join(chunks)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, size: int) -> bytes:
        if self.offset + size > len(self.data):
            raise SketchFileError(f"truncated sketch file at byte {self.offset}")
        chunk = self.data[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def decode_sketch_file(data: bytes) -> Tuple[SketchFileHeader, List[Embedding]]:
    reader = _Reader(data)
    if reader.take(len(SKETCH_MAGIC)) != SKETCH_MAGIC:
        raise SketchFileError("not a sketch file (bad magic)")
    (version,) = reader.unpack("<I")
    if version != SKETCH_FORMAT_VERSION:
        raise SketchFileError(f"unsupported sketch file version {version}")
    (variant_code,) = reader.unpack("<B")
    if variant_code not in _VARIANT_NAMES:
        raise SketchFileError(f"unknown variant code {variant_code}")
    d, s, ndims = reader.unpack("<III")
    dims = reader.unpack(f"<{ndims}I")
    (seed,) = reader.unpack("<Q")
    stored_fingerprint = reader.take(32)
    if hashlib.sha256(data[:reader.offset - 32]).digest() != stored_fingerprint:
        raise SketchFileError("sketch file fingerprint does not verify")
    variant = _VARIANT_NAMES[variant_code]
    expected_dims = 1 if variant == "gs" else s
    if ndims != expected_dims:
        raise SketchFileError(f"{variant} header with s={s} must list {expected_dims} width(s), found {ndims}")
    jl_dim, jl_seed = reader.unpack("<IQ")
    header = SketchFileHeader(variant=variant, d=d, s=s, dims=tuple(dims), seed=seed,
                              jl_dim=jl_dim, jl_seed=jl_seed)

    (n_records,) = reader.unpack("<I")
    embeddings = []
    for _ in range(n_records):
        count, label_len = reader.unpack("<QI")
        try:
            label = reader.take(label_len).decode("utf-8") or None
        except UnicodeDecodeError as e:
            raise SketchFileError(f"record label is not valid UTF-8: {e}")
        vector = np.frombuffer(reader.take(8 * header.width), dtype="<f8").astype(np.float64)
        embeddings.append(Embedding(vector=vector, fingerprint=header.embedding_fingerprint, count=count, label=label))
    if reader.offset != len(data):
        raise SketchFileError(f"{len(data) - reader.offset} trailing bytes after the last record")
    return header, embeddings


def write_sketch_file(path: str, header: SketchFileHeader, embeddings: Sequence[Embedding]):
    with open(path, "wb") as file:
        file.write(encode_sketch_file(header, embeddings))
    logger.debug("wrote %d embedding(s) to %s", len(embeddings), path)


def read_sketch_file(path: str) -> Tuple[SketchFileHeader, List[Embedding]]:
    with open(path, "rb") as file:
        return decode_sketch_file(file.read())
