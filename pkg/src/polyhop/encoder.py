"""Character n-gram feature-hashing text encoder.

The built-in encoder lowercases text, wraps it in boundary markers,
extracts character n-grams, hashes each n-gram into a fixed bucket with
a keyed 64-bit hash, averages the matching rows of a token table,
applies a square projection, and L2-normalizes. Both matrices are
trainable; everything is deterministic given the seed.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyText, EncoderFailure
from .hashutil import blake_u64, hexdigest

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT_VERSION = 1

# fastText-style boundary markers around the lowercased text
_BOUNDARY_LEFT = "<"
_BOUNDARY_RIGHT = ">"

DEFAULT_DIM = 128
DEFAULT_VOCAB_SIZE = 1 << 16
DEFAULT_NGRAM_RANGE = (3, 5)


@dataclass
class BuiltinEncoderParams:
    """Weights and featurization settings of the built-in encoder."""

    dim: int
    vocab_size: int
    ngram_range: tuple[int, int]
    seed: int
    token_table: np.ndarray
    projection: np.ndarray

    def __post_init__(self) -> None:
        if self.dim < 1 or self.vocab_size < 1:
            raise ValueError("dim and vocab_size must be positive")
        lo, hi = self.ngram_range
        if lo < 1 or hi < lo:
            raise ValueError("ngram_range must satisfy 1 <= lo <= hi")
        if self.token_table.shape != (self.vocab_size, self.dim):
            raise DimensionMismatch(
                f"token_table shape {self.token_table.shape} != {(self.vocab_size, self.dim)}"
            )
        if self.projection.shape != (self.dim, self.dim):
            raise DimensionMismatch(
                f"projection shape {self.projection.shape} != {(self.dim, self.dim)}"
            )

    @classmethod
    def initialize(
        cls,
        dim: int = DEFAULT_DIM,
        vocab_size: int = DEFAULT_VOCAB_SIZE,
        ngram_range: tuple[int, int] = DEFAULT_NGRAM_RANGE,
        seed: int = 0,
    ) -> "BuiltinEncoderParams":
        """Seeded initialization: random token rows, identity projection."""
        rng = np.random.default_rng(seed)
        token_table = rng.normal(0.0, 1.0 / np.sqrt(dim), size=(vocab_size, dim))
        projection = np.eye(dim, dtype=np.float64)
        return cls(
            dim=dim,
            vocab_size=vocab_size,
            ngram_range=(int(ngram_range[0]), int(ngram_range[1])),
            seed=seed,
            token_table=token_table,
            projection=projection,
        )

    def copy(self) -> "BuiltinEncoderParams":
        return BuiltinEncoderParams(
            dim=self.dim,
            vocab_size=self.vocab_size,
            ngram_range=self.ngram_range,
            seed=self.seed,
            token_table=self.token_table.copy(),
            projection=self.projection.copy(),
        )


def char_ngrams(text: str, ngram_range: tuple[int, int]) -> list[str]:
    """Character n-grams of the lowercased, boundary-marked text."""
    padded = _BOUNDARY_LEFT + text.lower() + _BOUNDARY_RIGHT
    lo, hi = ngram_range
    grams: list[str] = []
    for n in range(lo, hi + 1):
        for i in range(len(padded) - n + 1):
            grams.append(padded[i : i + n])
    return grams


def featurize(text: str, params: BuiltinEncoderParams) -> tuple[np.ndarray, np.ndarray]:
    """Hash n-grams into buckets; returns sorted unique ids and mean weights.

    Weights sum to 1, so a dot with the token table is the row average
    over the n-gram multiset. Sorting fixes the reduction order.
    """
    if not text.strip():
        raise EmptyText("cannot embed empty text")
    counts = Counter(
        blake_u64(gram, seed=params.seed) % params.vocab_size
        for gram in char_ngrams(text, params.ngram_range)
    )
    items = sorted(counts.items())
    ids = np.array([i for i, _ in items], dtype=np.int64)
    raw = np.array([c for _, c in items], dtype=np.float64)
    return ids, raw / raw.sum()


def embed_with_params(text: str, params: BuiltinEncoderParams) -> np.ndarray:
    """Embed one text into a unit vector of dimension ``params.dim``."""
    ids, weights = featurize(text, params)
    pooled = weights @ params.token_table[ids]
    projected = pooled @ params.projection
    norm = float(np.linalg.norm(projected))
    if not np.isfinite(norm) or norm <= 0.0:
        raise EncoderFailure(f"degenerate embedding for text {text[:60]!r} (norm={norm!r})")
    out = projected / norm
    if not np.all(np.isfinite(out)):
        raise EncoderFailure(f"non-finite embedding for text {text[:60]!r}")
    return out


class HashedNgramEncoder:
    """Callable wrapper around :class:`BuiltinEncoderParams`."""

    def __init__(self, params: BuiltinEncoderParams) -> None:
        self.params = params
        self._fingerprint: str | None = None

    @classmethod
    def create(
        cls,
        dim: int = DEFAULT_DIM,
        vocab_size: int = DEFAULT_VOCAB_SIZE,
        ngram_range: tuple[int, int] = DEFAULT_NGRAM_RANGE,
        seed: int = 0,
    ) -> "HashedNgramEncoder":
        return cls(BuiltinEncoderParams.initialize(dim, vocab_size, ngram_range, seed))

    @property
    def dim(self) -> int:
        return self.params.dim

    @property
    def fingerprint(self) -> str:
        """Content hash of weights and featurization settings."""
        if self._fingerprint is None:
            meta = json.dumps(
                {
                    "dim": self.params.dim,
                    "vocab_size": self.params.vocab_size,
                    "ngram_range": list(self.params.ngram_range),
                    "seed": self.params.seed,
                },
                sort_keys=True,
            ).encode("utf-8")
            self._fingerprint = hexdigest(
                b"hashed-ngram-v1",
                meta,
                np.ascontiguousarray(self.params.token_table).tobytes(),
                np.ascontiguousarray(self.params.projection).tobytes(),
            )
        return self._fingerprint

    def embed(self, text: str) -> np.ndarray:
        return embed_with_params(text, self.params)

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim), dtype=np.float64)
        return np.stack([self.embed(t) for t in texts])


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity of two equal-dimension vectors, clipped to [-1, 1]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape:
        raise DimensionMismatch(f"cosine of shapes {u.shape} and {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine undefined for zero vectors")
    return float(np.clip(float(u @ v) / (nu * nv), -1.0, 1.0))


def save_checkpoint(
    path: str | Path,
    params: BuiltinEncoderParams,
    extra_arrays: dict[str, np.ndarray] | None = None,
    meta: dict[str, Any] | None = None,
) -> None:
    """Write a single-file binary checkpoint.

    Layout: one JSON header line, then the raw float64 little-endian
    bytes of each array in header order. Byte-for-byte deterministic for
    identical inputs (no timestamps), which keeps repeated runs
    bit-identical.
    """
    arrays: dict[str, np.ndarray] = {
        "token_table": params.token_table,
        "projection": params.projection,
    }
    for name, arr in (extra_arrays or {}).items():
        if name in arrays:
            raise ValueError(f"extra array name {name!r} collides with a weight matrix")
        arrays[name] = arr
    header = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "dim": params.dim,
        "vocab_size": params.vocab_size,
        "ngram_range": list(params.ngram_range),
        "seed": params.seed,
        "arrays": [
            {"name": name, "shape": list(arr.shape), "dtype": "<f8"}
            for name, arr in arrays.items()
        ],
        "meta": meta or {},
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8") + b"\n")
        for arr in arrays.values():
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


@dataclass
class CheckpointBundle:
    """A loaded checkpoint: encoder weights plus any training extras."""

    params: BuiltinEncoderParams
    extra_arrays: dict[str, np.ndarray] = field(default_factory=dict)
    meta: dict[str, Any] = field(default_factory=dict)


def load_checkpoint(path: str | Path) -> CheckpointBundle:
    with open(path, "rb") as fh:
        header_line = fh.readline()
        header = json.loads(header_line.decode("utf-8"))
        version = header.get("format_version")
        if version != CHECKPOINT_FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint format_version {version!r}")
        arrays: dict[str, np.ndarray] = {}
        for spec in header["arrays"]:
            shape = tuple(spec["shape"])
            count = int(np.prod(shape)) if shape else 1
            buf = fh.read(count * 8)
            if len(buf) != count * 8:
                raise ValueError(f"checkpoint truncated while reading {spec['name']!r}")
            arrays[spec["name"]] = np.frombuffer(buf, dtype="<f8").reshape(shape).copy()
    params = BuiltinEncoderParams(
        dim=int(header["dim"]),
        vocab_size=int(header["vocab_size"]),
        ngram_range=(int(header["ngram_range"][0]), int(header["ngram_range"][1])),
        seed=int(header["seed"]),
        token_table=arrays.pop("token_table"),
        projection=arrays.pop("projection"),
    )
    return CheckpointBundle(params=params, extra_arrays=arrays, meta=header.get("meta", {}))
