"""Stable hashing helpers.

Python's builtin ``hash`` is salted per process, so everything that must
be reproducible across runs and platforms goes through keyed blake2b.
"""

from __future__ import annotations

import hashlib

_MASK64 = (1 << 64) - 1


def blake_u64(data: str | bytes, seed: int = 0) -> int:
    """Return a 64-bit unsigned hash of ``data`` keyed by ``seed``."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    key = (int(seed) & _MASK64).to_bytes(8, "little")
    digest = hashlib.blake2b(data, digest_size=8, key=key).digest()
    return int.from_bytes(digest, "little")


def hexdigest(*parts: bytes) -> str:
    """Hex fingerprint of the concatenated byte parts."""
    h = hashlib.blake2b(digest_size=16)
    for part in parts:
        h.update(part)
    return h.hexdigest()


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()
