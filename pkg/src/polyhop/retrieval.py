"""Top-1 retrieval over the edit memory, plus threshold verification.

Retrieval is exact: the query embeds once and every memory row is
scored by cosine similarity. Ties break to the lowest row index. The
verification predicate is ``score >= threshold`` (inclusive).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import FingerprintMismatch
from .facts import EditMemory, Encoder, FactEdit

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.7


@dataclass(frozen=True)
class RetrievalResult:
    """Best-scoring edit for a query and its verification outcome."""

    edit: FactEdit
    index: int
    score: float
    verified: bool
    threshold_used: float


def _check_threshold(threshold: float) -> None:
    if not -1.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [-1, 1], got {threshold!r}")


def retrieve_top1(
    query: str,
    memory: EditMemory,
    encoder: Encoder,
    threshold: float = DEFAULT_THRESHOLD,
) -> RetrievalResult | None:
    """Return the single best edit for ``query``, or None if memory is empty.

    The encoder must be the one that built the memory; a fingerprint
    mismatch fails loudly rather than silently comparing incompatible
    spaces.
    """
    _check_threshold(threshold)
    if encoder.fingerprint != memory.encoder_fingerprint:
        raise FingerprintMismatch(
            f"memory was built by {memory.encoder_fingerprint!r}, "
            f"query encoder is {encoder.fingerprint!r}"
        )
    if len(memory) == 0:
        return None
    query_vec = encoder.embed(query)
    # memory rows and the query are unit vectors, so the dot product is cosine
    scores = memory.embeddings @ query_vec
    index = int(np.argmax(scores))  # argmax returns the lowest index on ties
    score = float(scores[index])
    return RetrievalResult(
        edit=memory.edits[index],
        index=index,
        score=score,
        verified=score >= threshold,
        threshold_used=threshold,
    )


def verify(result: RetrievalResult, threshold: float) -> bool:
    """Pure predicate: is the retrieval trustworthy at this threshold?"""
    _check_threshold(threshold)
    return result.score >= threshold
