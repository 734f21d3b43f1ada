"""Contrastive objectives and their analytic gradients.

Three losses shape the embedding space:

- semantic-discrimination: a margin hinge pulling two language renderings
  of the same edit together while pushing an entity-swapped hard negative
  away from the anchor,
- cross-lingual contrast: the same hinge form anchored on the English
  question, with the matching edit as positive and a random other edit as
  negative,
- a binary cross-entropy over distances, squashing ``d`` through
  ``g(x) = exp(-x)`` so small distances score near 1.

All losses accept plain vectors; gradients are returned with respect to
every input vector so training can backpropagate through the encoder.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DimensionMismatch

logger = logging.getLogger(__name__)

DISTANCE_KINDS = ("l2", "cosine")

# negatives at distance 0 would make log(1 - g) blow up; clamp and count
_G_CEILING = 1.0 - 1e-7


@dataclass
class ClampStats:
    """Counts degenerate negatives whose squashed score had to be clamped."""

    clamped: int = 0


def _as_vec(name: str, value) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be a 1-d vector, got shape {arr.shape}")
    return arr


def _check_dims(*vectors: np.ndarray) -> None:
    dims = {v.shape[0] for v in vectors}
    if len(dims) > 1:
        raise DimensionMismatch(f"mixed embedding dimensions {sorted(dims)}")


def distance(u, v, kind: str = "l2") -> float:
    """Distance between two vectors: Euclidean or one-minus-cosine."""
    u = _as_vec("u", u)
    v = _as_vec("v", v)
    _check_dims(u, v)
    if kind == "l2":
        return float(np.linalg.norm(u - v))
    if kind == "cosine":
        nu = float(np.linalg.norm(u))
        nv = float(np.linalg.norm(v))
        if nu == 0.0 or nv == 0.0:
            raise ValueError("cosine distance undefined for zero vectors")
        return float(1.0 - (u @ v) / (nu * nv))
    raise ValueError(f"unknown distance kind {kind!r}")


def distance_grad(u: np.ndarray, v: np.ndarray, kind: str) -> tuple[float, np.ndarray, np.ndarray]:
    """Distance plus its gradients with respect to both vectors."""
    u = _as_vec("u", u)
    v = _as_vec("v", v)
    _check_dims(u, v)
    if kind == "l2":
        diff = u - v
        d = float(np.linalg.norm(diff))
        if d == 0.0:
            zero = np.zeros_like(u)
            return 0.0, zero, zero.copy()  # subgradient choice at the tip
        g = diff / d
        return d, g, -g
    if kind == "cosine":
        nu = float(np.linalg.norm(u))
        nv = float(np.linalg.norm(v))
        if nu == 0.0 or nv == 0.0:
            raise ValueError("cosine distance undefined for zero vectors")
        dot = float(u @ v)
        cos = dot / (nu * nv)
        du = -(v / (nu * nv) - cos * u / (nu * nu))
        dv = -(u / (nu * nv) - cos * v / (nv * nv))
        return 1.0 - cos, du, dv
    raise ValueError(f"unknown distance kind {kind!r}")


def triplet_margin(
    anchor, positive, negative, margin: float = 1.0, kind: str = "l2"
) -> float:
    """Pre-hinge value d(anchor, positive) - d(anchor, negative) + margin."""
    return distance(anchor, positive, kind) - distance(anchor, negative, kind) + margin


def _hinge_loss(anchor, positive, negative, margin: float, kind: str) -> float:
    return max(triplet_margin(anchor, positive, negative, margin, kind), 0.0)


def _hinge_grad(
    anchor, positive, negative, margin: float, kind: str
) -> tuple[float, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    anchor = _as_vec("anchor", anchor)
    positive = _as_vec("positive", positive)
    negative = _as_vec("negative", negative)
    _check_dims(anchor, positive, negative)
    d_pos, d_pos_da, d_pos_dp = distance_grad(anchor, positive, kind)
    d_neg, d_neg_da, d_neg_dn = distance_grad(anchor, negative, kind)
    value = d_pos - d_neg + margin
    if value <= 0.0:
        zero = np.zeros_like(anchor)
        return 0.0, (zero, zero.copy(), zero.copy())
    return value, (d_pos_da - d_neg_da, d_pos_dp, -d_neg_dn)


def loss_sd(anchor, positive, negative, margin: float = 1.0, kind: str = "l2") -> float:
    """Semantic-discrimination hinge for (rendering, translation, hard negative)."""
    return _hinge_loss(anchor, positive, negative, margin, kind)


def loss_sd_grad(anchor, positive, negative, margin: float = 1.0, kind: str = "l2"):
    return _hinge_grad(anchor, positive, negative, margin, kind)


def loss_clec(question, positive, negative, margin: float = 1.0, kind: str = "l2") -> float:
    """Cross-lingual contrast hinge for (question, matching edit, random edit)."""
    return _hinge_loss(question, positive, negative, margin, kind)


def loss_clec_grad(question, positive, negative, margin: float = 1.0, kind: str = "l2"):
    return _hinge_grad(question, positive, negative, margin, kind)


def loss_bce(
    question,
    positive_edit,
    negatives: Sequence,
    kind: str = "l2",
    stats: ClampStats | None = None,
) -> float:
    """Binary cross-entropy over squashed distances.

    The positive term scores the matching edit against the question; the
    negative term averages over other questions scored against the same
    edit. With ``g(x) = exp(-x)`` the positive term reduces to the raw
    distance. A zero-distance negative is clamped just below 1 (and
    counted) so the log stays finite.
    """
    question = _as_vec("question", question)
    positive_edit = _as_vec("positive_edit", positive_edit)
    if not negatives:
        raise ValueError("loss_bce needs at least one negative")
    d_pos = distance(positive_edit, question, kind)
    total = d_pos  # -log(exp(-d)) == d
    acc = 0.0
    for neg in negatives:
        d_neg = distance(positive_edit, _as_vec("negative", neg), kind)
        g = math.exp(-d_neg)
        if g > _G_CEILING:
            g = _G_CEILING
            if stats is not None:
                stats.clamped += 1
            logger.debug("clamped degenerate negative at distance %.3g", d_neg)
        acc += -math.log(1.0 - g)
    return total + acc / len(negatives)


def loss_bce_grad(
    question,
    positive_edit,
    negatives: Sequence,
    kind: str = "l2",
    stats: ClampStats | None = None,
):
    """Loss plus gradients w.r.t. (question, positive_edit, each negative)."""
    question = _as_vec("question", question)
    positive_edit = _as_vec("positive_edit", positive_edit)
    if not negatives:
        raise ValueError("loss_bce needs at least one negative")
    d_pos, d_dedit, d_dq = distance_grad(positive_edit, question, kind)
    total = d_pos
    g_question = d_dq.copy()
    g_edit = d_dedit.copy()
    g_negatives: list[np.ndarray] = []
    n = len(negatives)
    for neg in negatives:
        neg = _as_vec("negative", neg)
        d_neg, d_dedit_n, d_dneg = distance_grad(positive_edit, neg, kind)
        g = math.exp(-d_neg)
        if g > _G_CEILING:
            # clamped region: constant loss contribution, zero gradient
            g = _G_CEILING
            if stats is not None:
                stats.clamped += 1
            total += -math.log(1.0 - g) / n
            g_negatives.append(np.zeros_like(neg))
            continue
        total += -math.log(1.0 - g) / n
        # d/dd [-log(1 - e^-d)] = -e^-d / (1 - e^-d)
        coeff = -g / (1.0 - g) / n
        g_edit += coeff * d_dedit_n
        g_negatives.append(coeff * d_dneg)
    return total, (g_question, g_edit, g_negatives)


def total_loss(
    sd_losses: Sequence[float],
    clec_losses: Sequence[float],
    bce_losses: Sequence[float],
    weights: tuple[float, float, float] = (1.0, 1.0, 1.0),
) -> float:
    """Weighted sum of per-objective batch means; empty terms contribute 0."""
    def mean(values: Sequence[float]) -> float:
        return float(sum(values)) / len(values) if values else 0.0

    w_sd, w_clec, w_bce = weights
    return w_sd * mean(sd_losses) + w_clec * mean(clec_losses) + w_bce * mean(bce_losses)
