"""Mini-batch Adam training of the hashed n-gram encoder.

The trainable parameters are the encoder's token table and projection.
Each batch mixes triplet examples and question/edit pairs; gradients
flow through mean-pooled hashed n-gram features, the projection, and
the final L2 normalization. Everything is deterministic given the
config seed: the train/validation split, shuffle order, in-batch
negative sampling, and the reduction order of every sum.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from ..encoder import BuiltinEncoderParams, featurize
from ..errors import NonFiniteLoss
from .data import KIND_CLEC, KIND_SD, BcePair, TrainingData, TripletExample
from .losses import ClampStats, loss_bce_grad, loss_clec_grad, loss_sd_grad

logger = logging.getLogger(__name__)

VALIDATION_FRACTION = 0.2

# rng stream labels so every consumer draws from its own substream
_STREAM_SPLIT = 1
_STREAM_SHUFFLE = 2
_STREAM_NEGATIVES = 3
_STREAM_VAL_NEGATIVES = 4


@dataclass
class TrainConfig:
    learning_rate: float = 5e-5
    batch_size: int = 1024
    epochs: int = 200
    margin: float = 1.0
    negatives_per_positive: int = 20
    distance: str = "l2"
    seed: int = 0
    loss_weights: tuple[float, float, float] = (1.0, 1.0, 1.0)
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.margin < 0:
            raise ValueError("margin must be non-negative")
        if self.negatives_per_positive < 1:
            raise ValueError("negatives_per_positive must be positive")
        if self.distance not in ("l2", "cosine"):
            raise ValueError(f"unknown distance {self.distance!r}")
        self.loss_weights = tuple(float(w) for w in self.loss_weights)  # type: ignore[assignment]
        if len(self.loss_weights) != 3 or any(w < 0 for w in self.loss_weights):
            raise ValueError("loss_weights must be three non-negative numbers")


@dataclass
class AdamState:
    m_token: np.ndarray
    v_token: np.ndarray
    m_proj: np.ndarray
    v_proj: np.ndarray
    step: int = 0

    @classmethod
    def zeros(cls, params: BuiltinEncoderParams) -> "AdamState":
        return cls(
            m_token=np.zeros_like(params.token_table),
            v_token=np.zeros_like(params.token_table),
            m_proj=np.zeros_like(params.projection),
            v_proj=np.zeros_like(params.projection),
        )


@dataclass(frozen=True)
class CurveRow:
    epoch: int
    split: str
    total: float
    sd: float
    clec: float
    bce: float


@dataclass
class TrainResult:
    params: BuiltinEncoderParams
    curve: list[CurveRow]
    adam: AdamState
    clamp_stats: ClampStats
    epochs_run: int


class _FeatureCache:
    """Memoized featurization plus sparse batch matrices."""

    def __init__(self, params: BuiltinEncoderParams) -> None:
        self._params = params
        self._cache: dict[str, tuple[np.ndarray, np.ndarray]] = {}

    def get(self, text: str) -> tuple[np.ndarray, np.ndarray]:
        hit = self._cache.get(text)
        if hit is None:
            hit = featurize(text, self._params)
            self._cache[text] = hit
        return hit

    def matrix(self, texts: Sequence[str]) -> sp.csr_matrix:
        indptr = [0]
        indices: list[np.ndarray] = []
        data: list[np.ndarray] = []
        for text in texts:
            ids, weights = self.get(text)
            indices.append(ids)
            data.append(weights)
            indptr.append(indptr[-1] + len(ids))
        return sp.csr_matrix(
            (
                np.concatenate(data) if data else np.zeros(0),
                np.concatenate(indices) if indices else np.zeros(0, dtype=np.int64),
                np.array(indptr, dtype=np.int64),
            ),
            shape=(len(texts), self._params.vocab_size),
        )


@dataclass
class _Forward:
    X: sp.csr_matrix
    H: np.ndarray
    norms: np.ndarray
    E: np.ndarray


def _forward(cache: _FeatureCache, params: BuiltinEncoderParams, texts: Sequence[str]) -> _Forward:
    X = cache.matrix(texts)
    H = X @ params.token_table
    Z = H @ params.projection
    norms = np.linalg.norm(Z, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        E = Z / norms[:, None]
    return _Forward(X=X, H=H, norms=norms, E=E)


def _backward(
    fwd: _Forward, params: BuiltinEncoderParams, dE: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    # through the row normalization: dZ = (dE - E (E . dE)) / |Z|
    inner = np.sum(fwd.E * dE, axis=1, keepdims=True)
    dZ = (dE - fwd.E * inner) / fwd.norms[:, None]
    d_proj = fwd.H.T @ dZ
    dH = dZ @ params.projection.T
    d_token = np.asarray(fwd.X.T @ dH)
    return d_token, d_proj


def _adam_update(
    params: BuiltinEncoderParams,
    grads: tuple[np.ndarray, np.ndarray],
    state: AdamState,
    config: TrainConfig,
) -> None:
    g_token, g_proj = grads
    state.step += 1
    b1, b2 = config.adam_beta1, config.adam_beta2
    correct1 = 1.0 - b1**state.step
    correct2 = 1.0 - b2**state.step
    for param, grad, m, v in (
        (params.token_table, g_token, state.m_token, state.v_token),
        (params.projection, g_proj, state.m_proj, state.v_proj),
    ):
        m *= b1
        m += (1.0 - b1) * grad
        v *= b2
        v += (1.0 - b2) * grad * grad
        param -= config.learning_rate * (m / correct1) / (np.sqrt(v / correct2) + config.adam_eps)


def _split(data: TrainingData, seed: int) -> tuple[list, list]:
    """Hold out a fixed fraction of each example kind for validation."""
    rng = np.random.default_rng([seed, _STREAM_SPLIT])
    train_items: list[tuple[str, object]] = []
    val_items: list[tuple[str, object]] = []
    groups: list[tuple[str, list]] = [
        (KIND_SD, data.by_kind(KIND_SD)),
        (KIND_CLEC, data.by_kind(KIND_CLEC)),
        ("bce", list(data.pairs)),
    ]
    for kind, examples in groups:
        n_val = int(len(examples) * VALIDATION_FRACTION)
        order = rng.permutation(len(examples))
        for pos, index in enumerate(order):
            target = val_items if pos < n_val else train_items
            target.append((kind, examples[index]))
    return train_items, val_items


def _batch_terms(
    batch: list[tuple[str, object]],
    cache: _FeatureCache,
    params: BuiltinEncoderParams,
    config: TrainConfig,
    rng: np.random.Generator,
    stats: ClampStats,
    want_grad: bool,
) -> tuple[dict[str, list[float]], np.ndarray | None, _Forward]:
    """Embed the batch once and evaluate every loss term against it."""
    texts: list[str] = []
    row_of: dict[str, int] = {}

    def row(text: str) -> int:
        if text not in row_of:
            row_of[text] = len(texts)
            texts.append(text)
        return row_of[text]

    triplet_rows: list[tuple[str, int, int, int]] = []
    bce_rows: list[tuple[int, int]] = []
    for kind, example in batch:
        if kind == "bce":
            pair: BcePair = example  # type: ignore[assignment]
            bce_rows.append((row(pair.question), row(pair.edit_statement)))
        else:
            triplet: TripletExample = example  # type: ignore[assignment]
            triplet_rows.append(
                (kind, row(triplet.anchor), row(triplet.positive), row(triplet.negative))
            )

    fwd = _forward(cache, params, texts)
    E = fwd.E
    dE = np.zeros_like(E) if want_grad else None
    losses: dict[str, list[float]] = {KIND_SD: [], KIND_CLEC: [], "bce": []}

    n_sd = sum(1 for k, *_ in triplet_rows if k == KIND_SD)
    n_clec = len(triplet_rows) - n_sd
    n_bce = len(bce_rows)
    w_sd, w_clec, w_bce = config.loss_weights

    for kind, a, p, n in triplet_rows:
        grad_fn = loss_sd_grad if kind == KIND_SD else loss_clec_grad
        value, (ga, gp, gn) = grad_fn(E[a], E[p], E[n], config.margin, config.distance)
        losses[kind].append(value)
        if dE is not None:
            scale = (w_sd / n_sd) if kind == KIND_SD else (w_clec / n_clec)
            if scale:
                dE[a] += scale * ga
                dE[p] += scale * gp
                dE[n] += scale * gn

    questions = [q for q, _ in bce_rows]
    for i, (q_row, e_row) in enumerate(bce_rows):
        other_rows = questions[:i] + questions[i + 1 :]
        k = min(config.negatives_per_positive, len(other_rows))
        if k:
            picked = rng.choice(len(other_rows), size=k, replace=False)
            neg_rows = [other_rows[int(j)] for j in picked]
            value, (gq, ge, gns) = loss_bce_grad(
                E[q_row], E[e_row], [E[r] for r in neg_rows], config.distance, stats
            )
        else:
            # a lone pair in its batch has no in-batch negatives; keep the
            # positive term so the example still contributes
            from .losses import distance_grad

            value, ge, gq = distance_grad(E[e_row], E[q_row], config.distance)
            gns, neg_rows = [], []
        losses["bce"].append(value)
        if dE is not None and w_bce and n_bce:
            scale = w_bce / n_bce
            dE[q_row] += scale * gq
            dE[e_row] += scale * ge
            for neg_row, gn in zip(neg_rows, gns):
                dE[neg_row] += scale * gn
    return losses, dE, fwd


@dataclass
class _EpochTally:
    sums: dict[str, float] = field(default_factory=lambda: {KIND_SD: 0.0, KIND_CLEC: 0.0, "bce": 0.0})
    counts: dict[str, int] = field(default_factory=lambda: {KIND_SD: 0, KIND_CLEC: 0, "bce": 0})

    def add(self, losses: dict[str, list[float]]) -> None:
        for kind, values in losses.items():
            self.sums[kind] += float(sum(values))
            self.counts[kind] += len(values)

    def row(self, epoch: int, split: str, weights: tuple[float, float, float]) -> CurveRow:
        def mean(kind: str) -> float:
            return self.sums[kind] / self.counts[kind] if self.counts[kind] else 0.0

        sd, clec, bce = mean(KIND_SD), mean(KIND_CLEC), mean("bce")
        total = weights[0] * sd + weights[1] * clec + weights[2] * bce
        return CurveRow(epoch=epoch, split=split, total=total, sd=sd, clec=clec, bce=bce)


def train(
    data: TrainingData,
    config: TrainConfig,
    init_params: BuiltinEncoderParams,
    start_epoch: int = 0,
    adam_state: AdamState | None = None,
) -> TrainResult:
    """Train encoder weights on mixed contrastive data.

    Runs epochs ``start_epoch`` through ``config.epochs - 1``, so a resumed
    run reproduces a single longer run exactly (the per-epoch rng streams
    are derived from ``(seed, stream, epoch)``). A non-finite batch loss
    aborts with :class:`NonFiniteLoss`.
    """
    if len(data) == 0:
        raise ValueError("training data is empty")
    params = init_params.copy()
    cache = _FeatureCache(params)
    state = adam_state if adam_state is not None else AdamState.zeros(params)
    stats = ClampStats()
    train_items, val_items = _split(data, config.seed)
    if not train_items:
        raise ValueError("training split is empty; add data or shrink the holdout")
    curve: list[CurveRow] = []

    for epoch in range(start_epoch, config.epochs):
        shuffle_rng = np.random.default_rng([config.seed, _STREAM_SHUFFLE, epoch])
        neg_rng = np.random.default_rng([config.seed, _STREAM_NEGATIVES, epoch])
        order = shuffle_rng.permutation(len(train_items))
        tally = _EpochTally()
        for batch_index, chunk_start in enumerate(range(0, len(order), config.batch_size)):
            chunk = order[chunk_start : chunk_start + config.batch_size]
            batch = [train_items[i] for i in chunk]
            losses, dE, fwd = _batch_terms(
                batch, cache, params, config, neg_rng, stats, want_grad=True
            )
            batch_total = sum(
                w * (sum(vals) / len(vals) if vals else 0.0)
                for w, vals in zip(config.loss_weights, (losses[KIND_SD], losses[KIND_CLEC], losses["bce"]))
            )
            if not np.isfinite(batch_total):
                raise NonFiniteLoss(epoch, batch_index, batch_total)
            tally.add(losses)
            assert dE is not None
            grads = _backward(fwd, params, dE)
            _adam_update(params, grads, state, config)
        curve.append(tally.row(epoch, "train", config.loss_weights))

        if val_items:
            val_rng = np.random.default_rng([config.seed, _STREAM_VAL_NEGATIVES, epoch])
            val_tally = _EpochTally()
            for chunk_start in range(0, len(val_items), config.batch_size):
                batch = val_items[chunk_start : chunk_start + config.batch_size]
                losses, _, _ = _batch_terms(
                    batch, cache, params, config, val_rng, stats, want_grad=False
                )
                val_tally.add(losses)
            curve.append(val_tally.row(epoch, "val", config.loss_weights))
        if epoch % 25 == 0 or epoch == config.epochs - 1:
            logger.debug("epoch %d: train total %.6f", epoch, curve[-1].total)

    return TrainResult(
        params=params,
        curve=curve,
        adam=state,
        clamp_stats=stats,
        epochs_run=config.epochs,
    )


def write_curve_csv(
    path: str | Path, rows: Sequence[CurveRow], weights: tuple[float, float, float]
) -> None:
    """Write the loss curve; term columns appear only for enabled losses."""
    enabled = [name for name, w in zip(("sd", "clec", "bce"), weights) if w > 0]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "split", "loss", *enabled])
        for row in rows:
            values = {"sd": row.sd, "clec": row.clec, "bce": row.bce}
            writer.writerow(
                [row.epoch, row.split, f"{row.total:.10g}"]
                + [f"{values[name]:.10g}" for name in enabled]
            )
