"""Encoder training: contrastive losses, hard negatives, Adam, checking."""

from __future__ import annotations

from .data import (
    BcePair,
    EntityPool,
    TrainingData,
    TripletExample,
    generate_hard_negative,
    load_training_jsonl,
    save_training_jsonl,
)
from .losses import (
    ClampStats,
    distance,
    loss_bce,
    loss_bce_grad,
    loss_clec,
    loss_clec_grad,
    loss_sd,
    loss_sd_grad,
    total_loss,
    triplet_margin,
)
from .gradcheck import gradient_check
from .trainer import AdamState, CurveRow, TrainConfig, TrainResult, train, write_curve_csv

__all__ = [
    "TripletExample",
    "BcePair",
    "TrainingData",
    "EntityPool",
    "generate_hard_negative",
    "load_training_jsonl",
    "save_training_jsonl",
    "distance",
    "triplet_margin",
    "loss_sd",
    "loss_sd_grad",
    "loss_clec",
    "loss_clec_grad",
    "loss_bce",
    "loss_bce_grad",
    "total_loss",
    "ClampStats",
    "gradient_check",
    "TrainConfig",
    "TrainResult",
    "AdamState",
    "CurveRow",
    "train",
    "write_curve_csv",
]
