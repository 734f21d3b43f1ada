"""Tests for the central-difference gradient checker."""

from __future__ import annotations

import numpy as np
import pytest

from polyhop.training.gradcheck import gradient_check
from polyhop.training.losses import loss_sd_grad, triplet_margin


def quadratic(params):
    x = params["x"]
    return float(x @ x), {"x": 2.0 * x}


def test_quadratic_error_tiny():
    rng = np.random.default_rng(0)
    worst = gradient_check(quadratic, {"x": np.linspace(-2, 2, 7)}, 40, rng)
    assert worst < 1e-7


def test_wrong_gradient_detected():
    def broken(params):
        x = params["x"]
        return float(x @ x), {"x": 3.0 * x}  # deliberately off by 1.5x

    rng = np.random.default_rng(0)
    worst = gradient_check(broken, {"x": np.linspace(0.5, 2, 5)}, 20, rng)
    assert worst > 0.1


def test_clamped_hinge_has_zero_error():
    # pre-hinge value far below zero: loss and gradient both identically 0
    params = {
        "a": np.array([0.0, 0.0]),
        "p": np.array([0.1, 0.0]),
        "n": np.array([5.0, 0.0]),
    }

    def fn(values):
        loss, (ga, gp, gn) = loss_sd_grad(values["a"], values["p"], values["n"], margin=1.0)
        return loss, {"a": ga, "p": gp, "n": gn}

    rng = np.random.default_rng(1)
    worst = gradient_check(fn, params, 30, rng)
    assert worst == 0.0


def test_kink_probes_are_redrawn():
    # |x| has a kink at 0; coordinate 0 sits so close that its minus-side
    # probe crosses the guard band and must be redrawn, while probes on
    # the remaining coordinates are accepted
    def absval(params):
        x = params["x"]
        return float(np.sum(np.abs(x))), {"x": np.sign(x)}

    margin_calls = {"n": 0}

    def margins(values):
        margin_calls["n"] += 1
        return values["x"]

    params = {"x": np.array([1.05e-3, 1.0, -1.0, 2.0])}
    rng = np.random.default_rng(2)
    worst = gradient_check(absval, params, 30, rng, kink_margins=margins)
    assert worst < 1e-7
    # each accepted probe checks margins twice; redraws add extra checks
    assert margin_calls["n"] > 2 * 30


def test_kink_exhaustion_raises():
    def absval(params):
        x = params["x"]
        return float(np.sum(np.abs(x))), {"x": np.sign(x)}

    # every coordinate sits on the kink, so no probe can ever be accepted
    params = {"x": np.zeros(3)}
    rng = np.random.default_rng(3)
    with pytest.raises(RuntimeError):
        gradient_check(absval, params, 5, rng, kink_margins=lambda values: values["x"])


def test_probe_count_validated():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        gradient_check(quadratic, {"x": np.ones(3)}, 0, rng)


def test_hinge_margin_filter_with_triplet():
    # random triplets, probes kept away from the hinge via the margin hook
    rng = np.random.default_rng(4)
    params = {
        "a": rng.normal(size=6),
        "p": rng.normal(size=6),
        "n": rng.normal(size=6),
    }

    def fn(values):
        loss, (ga, gp, gn) = loss_sd_grad(values["a"], values["p"], values["n"], margin=1.0)
        return loss, {"a": ga, "p": gp, "n": gn}

    def margins(values):
        return np.array([triplet_margin(values["a"], values["p"], values["n"], margin=1.0)])

    worst = gradient_check(fn, params, 50, rng, kink_margins=margins)
    assert worst < 1e-4
