"""Central-difference verification of analytic gradients."""

from __future__ import annotations

from typing import Callable, Mapping

import numpy as np

LossAndGrad = Callable[[Mapping[str, np.ndarray]], tuple[float, dict[str, np.ndarray]]]

_KINK_TOL = 1e-3
_REL_FLOOR = 1e-8


def gradient_check(
    loss_and_grad: LossAndGrad,
    params: Mapping[str, np.ndarray],
    probe_count: int,
    rng: np.random.Generator,
    step: float = 1e-4,
    kink_margins: Callable[[Mapping[str, np.ndarray]], np.ndarray] | None = None,
) -> float:
    """Probe random coordinates and return the worst relative error.

    For each probe a single coordinate is shifted by +/-``step`` and the
    central difference is compared against the analytic gradient as
    ``|a - n| / max(|a|, |n|, 1e-8)``. When ``kink_margins`` is given, a
    probe whose perturbed points land within 1e-3 of a hinge kink is
    redrawn, since the difference quotient is meaningless across the
    kink.
    """
    if probe_count < 1:
        raise ValueError("probe_count must be positive")
    names = sorted(params)
    sizes = np.array([params[name].size for name in names], dtype=np.float64)
    if sizes.sum() == 0:
        raise ValueError("params must contain at least one coordinate")
    base = {name: np.array(params[name], dtype=np.float64) for name in names}
    _, grads = loss_and_grad(base)

    worst = 0.0
    probes_done = 0
    attempts = 0
    max_attempts = probe_count * 50
    while probes_done < probe_count:
        attempts += 1
        if attempts > max_attempts:
            raise RuntimeError("could not find enough probes away from hinge kinks")
        name = names[int(rng.choice(len(names), p=sizes / sizes.sum()))]
        flat_index = int(rng.integers(params[name].size))

        original = base[name].flat[flat_index]
        base[name].flat[flat_index] = original + step
        if kink_margins is not None and np.any(np.abs(kink_margins(base)) < _KINK_TOL):
            base[name].flat[flat_index] = original
            continue
        loss_plus, _ = loss_and_grad(base)
        base[name].flat[flat_index] = original - step
        if kink_margins is not None and np.any(np.abs(kink_margins(base)) < _KINK_TOL):
            base[name].flat[flat_index] = original
            continue
        loss_minus, _ = loss_and_grad(base)
        base[name].flat[flat_index] = original

        numeric = (loss_plus - loss_minus) / (2.0 * step)
        analytic = float(grads[name].flat[flat_index])
        rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric), _REL_FLOOR)
        worst = max(worst, rel)
        probes_done += 1
    return worst
