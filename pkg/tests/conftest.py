from __future__ import annotations

import numpy as np
import pytest

from rationale_lab import network


def finite_difference_grads(
    params: network.ModelParams,
    x: np.ndarray,
    y: np.ndarray,
    step: float = 1e-5,
) -> network.ModelParams:
    """Central-difference loss gradients, the oracle for backpropagation."""
    grads = params.zeros_like()
    for arrays, out in ((params.weights, grads.weights), (params.biases, grads.biases)):
        for a, g in zip(arrays, out):
            it = np.nditer(a, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                original = a[idx]
                a[idx] = original + step
                loss_plus, _ = network.loss_and_grads(params, x, y)
                a[idx] = original - step
                loss_minus, _ = network.loss_and_grads(params, x, y)
                a[idx] = original
                g[idx] = (loss_plus - loss_minus) / (2 * step)
    return grads


def max_relative_error(got: network.ModelParams, want: network.ModelParams) -> float:
    """max |got - want| / max(1, |want|) over every parameter entry."""
    worst = 0.0
    for a, b in zip(got.weights + got.biases, want.weights + want.biases):
        worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b)))))
    return worst


@pytest.fixture(scope="session")
def tort_schema():
    from rationale_lab import build_domain

    return build_domain("tort")


@pytest.fixture(scope="session")
def welfare_schema():
    from rationale_lab import build_domain

    return build_domain("welfare")


@pytest.fixture(scope="session")
def simplified_schema():
    from rationale_lab import build_domain

    return build_domain("simplified")
