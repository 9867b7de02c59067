#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

from typing import Callable, Dict, Sequence

import numpy as np
from slat.autograd.tensor import Tape, Tensor, backward


def numerical_grad(
    fn: Callable[[], Tensor], t: Tensor, eps: float = 1e-5
) -> np.ndarray:
    """
    Central finite differences of the scalar ``fn()`` with respect to
    every element of ``t``. ``t.data`` is perturbed in place and restored.
    """
    grad = np.zeros_like(t.data)
    flat = t.data.reshape(-1)
    out = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        f_plus = fn().item()
        flat[i] = orig - eps
        f_minus = fn().item()
        flat[i] = orig
        out[i] = (f_plus - f_minus) / (2.0 * eps)
    return grad


def analytic_grads(fn: Callable[[], Tensor], inputs: Sequence[Tensor]) -> Dict[int, np.ndarray]:
    for t in inputs:
        t.zero_grad()
    with Tape() as tape:
        loss = fn()
    backward(loss, tape)
    return {
        id(t): (t.grad if t.grad is not None else np.zeros_like(t.data))
        for t in inputs
    }


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-3) -> float:
    """
    Largest elementwise ``|a - n| / max(|a|, |n|, floor)``. The floor
    keeps near-zero gradients from turning rounding noise into huge
    relative errors.
    """
    if analytic.size == 0:
        return 0.0
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / denom))


def gradcheck(
    fn: Callable[[], Tensor],
    inputs: Sequence[Tensor],
    eps: float = 1e-5,
    floor: float = 1e-3,
) -> float:
    r"""
    Compares reverse-mode gradients of the scalar ``fn()`` against
    central finite differences for every tensor in ``inputs`` and returns
    the maximum relative error over all elements.

    ``fn`` must rebuild its graph from the current ``data`` of ``inputs``
    on every call.
    """
    grads = analytic_grads(fn, inputs)
    worst = 0.0
    for t in inputs:
        numeric = numerical_grad(fn, t, eps)
        worst = max(worst, relative_error(grads[id(t)], numeric, floor))
    return worst
