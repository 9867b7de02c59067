#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import math
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from slat.autograd import Tensor
from slat.errors import ConfigError, ContractError, DimensionError


def noam_lr(step: int, d_model: int, warmup: int, factor: float = 1.0) -> float:
    r"""
    Warm-up schedule::

      lr = factor * d_model^-0.5 * min(step^-0.5, step * warmup^-1.5)

    Rises linearly for ``step < warmup``, peaks at ``step == warmup`` and
    decays with the inverse square root of the step afterwards.
    """
    if step < 1:
        raise ContractError(f"noam_lr is defined for step >= 1, got {step}")
    if d_model < 1 or warmup < 1:
        raise ConfigError(f"d_model and warmup must be positive ({d_model}, {warmup})")
    return factor * d_model ** -0.5 * min(step ** -0.5, step * warmup ** -1.5)


class AdamState:
    """First and second moment estimates of one parameter."""

    __slots__ = ["exp_avg", "exp_avg_sq"]

    def __init__(self, shape):
        self.exp_avg = np.zeros(shape)
        self.exp_avg_sq = np.zeros(shape)


def adam_step(
    params: Sequence[np.ndarray],
    grads: Sequence[Optional[np.ndarray]],
    states: Sequence[AdamState],
    step: int,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.98,
    eps: float = 1e-9,
):
    r"""
    One bias-corrected Adam update, in place::

      m = b1 m + (1 - b1) g
      v = b2 v + (1 - b2) g^2
      p -= lr / (1 - b1^t) * m / (sqrt(v) / sqrt(1 - b2^t) + eps)

    Parameters whose gradient is ``None`` are left alone.
    """
    if step < 1:
        raise ContractError(f"adam step count starts at 1, got {step}")
    bias_correction1 = 1.0 - beta1 ** step
    bias_correction2_sqrt = math.sqrt(1.0 - beta2 ** step)
    step_size = lr / bias_correction1
    for p, g, s in zip(params, grads, states):
        if g is None:
            continue
        if g.shape != p.shape:
            raise DimensionError("adam_step", [p.shape, g.shape])
        s.exp_avg *= beta1
        s.exp_avg += (1.0 - beta1) * g
        s.exp_avg_sq *= beta2
        s.exp_avg_sq += (1.0 - beta2) * g * g
        denom = np.sqrt(s.exp_avg_sq) / bias_correction2_sqrt + eps
        p -= step_size * (s.exp_avg / denom)


class Adam:
    """
    Adam over a list of parameter tensors. ``step()`` consumes the
    ``grad`` buffers populated by ``backward``.
    """

    def __init__(
        self,
        params: Sequence[Tensor],
        lr: float = 1e-3,
        betas=(0.9, 0.98),
        eps: float = 1e-9,
    ):
        beta1, beta2 = betas
        if not (0.0 < beta1 < 1.0 and 0.0 < beta2 < 1.0):
            raise ConfigError(f"Adam betas must lie in (0, 1), got {betas}")
        if eps <= 0:
            raise ConfigError(f"Adam eps must be positive, got {eps}")
        self.params: List[Tensor] = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.states = [AdamState(p.shape) for p in self.params]

    def zero_grad(self):
        for p in self.params:
            p.zero_grad()

    def step(self):
        self.step_count += 1
        adam_step(
            [p.data for p in self.params],
            [p.grad for p in self.params],
            self.states,
            self.step_count,
            self.lr,
            self.beta1,
            self.beta2,
            self.eps,
        )

    def state_dict(self) -> Dict[str, Any]:
        return {
            "step_count": self.step_count,
            "lr": self.lr,
            "exp_avg": [s.exp_avg.copy() for s in self.states],
            "exp_avg_sq": [s.exp_avg_sq.copy() for s in self.states],
        }

    def load_state_dict(self, state: Dict[str, Any]):
        if len(state["exp_avg"]) != len(self.states):
            raise ContractError("optimizer state does not match the parameters")
        self.step_count = state["step_count"]
        self.lr = state["lr"]
        for s, m, v in zip(self.states, state["exp_avg"], state["exp_avg_sq"]):
            s.exp_avg = np.array(m, dtype=np.float64)
            s.exp_avg_sq = np.array(v, dtype=np.float64)


class NoamOpt:
    """
    Optimizer wrapper that sets the learning rate from ``noam_lr`` before
    every step.
    """

    def __init__(self, optimizer: Adam, d_model: int, warmup: int, factor: float = 1.0):
        self.optimizer = optimizer
        self.d_model = d_model
        self.warmup = warmup
        self.factor = factor
        self._step = 0
        self._rate = 0.0

    def rate(self, step: Optional[int] = None) -> float:
        return noam_lr(step or self._step, self.d_model, self.warmup, self.factor)

    def step(self):
        self._step += 1
        self._rate = self.rate()
        self.optimizer.lr = self._rate
        self.optimizer.step()

    @property
    def last_lr(self) -> float:
        return self._rate

    def zero_grad(self):
        self.optimizer.zero_grad()

    def state_dict(self) -> Dict[str, Any]:
        return {"step": self._step, "rate": self._rate}

    def load_state_dict(self, state: Dict[str, Any]):
        self._step = state["step"]
        self._rate = state["rate"]
