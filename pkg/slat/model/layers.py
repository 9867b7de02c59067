#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import math
from collections import OrderedDict
from typing import Dict, Iterator, List, Tuple

import numpy as np
from slat.attention import AttentionMask, MultiHeadConfig, MultiHeadWeights, multi_head
from slat.autograd import Tensor, ops


class Module:
    """
    Container of named parameters and child modules. Parameter order
    is registration order (depth first), which makes initialization and
    checkpoint layout a pure function of the architecture.
    """

    def __init__(self):
        self._params: "OrderedDict[str, Tensor]" = OrderedDict()
        # name -> ("uniform", fan_in) | ("ones",) | ("zeros",)
        self._init: Dict[str, Tuple] = {}
        self._children: "OrderedDict[str, Module]" = OrderedDict()

    def register_parameter(
        self, name: str, shape: Tuple[int, ...], init: str = "uniform", fan_in: int = 0
    ) -> Tensor:
        t = Tensor(np.zeros(shape), requires_grad=True, name=name)
        self._params[name] = t
        self._init[name] = (init, fan_in)
        return t

    def register_module(self, name: str, module: "Module") -> "Module":
        self._children[name] = module
        return module

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Tensor]]:
        for name, t in self._params.items():
            yield prefix + name, t
        for cname, child in self._children.items():
            yield from child.named_parameters(f"{prefix}{cname}.")

    def parameters(self) -> List[Tensor]:
        return [t for _, t in self.named_parameters()]

    def num_parameters(self) -> int:
        return sum(t.size for t in self.parameters())

    def zero_grad(self):
        for t in self.parameters():
            t.zero_grad()

    def reset_parameters(self, rng: np.random.Generator):
        """
        Weights are drawn from ``U(-1/sqrt(fan_in), 1/sqrt(fan_in))``,
        norm gains start at 1 and norm biases at 0.
        """
        for name, t in self._params.items():
            kind, fan_in = self._init[name]
            if kind == "uniform":
                bound = 1.0 / math.sqrt(fan_in)
                t.data[...] = rng.uniform(-bound, bound, size=t.shape)
            elif kind == "ones":
                t.data[...] = 1.0
            else:
                t.data[...] = 0.0
        for child in self._children.values():
            child.reset_parameters(rng)


class Linear(Module):
    def __init__(self, in_features: int, out_features: int, bias: bool = True):
        super().__init__()
        self.weight = self.register_parameter(
            "weight", (in_features, out_features), fan_in=in_features
        )
        self.bias = (
            self.register_parameter("bias", (out_features,), fan_in=in_features)
            if bias
            else None
        )

    def __call__(self, x: Tensor) -> Tensor:
        return ops.affine(x, self.weight, self.bias)


class LayerNorm(Module):
    def __init__(self, width: int, eps: float):
        super().__init__()
        self.eps = eps
        self.gain = self.register_parameter("gain", (width,), init="ones")
        self.bias = self.register_parameter("bias", (width,), init="zeros")

    def __call__(self, x: Tensor) -> Tensor:
        return ops.layer_norm(x, self.gain, self.bias, self.eps)


class FeedForward(Module):
    """``max(0, x W1 + b1) W2 + b2``"""

    def __init__(self, d_model: int, hidden: int):
        super().__init__()
        self.fc1 = self.register_module("fc1", Linear(d_model, hidden))
        self.fc2 = self.register_module("fc2", Linear(hidden, d_model))

    def __call__(self, x: Tensor) -> Tensor:
        return self.fc2(ops.relu(self.fc1(x)))


class MultiHeadAttention(Module):
    def __init__(self, cfg: MultiHeadConfig):
        super().__init__()
        self.cfg = cfg
        d, hd = cfg.d_model, cfg.head_dim
        query, key, value = [], [], []
        for i in range(cfg.heads):
            query.append(self.register_parameter(f"head{i}.query", (d, hd), fan_in=d))
            key.append(self.register_parameter(f"head{i}.key", (d, hd), fan_in=d))
            value.append(self.register_parameter(f"head{i}.value", (d, hd), fan_in=d))
        output = self.register_parameter(
            "output", (cfg.heads * hd, d), fan_in=cfg.heads * hd
        )
        self.weights = MultiHeadWeights(query, key, value, output)

    def __call__(
        self, q: Tensor, k: Tensor, v: Tensor, mask: AttentionMask
    ) -> Tensor:
        return multi_head(q, k, v, self.cfg, mask, self.weights)


class EncoderBlock(Module):
    """
    Pre-LN encoder block::

      x = x + MHA(LN(x))
      x = x + FFN(LN(x))

    ``pre_norm=False`` drops both normalizations (used to check that
    they matter).
    """

    def __init__(
        self, cfg: MultiHeadConfig, ffn_hidden: int, eps: float, pre_norm: bool = True
    ):
        super().__init__()
        self.pre_norm = pre_norm
        self.norm1 = self.register_module("norm1", LayerNorm(cfg.d_model, eps))
        self.attn = self.register_module("attn", MultiHeadAttention(cfg))
        self.norm2 = self.register_module("norm2", LayerNorm(cfg.d_model, eps))
        self.ffn = self.register_module("ffn", FeedForward(cfg.d_model, ffn_hidden))

    def _norm(self, norm: LayerNorm, x: Tensor) -> Tensor:
        return norm(x) if self.pre_norm else x

    def __call__(self, x: Tensor, mask: AttentionMask) -> Tensor:
        h = self._norm(self.norm1, x)
        x = ops.add(x, self.attn(h, h, h, mask))
        h = self._norm(self.norm2, x)
        return ops.add(x, self.ffn(h))


class DecoderBlock(Module):
    """
    Pre-LN decoder block::

      y = y + SelfMHA(LN(y))
      y = y + CrossMHA(LN(y), memory, memory)
      y = y + FFN(LN(y))

    Queries of the cross-attention come from the decoder state, keys
    and values from the fused encoder feature map ``memory``.
    """

    def __init__(self, cfg: MultiHeadConfig, ffn_hidden: int, eps: float):
        super().__init__()
        self.norm1 = self.register_module("norm1", LayerNorm(cfg.d_model, eps))
        self.self_attn = self.register_module("self_attn", MultiHeadAttention(cfg))
        self.norm2 = self.register_module("norm2", LayerNorm(cfg.d_model, eps))
        self.cross_attn = self.register_module("cross_attn", MultiHeadAttention(cfg))
        self.norm3 = self.register_module("norm3", LayerNorm(cfg.d_model, eps))
        self.ffn = self.register_module("ffn", FeedForward(cfg.d_model, ffn_hidden))

    def __call__(
        self,
        y: Tensor,
        memory: Tensor,
        self_mask: AttentionMask,
        cross_mask: AttentionMask,
    ) -> Tensor:
        h = self.norm1(y)
        y = ops.add(y, self.self_attn(h, h, h, self_mask))
        h = self.norm2(y)
        y = ops.add(y, self.cross_attn(h, memory, memory, cross_mask))
        h = self.norm3(y)
        return ops.add(y, self.ffn(h))
