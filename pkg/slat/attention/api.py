#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import math
from typing import Any, Dict, List, Optional

from slat.attention.mask import AttentionMask
from slat.autograd import Tensor, ops
from slat.errors import ConfigError, DimensionError


DEFAULT_MAX_D_MODEL = 64


class MultiHeadConfig:
    """
    Shape of a multi-head attention layer.

    Arguments:
        d_model: embedding width
        heads: number of heads ``h``, must divide ``d_model``
        max_d_model: ceiling on ``d_model`` (low-rank parametrization)
        per_head_scaling: scale scores by ``sqrt(head_dim)`` instead of
            ``sqrt(d_model)``
    """

    __slots__ = ["d_model", "heads", "max_d_model", "per_head_scaling"]

    def __init__(
        self,
        d_model: int,
        heads: int,
        max_d_model: int = DEFAULT_MAX_D_MODEL,
        per_head_scaling: bool = False,
    ):
        if d_model < 1 or heads < 1:
            raise ConfigError(f"d_model and heads must be positive ({d_model}, {heads})")
        if d_model % heads != 0:
            raise ConfigError(f"d_model={d_model} is not divisible by heads={heads}")
        if d_model > max_d_model:
            raise ConfigError(
                f"d_model={d_model} exceeds the low-rank ceiling max_d_model={max_d_model}"
            )
        self.d_model = d_model
        self.heads = heads
        self.max_d_model = max_d_model
        self.per_head_scaling = per_head_scaling

    @property
    def head_dim(self) -> int:
        return self.d_model // self.heads

    @property
    def scale_dim(self) -> int:
        return self.head_dim if self.per_head_scaling else self.d_model

    def to_dict(self) -> Dict[str, Any]:
        return {s: getattr(self, s) for s in self.__slots__}


class MultiHeadWeights:
    """
    Per-head projections ``query[i], key[i], value[i]`` of shape
    ``d_model x head_dim`` and the output projection
    ``(heads * head_dim) x d_model``.
    """

    __slots__ = ["query", "key", "value", "output"]

    def __init__(
        self,
        query: List[Tensor],
        key: List[Tensor],
        value: List[Tensor],
        output: Tensor,
    ):
        if not (len(query) == len(key) == len(value)):
            raise DimensionError(
                "MultiHeadWeights", [(len(query),), (len(key),), (len(value),)]
            )
        self.query = list(query)
        self.key = list(key)
        self.value = list(value)
        self.output = output

    def named_parameters(self, prefix: str = ""):
        for i in range(len(self.query)):
            yield f"{prefix}head{i}.query", self.query[i]
            yield f"{prefix}head{i}.key", self.key[i]
            yield f"{prefix}head{i}.value", self.value[i]
        yield f"{prefix}output", self.output


def attention(
    q: Tensor,
    k: Tensor,
    v: Tensor,
    mask: AttentionMask,
    scale_dim: Optional[int] = None,
) -> Tensor:
    r"""
    ``masked_softmax(q @ k^T / sqrt(scale_dim), mask) @ v``.

    ``scale_dim`` defaults to the width of ``q``.

    Arguments:
        q: ``[..., L_q, D]``
        k: ``[..., L_k, D]``
        v: ``[..., L_k, D_v]``
        mask: ``L_q x L_k``
    """
    if q.shape[-1] != k.shape[-1] or k.shape[-2] != v.shape[-2]:
        raise DimensionError("attention", [q.shape, k.shape, v.shape])
    d = scale_dim if scale_dim is not None else q.shape[-1]
    scores = ops.scale(ops.matmul(q, ops.transpose(k)), 1.0 / math.sqrt(d))
    return ops.matmul(ops.masked_softmax(scores, mask), v)


def multi_head(
    q: Tensor,
    k: Tensor,
    v: Tensor,
    cfg: MultiHeadConfig,
    mask: AttentionMask,
    weights: MultiHeadWeights,
) -> Tensor:
    r"""
    Projects ``q, k, v`` per head, attends, concatenates the head outputs
    and projects them back to ``d_model``. The query sequence length is
    preserved.
    """
    for x in (q, k, v):
        if x.shape[-1] != cfg.d_model:
            raise DimensionError("multi_head", [q.shape, k.shape, v.shape])
    if len(weights.query) != cfg.heads:
        raise DimensionError(
            "multi_head", [(len(weights.query),), (cfg.heads,)], "head count"
        )
    proj_shape = (cfg.d_model, cfg.head_dim)
    out_shape = (cfg.heads * cfg.head_dim, cfg.d_model)
    if weights.output.shape != out_shape or any(
        w.shape != proj_shape for w in weights.query + weights.key + weights.value
    ):
        raise DimensionError(
            "multi_head",
            [weights.query[0].shape, weights.output.shape, proj_shape, out_shape],
        )

    heads = [
        attention(
            ops.matmul(q, wq),
            ops.matmul(k, wk),
            ops.matmul(v, wv),
            mask,
            scale_dim=cfg.scale_dim,
        )
        for wq, wk, wv in zip(weights.query, weights.key, weights.value)
    ]
    return ops.matmul(ops.concat(heads, axis=-1), weights.output)
