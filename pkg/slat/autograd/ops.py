#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

"""
Differentiable operations on ``Tensor``.

Matrix operations act on the last two axes. Any leading axes are batch
axes: a 2-D weight multiplies every matrix of a batch and receives the
sum of the per-item gradients. Elementwise operations follow numpy
broadcasting. Nothing else is broadcast.
"""

import builtins
import math
from typing import List, Optional, Sequence, Union

import numpy as np
from slat.autograd.tensor import Tensor, make_result
from slat.errors import ContractError, DegenerateMaskError, DimensionError


DEFAULT_LN_EPS = 1e-12


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _swap(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a, -1, -2)


def _broadcast_shape(op: str, a: Tensor, b: Tensor):
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise DimensionError(op, [a.shape, b.shape])


def add(a: Tensor, b: Tensor) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape("add", a, b)
    return make_result("add", (a, b), a.data + b.data, lambda g: (g, g))


def subtract(a: Tensor, b: Tensor) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape("subtract", a, b)
    return make_result("subtract", (a, b), a.data - b.data, lambda g: (g, -g))


def multiply(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise (Hadamard) product."""
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape("multiply", a, b)
    return make_result(
        "multiply", (a, b), a.data * b.data, lambda g: (g * b.data, g * a.data)
    )


def scale(x: Tensor, factor: float) -> Tensor:
    return make_result("scale", (x,), x.data * factor, lambda g: (g * factor,))


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """
    Matrix product over the last two axes: ``[..., m, k] @ [..., k, n]``.
    """
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise DimensionError("matmul", [a.shape, b.shape])
    try:
        out = np.matmul(a.data, b.data)
    except ValueError:
        raise DimensionError("matmul", [a.shape, b.shape], "batch axes differ")

    def _backward(g):
        ga = np.matmul(g, _swap(b.data)) if a.requires_grad else None
        gb = np.matmul(_swap(a.data), g) if b.requires_grad else None
        return ga, gb

    return make_result("matmul", (a, b), out, _backward)


def transpose(x: Tensor) -> Tensor:
    """Swaps the last two axes."""
    if x.ndim < 2:
        raise DimensionError("transpose", [x.shape], "need at least 2 axes")
    return make_result(
        "transpose", (x,), np.ascontiguousarray(_swap(x.data)), lambda g: (_swap(g),)
    )


def affine(x: Tensor, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    """``x @ weight + bias``."""
    if weight.ndim != 2:
        raise DimensionError("affine", [x.shape, weight.shape], "weight must be 2-D")
    if bias is not None and bias.shape != (weight.shape[1],):
        raise DimensionError("affine", [weight.shape, bias.shape])
    y = matmul(x, weight)
    return add(y, bias) if bias is not None else y


def relu(x: Tensor) -> Tensor:
    """``max(0, x)`` elementwise. The subgradient at exactly 0 is 0."""
    positive = x.data > 0
    return make_result(
        "relu", (x,), np.where(positive, x.data, 0.0), lambda g: (g * positive,)
    )


def sum(x: Tensor, axis: Optional[int] = None) -> Tensor:
    out = x.data.sum(axis=axis)

    def _backward(g):
        if axis is None:
            return (np.broadcast_to(g, x.shape),)
        return (np.broadcast_to(np.expand_dims(g, axis), x.shape),)

    return make_result("sum", (x,), out, _backward)


def mean(x: Tensor, axis: Optional[int] = None) -> Tensor:
    n = x.size if axis is None else x.shape[axis]
    return scale(sum(x, axis), 1.0 / n)


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    try:
        out = x.data.reshape(tuple(shape))
    except ValueError:
        raise DimensionError("reshape", [x.shape, tuple(shape)])
    return make_result("reshape", (x,), out, lambda g: (g.reshape(x.shape),))


def flatten(x: Tensor) -> Tensor:
    """Merges the last two axes: ``[..., r, c] -> [..., r * c]``."""
    if x.ndim < 2:
        raise DimensionError("flatten", [x.shape], "need at least 2 axes")
    return reshape(x, x.shape[:-2] + (x.shape[-2] * x.shape[-1],))


def concat(parts: Sequence[Tensor], axis: int = 0) -> Tensor:
    """
    Joins ``parts`` along ``axis``. All other dimensions must agree.
    A single part is returned as an identical (new) tensor.
    """
    if not parts:
        raise ContractError("concat needs at least one part")
    ndim = parts[0].ndim
    ax = axis if axis >= 0 else axis + ndim
    if not 0 <= ax < ndim:
        raise DimensionError("concat", [p.shape for p in parts], f"bad axis {axis}")
    for p in parts:
        if p.ndim != ndim or any(
            p.shape[i] != parts[0].shape[i] for i in range(ndim) if i != ax
        ):
            raise DimensionError("concat", [q.shape for q in parts])
    sizes = [p.shape[ax] for p in parts]
    bounds = np.cumsum(sizes)[:-1]
    out = np.concatenate([p.data for p in parts], axis=ax)
    return make_result(
        "concat", tuple(parts), out, lambda g: tuple(np.split(g, bounds, axis=ax))
    )


def narrow(x: Tensor, axis: int, start: int, length: int) -> Tensor:
    """Slice ``[start, start + length)`` of ``axis``."""
    ax = axis if axis >= 0 else axis + x.ndim
    if not 0 <= start <= start + length <= x.shape[ax]:
        raise DimensionError("narrow", [x.shape], f"slice {start}:{start + length}")
    index = [slice(None)] * x.ndim
    index[ax] = slice(start, start + length)
    index = tuple(index)

    def _backward(g):
        full = np.zeros_like(x.data)
        full[index] = g
        return (full,)

    return make_result("narrow", (x,), np.ascontiguousarray(x.data[index]), _backward)


def split(x: Tensor, sizes: Sequence[int], axis: int = 0) -> List[Tensor]:
    """Inverse of ``concat``: cuts ``x`` into consecutive pieces of ``sizes``."""
    ax = axis if axis >= 0 else axis + x.ndim
    if builtins.sum(sizes) != x.shape[ax]:
        raise DimensionError("split", [x.shape], f"sizes {list(sizes)}")
    parts, start = [], 0
    for n in sizes:
        parts.append(narrow(x, ax, start, n))
        start += n
    return parts


def _allowed(mask) -> np.ndarray:
    allowed = getattr(mask, "allowed", mask)
    return np.asarray(allowed, dtype=bool)


def masked_softmax(scores: Tensor, mask) -> Tensor:
    r"""
    Row-wise softmax restricted to the entries allowed by ``mask``.

    Denied entries are never exponentiated and come out as exactly 0.
    Each row is stabilized by subtracting the maximum over its allowed
    entries, so changing a denied score never changes the result.

    Arguments:
        scores: ``[..., r, c]``
        mask: ``AttentionMask`` (or boolean array) of shape ``[r, c]``

    Raises:
        DimensionError: mask and scores disagree in shape
        DegenerateMaskError: some row has no allowed entry
    """
    allowed = _allowed(mask)
    if scores.ndim < 2 or allowed.shape != scores.shape[-2:]:
        raise DimensionError("masked_softmax", [scores.shape, allowed.shape])
    empty = np.flatnonzero(~allowed.any(axis=1))
    if empty.size:
        raise DegenerateMaskError(empty.tolist())

    row_max = np.where(allowed, scores.data, -np.inf).max(axis=-1, keepdims=True)
    shifted = np.where(allowed, scores.data - row_max, 0.0)
    e = np.where(allowed, np.exp(shifted), 0.0)
    p = e / e.sum(axis=-1, keepdims=True)

    def _backward(g):
        return (p * (g - (g * p).sum(axis=-1, keepdims=True)),)

    return make_result("masked_softmax", (scores,), p, _backward)


def layer_norm(
    x: Tensor, gain: Tensor, bias: Tensor, eps: float = DEFAULT_LN_EPS
) -> Tensor:
    r"""
    Normalizes every row (last axis) of ``x`` to zero mean and unit
    (population) variance, then applies ``gain`` and ``bias``.
    """
    c = x.shape[-1]
    if c < 2:
        raise DimensionError("layer_norm", [x.shape], "need at least 2 columns")
    if gain.shape != (c,) or bias.shape != (c,):
        raise DimensionError("layer_norm", [x.shape, gain.shape, bias.shape])

    mu = x.data.mean(axis=-1, keepdims=True)
    centered = x.data - mu
    var = (centered * centered).mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = centered * inv_std
    out = xhat * gain.data + bias.data

    def _backward(g):
        dxhat = g * gain.data
        dx = inv_std * (
            dxhat
            - dxhat.mean(axis=-1, keepdims=True)
            - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)
        )
        return dx, g * xhat, g

    return make_result("layer_norm", (x, gain, bias), out, _backward)


def _target_array(pred: Tensor, target) -> np.ndarray:
    t = target.data if isinstance(target, Tensor) else np.asarray(target, np.float64)
    if t.shape != pred.shape:
        raise DimensionError("loss", [pred.shape, t.shape])
    return t


def mse_loss(pred: Tensor, target: Union[Tensor, np.ndarray]) -> Tensor:
    """Mean squared error; ``target`` is treated as a constant."""
    t = _target_array(pred, target)
    diff = pred.data - t
    n = diff.size
    return make_result(
        "mse_loss", (pred,), np.array((diff * diff).mean()), lambda g: (g * 2.0 * diff / n,)
    )


def rmse_loss(pred: Tensor, target: Union[Tensor, np.ndarray]) -> Tensor:
    """
    Root of the mean squared error; ``target`` is treated as a constant.
    The gradient at a perfect fit (loss 0) is defined as 0.
    """
    t = _target_array(pred, target)
    diff = pred.data - t
    n = diff.size
    value = math.sqrt(float((diff * diff).mean()))

    def _backward(g):
        if value == 0.0:
            return (np.zeros_like(diff),)
        return (g * diff / (n * value),)

    return make_result("rmse_loss", (pred,), np.array(value), _backward)

