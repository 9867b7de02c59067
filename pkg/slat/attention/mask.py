#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

from typing import Iterable

import numpy as np
from slat.errors import ContractError, DegenerateMaskError, DimensionError


class AttentionMask:
    """
    Boolean ``rows x cols`` matrix; ``allowed[i, j]`` means query ``i``
    may attend to key ``j``. Masks are immutable.

    A usable mask allows at least one entry per row. Constructors do
    not enforce this (an empty global pattern is a legal building block
    for ``union_mask``), ``validate()`` and ``masked_softmax`` do.
    """

    __slots__ = ["rows", "cols", "allowed"]

    def __init__(self, allowed: np.ndarray):
        allowed = np.array(allowed, dtype=bool)
        if allowed.ndim != 2:
            raise DimensionError("AttentionMask", [allowed.shape], "must be 2-D")
        allowed.setflags(write=False)
        self.rows, self.cols = allowed.shape
        self.allowed = allowed

    @property
    def shape(self):
        return self.allowed.shape

    def count(self) -> int:
        return int(self.allowed.sum())

    def empty_rows(self) -> np.ndarray:
        return np.flatnonzero(~self.allowed.any(axis=1))

    def is_valid(self) -> bool:
        return self.empty_rows().size == 0

    def validate(self) -> "AttentionMask":
        empty = self.empty_rows()
        if empty.size:
            raise DegenerateMaskError(empty.tolist())
        return self

    def __eq__(self, other):
        return isinstance(other, AttentionMask) and np.array_equal(
            self.allowed, other.allowed
        )

    def __repr__(self):
        return f"AttentionMask({self.rows}x{self.cols}, allowed={self.count()})"


def full_mask(rows: int, cols: int) -> AttentionMask:
    return AttentionMask(np.ones((rows, cols), dtype=bool))


def band_mask(n: int, half_width: int) -> AttentionMask:
    """
    Local pattern: ``allowed(i, j) <=> |i - j| <= half_width``.
    """
    if n < 1 or half_width < 0:
        raise ContractError(f"band_mask needs n >= 1 and b >= 0, got n={n} b={half_width}")
    idx = np.arange(n)
    return AttentionMask(np.abs(idx[:, None] - idx[None, :]) <= half_width)


def global_mask(n: int, global_nodes: Iterable[int]) -> AttentionMask:
    """
    Global pattern: ``allowed(i, j) <=> i in G or j in G``. Global nodes
    attend everywhere and every position attends to them. An empty ``G``
    yields an all-deny mask.
    """
    nodes = sorted(set(int(g) for g in global_nodes))
    if any(g < 0 or g >= n for g in nodes):
        raise ContractError(f"global nodes {nodes} out of range for length {n}")
    is_global = np.zeros(n, dtype=bool)
    is_global[nodes] = True
    return AttentionMask(is_global[:, None] | is_global[None, :])


def union_mask(a: AttentionMask, b: AttentionMask) -> AttentionMask:
    """
    Elementwise OR. The result must allow an entry in every row.
    """
    if a.shape != b.shape:
        raise DimensionError("union_mask", [a.shape, b.shape])
    return AttentionMask(a.allowed | b.allowed).validate()


def sparse_mask(n: int, half_width: int, num_global: int) -> AttentionMask:
    """
    The pattern used by the encoders: a band of ``half_width`` plus the
    first ``num_global`` positions as global nodes.
    """
    return union_mask(
        band_mask(n, half_width), global_mask(n, range(min(num_global, n)))
    )
