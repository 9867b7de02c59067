#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

from typing import Sequence, Tuple


class SlatError(Exception):
    """
    Base class of every error raised by slat. The command line tool
    converts these into a JSON error record on stderr.
    """

    pass


class DimensionError(SlatError):
    """
    Raised when the shapes of the operands of a tensor operation
    do not agree. The message names every offending shape.
    """

    __slots__ = ["op", "shapes"]

    def __init__(self, op: str, shapes: Sequence[Tuple[int, ...]], msg: str = ""):
        shapes_str = ", ".join(str(tuple(s)) for s in shapes)
        detail = f": {msg}" if msg else ""
        super().__init__(f"{op}: incompatible shapes {shapes_str}{detail}")
        self.op = op
        self.shapes = [tuple(s) for s in shapes]


class DegenerateMaskError(SlatError):
    """
    Raised when an attention mask has rows without any allowed entry.
    Softmax over such a row is undefined, it is never silently replaced
    by a uniform distribution.
    """

    __slots__ = ["rows"]

    def __init__(self, rows: Sequence[int]):
        rows = list(rows)
        shown = rows[:10]
        more = f" (+{len(rows) - len(shown)} more)" if len(rows) > len(shown) else ""
        super().__init__(f"attention mask rows {shown}{more} allow no entry")
        self.rows = rows


class ContractError(SlatError):
    """
    Raised when a caller violates the precondition of an operation
    (e.g. backward on a non-scalar loss, step number 0).
    """

    pass


class ConfigError(SlatError):
    """
    Raised for invalid configuration values.
    """

    pass


class DivergenceError(SlatError):
    """
    Raised by the trainer when the loss stops being finite.
    """

    __slots__ = ["epoch", "step", "loss", "lr"]

    def __init__(self, epoch: int, step: int, loss: float, lr: float):
        super().__init__(
            f"training diverged at epoch {epoch}, step {step}:"
            f" loss={loss} (lr={lr:.6g})"
        )
        self.epoch = epoch
        self.step = step
        self.loss = loss
        self.lr = lr


class CheckpointError(SlatError):
    """
    Raised when a checkpoint file cannot be decoded.
    """

    pass
