#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

from typing import Any, Dict, List, Sequence

import numpy as np
from slat.data.series import RunToFailureSeries
from slat.errors import ContractError, DimensionError
from slat.utils.logging import get_logger


log = get_logger()


class ScalerParams:
    """
    Per-channel minimum and maximum of the training split. A channel
    with ``maximum == minimum`` is constant and scales to 0.
    """

    __slots__ = ["minimum", "maximum"]

    def __init__(self, minimum: Sequence[float], maximum: Sequence[float]):
        minimum = np.asarray(minimum, dtype=np.float64)
        maximum = np.asarray(maximum, dtype=np.float64)
        if minimum.shape != maximum.shape or minimum.ndim != 1:
            raise DimensionError("ScalerParams", [minimum.shape, maximum.shape])
        if np.any(maximum < minimum):
            raise ContractError("scaler maximum below minimum")
        self.minimum = minimum
        self.maximum = maximum

    @property
    def num_channels(self) -> int:
        return self.minimum.shape[0]

    @property
    def constant(self) -> np.ndarray:
        return self.maximum == self.minimum

    def to_dict(self) -> Dict[str, Any]:
        return {"minimum": self.minimum.tolist(), "maximum": self.maximum.tolist()}

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "ScalerParams":
        return cls(d["minimum"], d["maximum"])

    def __eq__(self, other):
        return (
            isinstance(other, ScalerParams)
            and np.array_equal(self.minimum, other.minimum)
            and np.array_equal(self.maximum, other.maximum)
        )


def fit_minmax(train: Sequence[RunToFailureSeries]) -> ScalerParams:
    """
    Fits per-channel min/max over every row of the training series.
    Only pass training units here.
    """
    if not train:
        raise ContractError("fit_minmax needs at least one series")
    stacked = np.concatenate([s.values for s in train], axis=0)
    params = ScalerParams(stacked.min(axis=0), stacked.max(axis=0))
    flagged = _flagged_names(train[0].channel_names, params.constant)
    if flagged:
        log.warning(f"constant channels scale to 0: {flagged}")
    return params


def _flagged_names(names: List[str], mask: np.ndarray) -> List[str]:
    return [n for n, c in zip(names, mask) if c]


def apply_minmax(x: np.ndarray, params: ScalerParams) -> np.ndarray:
    """
    ``(x - min) / (max - min)`` per channel (last axis). Values outside
    the fitted range are not clipped.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.num_channels:
        raise DimensionError("apply_minmax", [x.shape, (params.num_channels,)])
    span = params.maximum - params.minimum
    safe = np.where(params.constant, 1.0, span)
    return np.where(params.constant, 0.0, (x - params.minimum) / safe)


def invert_minmax(x: np.ndarray, params: ScalerParams) -> np.ndarray:
    """
    Inverse of ``apply_minmax``. Constant channels map back to their
    fitted value.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.num_channels:
        raise DimensionError("invert_minmax", [x.shape, (params.num_channels,)])
    return params.minimum + x * (params.maximum - params.minimum)


def scale_series(series: RunToFailureSeries, params: ScalerParams) -> RunToFailureSeries:
    return series.with_values(apply_minmax(series.values, params))
