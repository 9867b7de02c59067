#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

from typing import List, Optional, Sequence

import numpy as np
from slat.errors import ContractError, DimensionError


class RunToFailureSeries:
    """
    One unit's trajectory: a row per inspection interval, a column per
    channel. The first ``num_op_conditions`` channels describe the
    operating condition (input power, target gain), the rest are sensors.

    Row ``t`` is inspection interval ``t``. ``failure_index`` is the
    interval at which the unit fails. For a complete run to failure it
    is the last row. For a truncated (test) unit the rows stop at
    ``truncation_index`` and ``failure_index`` lies beyond them.

    Arguments:
        unit_id: unique id of the unit within its dataset
        values: ``L x C`` matrix of channel readings
        channel_names: ``C`` names
        failure_index: interval of failure
        fault_mode: degradation mode name (``"healthy"`` if none)
        num_op_conditions: leading operating-condition channels
        failed: whether the unit actually reached its failure criterion
        truncation_index: last kept interval of a truncated unit
    """

    __slots__ = [
        "unit_id",
        "values",
        "channel_names",
        "failure_index",
        "fault_mode",
        "num_op_conditions",
        "failed",
        "truncation_index",
    ]

    def __init__(
        self,
        unit_id: int,
        values: np.ndarray,
        channel_names: Sequence[str],
        failure_index: int,
        fault_mode: str = "healthy",
        num_op_conditions: int = 2,
        failed: bool = True,
        truncation_index: Optional[int] = None,
    ):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.ndim != 2:
            raise DimensionError("RunToFailureSeries", [values.shape], "must be 2-D")
        if len(channel_names) != values.shape[1]:
            raise DimensionError(
                "RunToFailureSeries", [values.shape, (len(channel_names),)], "channel names"
            )
        if not np.all(np.isfinite(values)):
            raise ContractError(f"unit {unit_id}: non-finite sensor values")
        if not 0 <= num_op_conditions <= values.shape[1]:
            raise ContractError(f"bad num_op_conditions={num_op_conditions}")
        if failure_index < values.shape[0] - 1:
            raise ContractError(
                f"unit {unit_id}: failure_index={failure_index} precedes the last"
                f" of {values.shape[0]} rows"
            )
        self.unit_id = int(unit_id)
        self.values = values
        self.channel_names = list(channel_names)
        self.failure_index = int(failure_index)
        self.fault_mode = fault_mode
        self.num_op_conditions = int(num_op_conditions)
        self.failed = bool(failed)
        self.truncation_index = None if truncation_index is None else int(truncation_index)

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def num_channels(self) -> int:
        return self.values.shape[1]

    @property
    def op_conditions(self) -> np.ndarray:
        return self.values[:, : self.num_op_conditions]

    @property
    def sensors(self) -> np.ndarray:
        return self.values[:, self.num_op_conditions :]

    @property
    def is_truncated(self) -> bool:
        return self.truncation_index is not None

    def rul(self) -> np.ndarray:
        """Uncapped remaining intervals for every row."""
        return (self.failure_index - np.arange(self.length)).astype(np.float64)

    def with_values(self, values: np.ndarray) -> "RunToFailureSeries":
        """Copy of this unit with ``values`` replaced (same shape)."""
        values = np.asarray(values, dtype=np.float64)
        if values.shape != self.values.shape:
            raise DimensionError("with_values", [self.values.shape, values.shape])
        return RunToFailureSeries(
            self.unit_id,
            values,
            self.channel_names,
            self.failure_index,
            self.fault_mode,
            self.num_op_conditions,
            self.failed,
            self.truncation_index,
        )

    def truncated(self, keep: int) -> "RunToFailureSeries":
        """The first ``keep`` rows; the failure interval is retained."""
        if not 1 <= keep <= self.length:
            raise ContractError(f"cannot keep {keep} of {self.length} rows")
        return RunToFailureSeries(
            self.unit_id,
            self.values[:keep].copy(),
            self.channel_names,
            self.failure_index,
            self.fault_mode,
            self.num_op_conditions,
            self.failed,
            keep - 1,
        )

    def __eq__(self, other):
        return (
            isinstance(other, RunToFailureSeries)
            and self.unit_id == other.unit_id
            and self.failure_index == other.failure_index
            and self.fault_mode == other.fault_mode
            and self.num_op_conditions == other.num_op_conditions
            and self.failed == other.failed
            and self.truncation_index == other.truncation_index
            and self.channel_names == other.channel_names
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self):
        return (
            f"RunToFailureSeries(unit_id={self.unit_id}, length={self.length},"
            f" channels={self.num_channels}, failure_index={self.failure_index},"
            f" fault_mode={self.fault_mode})"
        )


def sort_by_unit(series: Sequence[RunToFailureSeries]) -> List[RunToFailureSeries]:
    ids = [s.unit_id for s in series]
    if len(set(ids)) != len(ids):
        raise ContractError("duplicate unit ids")
    return sorted(series, key=lambda s: s.unit_id)
