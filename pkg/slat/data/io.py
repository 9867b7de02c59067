#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

"""
Dataset files.

A sub-dataset is one CSV (utf-8, header row) with the columns::

  unit_id, interval_index, op_cond_1..p, sensor_1..k, rul

``rul`` is the uncapped number of intervals to failure. A JSON sidecar
next to the CSV (same stem, ``.json``) holds the channel names, the
per-unit attributes that the CSV cannot carry (fault mode, failed flag,
truncation), optional scaler params and free-form generation metadata.
"""

import json
import os
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from slat.data.scaler import ScalerParams
from slat.data.series import RunToFailureSeries, sort_by_unit
from slat.errors import ConfigError, ContractError
from slat.utils.logging import get_logger


log = get_logger()

SIDECAR_FORMAT_VERSION = 1


def sidecar_path(csv_path: str) -> str:
    return os.path.splitext(csv_path)[0] + ".json"


def csv_columns(num_op_conditions: int, num_sensors: int) -> List[str]:
    return (
        ["unit_id", "interval_index"]
        + [f"op_cond_{i + 1}" for i in range(num_op_conditions)]
        + [f"sensor_{i + 1}" for i in range(num_sensors)]
        + ["rul"]
    )


def _channel_columns(columns: Sequence[str]) -> Tuple[List[str], List[str]]:
    ops = [c for c in columns if c.startswith("op_cond_")]
    sensors = [c for c in columns if c.startswith("sensor_")]
    return ops, sensors


def series_to_frame(series: Sequence[RunToFailureSeries]) -> pd.DataFrame:
    if not series:
        raise ContractError("no series to write")
    first = series[0]
    p, k = first.num_op_conditions, first.num_channels - first.num_op_conditions
    frames = []
    for s in sort_by_unit(series):
        if s.num_op_conditions != p or s.num_channels != p + k:
            raise ContractError(f"unit {s.unit_id} has a different channel layout")
        frame = pd.DataFrame(s.values, columns=csv_columns(p, k)[2:-1])
        frame.insert(0, "interval_index", np.arange(s.length))
        frame.insert(0, "unit_id", s.unit_id)
        frame["rul"] = s.failure_index - frame["interval_index"]
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def save_dataset(
    csv_path: str,
    series: Sequence[RunToFailureSeries],
    scaler: Optional[ScalerParams] = None,
    metadata: Optional[Dict[str, Any]] = None,
):
    """Writes the CSV and its sidecar."""
    frame = series_to_frame(series)
    frame.to_csv(csv_path, index=False, float_format="%.17g", encoding="utf-8")

    first = series[0]
    sidecar = {
        "format_version": SIDECAR_FORMAT_VERSION,
        "channel_names": first.channel_names,
        "num_op_conditions": first.num_op_conditions,
        "units": {
            str(s.unit_id): {
                "fault_mode": s.fault_mode,
                "failed": s.failed,
                "truncation_index": s.truncation_index,
            }
            for s in series
        },
        "scaler": scaler.to_dict() if scaler is not None else None,
        "metadata": metadata or {},
    }
    with open(sidecar_path(csv_path), "w") as f:
        json.dump(sidecar, f, indent=2, sort_keys=True)
    log.info(f"wrote {len(series)} units ({len(frame)} rows) to {csv_path}")


def load_sidecar(csv_path: str) -> Dict[str, Any]:
    path = sidecar_path(csv_path)
    if not os.path.exists(path):
        return {}
    with open(path, "r") as f:
        sidecar = json.load(f)
    version = sidecar.get("format_version")
    if version != SIDECAR_FORMAT_VERSION:
        raise ConfigError(f"{path}: unsupported sidecar format_version {version}")
    return sidecar


def frame_to_series(
    frame: pd.DataFrame, sidecar: Optional[Dict[str, Any]] = None
) -> List[RunToFailureSeries]:
    sidecar = sidecar or {}
    missing = {"unit_id", "interval_index", "rul"} - set(frame.columns)
    if missing:
        raise ConfigError(f"dataset lacks columns {sorted(missing)}")
    op_cols, sensor_cols = _channel_columns(frame.columns)
    names = sidecar.get("channel_names") or op_cols + sensor_cols
    if len(names) != len(op_cols) + len(sensor_cols):
        raise ConfigError("sidecar channel names do not match the CSV columns")
    units = sidecar.get("units", {})

    out = []
    for unit_id, rows in frame.sort_values(["unit_id", "interval_index"]).groupby(
        "unit_id", sort=True
    ):
        attrs = units.get(str(unit_id), {})
        first_interval = int(rows["interval_index"].iloc[0])
        failure_index = first_interval + int(round(rows["rul"].iloc[0]))
        out.append(
            RunToFailureSeries(
                int(unit_id),
                rows[op_cols + sensor_cols].to_numpy(dtype=np.float64),
                names,
                failure_index,
                fault_mode=attrs.get("fault_mode", "unknown"),
                num_op_conditions=len(op_cols),
                failed=attrs.get("failed", True),
                truncation_index=attrs.get("truncation_index"),
            )
        )
    return out


def load_dataset(
    csv_path: str,
) -> Tuple[List[RunToFailureSeries], Dict[str, Any]]:
    """Reads a CSV (and its sidecar when present). Returns ``(series, sidecar)``."""
    frame = pd.read_csv(csv_path, encoding="utf-8", float_precision="round_trip")
    sidecar = load_sidecar(csv_path)
    return frame_to_series(frame, sidecar), sidecar


def read_window_csv(path: str, num_channels: int) -> np.ndarray:
    """
    Reads the raw rows of one unit for ``predict``: either the dataset
    layout (``op_cond_*``/``sensor_*`` columns) or a headerless matrix
    with ``num_channels`` columns.
    """
    frame = pd.read_csv(path, encoding="utf-8")
    op_cols, sensor_cols = _channel_columns(frame.columns)
    if op_cols or sensor_cols:
        values = frame[op_cols + sensor_cols].to_numpy(dtype=np.float64)
    else:
        values = pd.read_csv(path, header=None).to_numpy(dtype=np.float64)
    if values.ndim != 2 or values.shape[1] != num_channels:
        raise ConfigError(
            f"{path}: expected {num_channels} channels, got shape {values.shape}"
        )
    return values
