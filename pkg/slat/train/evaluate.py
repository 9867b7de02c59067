#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

from typing import Optional, Sequence

import numpy as np
import pandas as pd
from slat import metrics
from slat.data import (
    RunToFailureSeries,
    ScalerParams,
    WindowSample,
    build_samples,
    final_window_samples,
    stack_samples,
)
from slat.errors import ContractError, DimensionError
from slat.model import SlatModel
from slat.utils.logging import get_logger


log = get_logger()

# half widths of the confidence intervals, as fractions of rul_max
CI_WIDTHS = np.arange(31) / 100.0
# band drawn around the true trajectory of an RTF plot
RTF_BAND = 0.1
# absorbs the rounding of w * rul_max for errors sitting on a boundary
CI_TOLERANCE = 1e-9

RTF_COLUMNS = [
    "interval",
    "true_rul",
    "predicted_rul",
    "lower",
    "upper",
    "band_half_width",
]


def rmse(predictions: np.ndarray, labels: np.ndarray) -> float:
    predictions = np.asarray(predictions, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if predictions.shape != labels.shape:
        raise DimensionError("rmse", [predictions.shape, labels.shape])
    if predictions.size == 0:
        raise ContractError("rmse of an empty set")
    return float(np.sqrt(np.mean((predictions - labels) ** 2)))


def predict_samples(model: SlatModel, samples: Sequence[WindowSample]) -> np.ndarray:
    enc, dec, _ = stack_samples(samples)
    return model.predict(enc, dec)


@metrics.prof
def evaluate_rmse(model: SlatModel, samples: Sequence[WindowSample]) -> float:
    """
    RMSE of ``model`` over ``samples``. For a test set these are the
    final windows of the truncated units (see ``final_window_samples``).
    """
    if not samples:
        raise ContractError("evaluate_rmse needs at least one sample")
    labels = np.array([s.label for s in samples], dtype=np.float64)
    return rmse(predict_samples(model, samples), labels)


def evaluate_units(
    model: SlatModel,
    series: Sequence[RunToFailureSeries],
    scaler: ScalerParams,
):
    """
    Scores the last window of every unit. Returns ``(predictions, labels)``
    ordered by unit id; units shorter than the window are skipped.
    """
    samples = final_window_samples(series, scaler, model.cfg)
    if not samples:
        raise ContractError(
            f"no test unit is as long as the window ({model.cfg.window})"
        )
    labels = np.array([s.label for s in samples], dtype=np.float64)
    return predict_samples(model, samples), labels


def ci_scoring(
    predictions: np.ndarray,
    labels: np.ndarray,
    rul_max: float,
    widths: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Fraction of predictions whose absolute error is at most
    ``w * rul_max``, for every ``w`` in ``widths`` (default 0.00 to 0.30
    in steps of 0.01). The intervals are closed.
    """
    predictions = np.asarray(predictions, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if predictions.shape != labels.shape:
        raise DimensionError("ci_scoring", [predictions.shape, labels.shape])
    if predictions.size == 0:
        raise ContractError("ci_scoring of an empty set")
    widths = CI_WIDTHS if widths is None else np.asarray(widths, dtype=np.float64)

    err = np.abs(predictions - labels)
    bounds = widths * rul_max + CI_TOLERANCE
    return (err[None, :] <= bounds[:, None]).mean(axis=1)


def export_rtf(
    model: SlatModel,
    series: RunToFailureSeries,
    scaler: ScalerParams,
    path: Optional[str] = None,
) -> pd.DataFrame:
    """
    Predicted against true RUL at every window end of one unit, with a
    band of ``0.1 * rul_max`` around the true trajectory. ``interval``
    is the index of the window's last row. Written as CSV when ``path``
    is given.
    """
    cfg = model.cfg
    if series.length < cfg.window:
        raise ContractError(
            f"unit {series.unit_id} has {series.length} intervals,"
            f" fewer than the window ({cfg.window})"
        )
    samples = build_samples([series], scaler, cfg)
    true_rul = np.array([s.label for s in samples], dtype=np.float64)
    half_width = RTF_BAND * cfg.rul_max
    frame = pd.DataFrame(
        {
            "interval": np.array([s.end for s in samples], dtype=np.int64),
            "true_rul": true_rul,
            "predicted_rul": predict_samples(model, samples),
            "lower": true_rul - half_width,
            "upper": true_rul + half_width,
            "band_half_width": np.full(len(samples), half_width),
        },
        columns=RTF_COLUMNS,
    )
    if path is not None:
        frame.to_csv(path, index=False)
        log.info(f"wrote RTF of unit {series.unit_id} ({len(frame)} rows) to {path}")
    return frame
