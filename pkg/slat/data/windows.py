#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

from typing import List, Sequence, Tuple

import numpy as np
from slat import events
from slat.data.scaler import ScalerParams, scale_series
from slat.data.series import RunToFailureSeries, sort_by_unit
from slat.errors import ContractError, DimensionError
from slat.model.config import SlatConfig
from slat.utils.logging import get_logger


log = get_logger()


class WindowSample:
    """
    One supervised instance cut from a unit.

    Arguments:
        unit_id: source unit
        start: first interval of the window
        end: last interval of the window (the one the label refers to)
        encoder: ``(window + 3) x d_k`` scaled window plus statistical rows
        decoder: ``M x d_k`` last scaled window rows
        label: ``min(failure_index - end, rul_max)``
    """

    __slots__ = ["unit_id", "start", "end", "encoder", "decoder", "label"]

    def __init__(
        self,
        unit_id: int,
        start: int,
        end: int,
        encoder: np.ndarray,
        decoder: np.ndarray,
        label: float,
    ):
        self.unit_id = unit_id
        self.start = start
        self.end = end
        self.encoder = encoder
        self.decoder = decoder
        self.label = label

    def __repr__(self):
        return (
            f"WindowSample(unit_id={self.unit_id}, start={self.start},"
            f" end={self.end}, label={self.label})"
        )


def window_count(length: int, window: int, stride: int = 1) -> int:
    if length < window:
        return 0
    return (length - window) // stride + 1


def slide_windows(
    series: RunToFailureSeries, window: int, rul_max: float, stride: int = 1
) -> List[Tuple[int, np.ndarray, float]]:
    """
    Cuts ``series`` into windows of ``window`` consecutive rows. Returns
    ``(start, rows, label)`` triples in order of ``start``; the label of
    a window ending at interval ``t`` is ``min(failure_index - t, rul_max)``.

    A series shorter than ``window`` yields nothing (a warning is logged
    and a ``pipeline.series_skipped`` event recorded).
    """
    if window < 1 or stride < 1:
        raise ContractError(f"window and stride must be positive ({window}, {stride})")
    if series.length < window:
        log.warning(
            f"unit {series.unit_id}: length {series.length} < window {window}, skipped"
        )
        events.record(
            "pipeline.series_skipped",
            metadata={
                "unit_id": series.unit_id,
                "length": series.length,
                "window": window,
            },
        )
        return []

    out = []
    for start in range(0, series.length - window + 1, stride):
        end = start + window - 1
        label = float(min(series.failure_index - end, rul_max))
        out.append((start, series.values[start : end + 1], label))
    return out


def stat_features(window: np.ndarray) -> np.ndarray:
    r"""
    Appends three rows to a ``T x d_k`` window: the per-channel mean,
    then slope ``a`` and intercept ``b`` of the least-squares fit
    ``x[t + 1] ~ a * x[t] + b`` over ``t = 0 .. T - 2``.

    A channel whose predictor values ``x[0 .. T - 2]`` are all equal has
    no defined slope; it gets ``a = 0`` and ``b`` = the window mean.
    """
    window = np.asarray(window, dtype=np.float64)
    if window.ndim != 2:
        raise DimensionError("stat_features", [window.shape], "must be 2-D")
    if window.shape[0] < 2:
        raise ContractError(f"stat_features needs at least 2 rows, got {window.shape[0]}")

    mean = window.mean(axis=0)
    x, y = window[:-1], window[1:]
    degenerate = np.ptp(x, axis=0) == 0
    xc = x - x.mean(axis=0)
    yc = y - y.mean(axis=0)
    sxx = (xc * xc).sum(axis=0)
    sxy = (xc * yc).sum(axis=0)
    a = np.where(degenerate, 0.0, sxy / np.where(degenerate, 1.0, sxx))
    b = np.where(degenerate, mean, y.mean(axis=0) - a * x.mean(axis=0))
    return np.concatenate([window, mean[None, :], a[None, :], b[None, :]], axis=0)


def _samples_of(
    series: RunToFailureSeries, cfg: SlatConfig, stride: int
) -> List[WindowSample]:
    m = cfg.decoder_steps
    samples = []
    for start, rows, label in slide_windows(series, cfg.window, cfg.rul_max, stride):
        samples.append(
            WindowSample(
                series.unit_id,
                start,
                start + cfg.window - 1,
                stat_features(rows),
                np.array(rows[-m:]),
                label,
            )
        )
    return samples


def build_samples(
    series: Sequence[RunToFailureSeries],
    params: ScalerParams,
    cfg: SlatConfig,
    stride: int = 1,
) -> List[WindowSample]:
    """
    Scales every unit with ``params``, slides windows over it and
    augments each window with its statistical rows. Samples are ordered
    by ``(unit_id, start)``.
    """
    samples: List[WindowSample] = []
    for s in sort_by_unit(series):
        samples.extend(_samples_of(scale_series(s, params), cfg, stride))
    return samples


def final_window_samples(
    series: Sequence[RunToFailureSeries], params: ScalerParams, cfg: SlatConfig
) -> List[WindowSample]:
    """
    The last window of every unit (what a truncated test unit is
    scored on), ordered by unit id.
    """
    out = []
    for s in sort_by_unit(series):
        samples = _samples_of(scale_series(s, params), cfg, stride=1)
        if samples:
            out.append(samples[-1])
    return out


def stack_samples(
    samples: Sequence[WindowSample],
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(encoder [N, T+3, d_k], decoder [N, M, d_k], labels [N])``"""
    if not samples:
        raise ContractError("no samples to stack")
    return (
        np.stack([s.encoder for s in samples]),
        np.stack([s.decoder for s in samples]),
        np.array([s.label for s in samples], dtype=np.float64),
    )
