#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import math
from typing import List, Sequence, Tuple

import numpy as np
from slat.data.series import RunToFailureSeries, sort_by_unit
from slat.errors import ConfigError
from slat.utils.logging import get_logger


log = get_logger()

DEFAULT_TEST_RATIO = 0.33


def _partition(
    series: Sequence[RunToFailureSeries], count: int, seed: int
) -> Tuple[List[RunToFailureSeries], List[RunToFailureSeries]]:
    ordered = sort_by_unit(series)
    rng = np.random.default_rng(seed)
    chosen = set(rng.permutation(len(ordered))[:count].tolist())
    rest = [s for i, s in enumerate(ordered) if i not in chosen]
    picked = [s for i, s in enumerate(ordered) if i in chosen]
    return rest, picked


def truncate_series(
    series: RunToFailureSeries, window: int, rng: np.random.Generator
) -> RunToFailureSeries:
    """
    Keeps the first ``c`` rows with ``c`` drawn uniformly from
    ``[window, L - 1]``, so at least one full window remains and at
    least one interval before failure is cut. A unit with ``L <= window``
    cannot be cut that way and is returned unchanged.
    """
    if series.length <= window:
        log.debug(f"unit {series.unit_id}: too short to truncate, kept whole")
        return series
    keep = int(rng.integers(window, series.length))
    return series.truncated(keep)


def train_test_split(
    series: Sequence[RunToFailureSeries],
    ratio: float = DEFAULT_TEST_RATIO,
    seed: int = 0,
    truncate_test: bool = True,
    window: int = 40,
) -> Tuple[List[RunToFailureSeries], List[RunToFailureSeries]]:
    """
    Unit-level split. ``floor(n * ratio)`` units (at least one) go to the
    test side, chosen by a permutation seeded with ``seed``. With
    ``truncate_test`` every test unit is cut before failure; its failure
    interval (and so its true RUL at the cut) is retained.

    Both sides are returned ordered by unit id.
    """
    n = len(series)
    if n < 2:
        raise ConfigError(f"train_test_split needs at least 2 units, got {n}")
    if not 0.0 < ratio < 1.0:
        raise ConfigError(f"test ratio must lie in (0, 1), got {ratio}")
    n_test = min(max(1, int(math.floor(n * ratio))), n - 1)

    train, test = _partition(series, n_test, seed)
    if truncate_test:
        rng = np.random.default_rng([seed, 1])
        test = [truncate_series(s, window, rng) for s in test]
    log.info(f"split {n} units into {len(train)} train / {len(test)} test")
    return train, test


def holdout_split(
    series: Sequence[RunToFailureSeries], fraction: float, seed: int
) -> Tuple[List[RunToFailureSeries], List[RunToFailureSeries]]:
    """
    Sets aside ``ceil(n * fraction)`` complete units (at least one, at
    most ``n - 1``) for validation. Returns ``(train, validation)``.
    """
    n = len(series)
    if n < 2:
        raise ConfigError(f"need at least 2 units to hold out validation, got {n}")
    if not 0.0 < fraction < 1.0:
        raise ConfigError(f"validation fraction must lie in (0, 1), got {fraction}")
    n_val = min(max(1, int(math.ceil(n * fraction))), n - 1)
    return _partition(series, n_val, seed)
