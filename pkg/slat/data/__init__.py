#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

"""
Preprocessing of run-to-failure series into model samples:

1. ``fit_minmax`` on the training units, ``apply_minmax`` everywhere
2. ``slide_windows`` with stride 1, labels capped at ``rul_max``
3. ``stat_features`` appends mean and successor-regression rows
4. ``build_samples`` composes the above into ``WindowSample`` lists

``train_test_split`` works on whole units; test units are truncated
before failure.
"""

from slat.data.io import (  # noqa F401
    load_dataset,
    read_window_csv,
    save_dataset,
    sidecar_path,
)
from slat.data.sampler import ShuffledBatchSampler  # noqa F401
from slat.data.scaler import (  # noqa F401
    ScalerParams,
    apply_minmax,
    fit_minmax,
    invert_minmax,
    scale_series,
)
from slat.data.series import RunToFailureSeries  # noqa F401
from slat.data.split import (  # noqa F401
    DEFAULT_TEST_RATIO,
    holdout_split,
    train_test_split,
    truncate_series,
)
from slat.data.windows import (  # noqa F401
    WindowSample,
    build_samples,
    final_window_samples,
    slide_windows,
    stack_samples,
    stat_features,
    window_count,
)
