#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

"""
Training and evaluation.

::

  from slat.train import TrainConfig, fit, evaluate_units, ci_scoring

  result = fit(train_units, SlatConfig(), TrainConfig(seed=0))
  predictions, labels = evaluate_units(result.model, test_units, result.scaler)
  curve = ci_scoring(predictions, labels, rul_max=125)
"""

from slat.train.evaluate import (  # noqa F401
    CI_WIDTHS,
    RTF_COLUMNS,
    ci_scoring,
    evaluate_rmse,
    evaluate_units,
    export_rtf,
    predict_samples,
    rmse,
)
from slat.train.optim import Adam, AdamState, NoamOpt, adam_step, noam_lr  # noqa F401
from slat.train.runs import (  # noqa F401
    MetricsReport,
    RunResult,
    multi_run,
    run_once,
    timing_report,
)
from slat.train.trainer import History, TrainConfig, TrainResult, fit, train  # noqa F401
