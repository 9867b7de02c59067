#!/usr/bin/env/python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

"""Metrics API

Telemetry for training and evaluation. A ``metric`` is a timeseries
identified by ``(metric_group, metric_name)``. The group ``slat`` is
used by the library itself, e.g. the trainer publishes ``train.rmse``,
``val.rmse`` and ``lr`` once per epoch and the ``@prof`` decorator
publishes ``<function>.duration.ms`` for the train and evaluate phases.

By default all metrics go to ``/dev/null``. To print them:

::

  import slat.metrics as metrics

  metrics.configure(metrics.ConsoleMetricHandler(), group="slat")

To collect them in memory (e.g. for a timing report):

::

  handler = metrics.RecordingMetricHandler()
  metrics.configure(handler, group="slat")
  ...
  handler.values["train.rmse"]
"""

from .api import (  # noqa F401
    DEFAULT_GROUP,
    ConsoleMetricHandler,
    MetricData,
    MetricHandler,
    MetricStream,
    NullMetricHandler,
    RecordingMetricHandler,
    configure,
    get_elapsed_time_ms,
    getStream,
    prof,
    put_metric,
)
