#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import abc
import threading
import time
from collections import defaultdict, namedtuple
from functools import wraps
from typing import Dict, List, Optional


MetricData = namedtuple("MetricData", ["timestamp", "group_name", "name", "value"])

DEFAULT_GROUP = "slat"


class MetricHandler(abc.ABC):
    @abc.abstractmethod
    def emit(self, metric_data: MetricData):
        pass


class ConsoleMetricHandler(MetricHandler):
    def emit(self, metric_data: MetricData):
        print(
            "[{}][{}]: {}={}".format(
                metric_data.timestamp,
                metric_data.group_name,
                metric_data.name,
                metric_data.value,
            )
        )


class NullMetricHandler(MetricHandler):
    def emit(self, metric_data: MetricData):
        pass


class RecordingMetricHandler(MetricHandler):
    """
    Keeps every emitted value in memory, keyed by metric name.
    Lets callers and tests inspect what was published, e.g. the
    per-epoch ``train.rmse`` values or the ``.duration.ms`` of a phase.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self.values: Dict[str, List[float]] = defaultdict(list)

    def emit(self, metric_data: MetricData):
        with self._lock:
            self.values[metric_data.name].append(metric_data.value)

    def last(self, name: str) -> Optional[float]:
        series = self.values.get(name)
        return series[-1] if series else None

    def clear(self):
        with self._lock:
            self.values.clear()


class MetricStream:
    def __init__(self, group_name: str, handler: MetricHandler):
        self.group_name = group_name
        self.handler = handler

    def add_value(self, metric_name: str, metric_value: float):
        self.handler.emit(
            MetricData(time.time(), self.group_name, metric_name, metric_value)
        )


_metrics_map: Dict[str, MetricHandler] = {}
_default_metrics_handler: MetricHandler = NullMetricHandler()


def configure(handler: MetricHandler, group: Optional[str] = None):
    if group is None:
        global _default_metrics_handler
        _default_metrics_handler = handler
    else:
        _metrics_map[group] = handler


def getStream(group: str) -> MetricStream:
    if group in _metrics_map:
        handler = _metrics_map[group]
    else:
        handler = _default_metrics_handler
    return MetricStream(group, handler)


def _get_metric_name(fn) -> str:
    qualname = fn.__qualname__
    split = qualname.split(".")
    if len(split) == 1:
        module = fn.__module__
        if module:
            return module.split(".")[-1] + "." + split[0]
        else:
            return split[0]
    else:
        return qualname


def prof(fn=None, group: str = DEFAULT_GROUP):
    r"""
    Decorator that publishes ``<key>.success``, ``<key>.failure`` and
    ``<key>.duration.ms`` for the decorated function. ``<key>`` is the
    qualified name (``ClassName.method``) or ``leaf_module.function``.

    Usage

    ::

     @metrics.prof
     def train(...):
         pass

     @metrics.prof(group="slat.eval")
     def evaluate_rmse(...):
         pass
    """

    def wrap(f):
        @wraps(f)
        def wrapper(*args, **kwargs):
            key = _get_metric_name(f)
            start = time.perf_counter()
            try:
                result = f(*args, **kwargs)
                put_metric(f"{key}.success", 1, group)
            except Exception:
                put_metric(f"{key}.failure", 1, group)
                raise
            finally:
                put_metric(f"{key}.duration.ms", get_elapsed_time_ms(start), group)
            return result

        return wrapper

    if fn:
        return wrap(fn)
    else:
        return wrap


def put_metric(metric_name: str, metric_value: float, metric_group: str = DEFAULT_GROUP):
    """
    Publishes a metric data point.

    ::

     put_metric("train.rmse", 12.3)
     put_metric("lr", 1e-3, "slat.train")
    """

    getStream(metric_group).add_value(metric_name, metric_value)


def get_elapsed_time_ms(start_perf_counter: float) -> float:
    """
    Milliseconds elapsed since ``start_perf_counter`` (a ``time.perf_counter()`` value).
    """
    return (time.perf_counter() - start_perf_counter) * 1000.0
