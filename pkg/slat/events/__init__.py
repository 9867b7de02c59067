#!/usr/bin/env/python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

"""Events API

Lifecycle events of the data generator, the preprocessing pipeline and
the trainer. Usage mirrors python's logging module: configure a handler
per event type, then record events.

::

  from slat import events

  events.configure(events.LoggingEventHandler())   # default handler
  events.record("train.early_stop", metadata={"epoch": 42})

Events recorded by slat itself (type ``slat``):

1. ``train.start`` / ``train.epoch`` / ``train.early_stop`` / ``train.diverged``
2. ``pipeline.series_skipped`` - a series shorter than the window
3. ``sim.unit_generated`` - one run-to-failure unit was simulated
"""

from .api import (  # noqa F401
    ConsoleEventHandler,
    Event,
    EventHandler,
    LoggingEventHandler,
    NullEventHandler,
    RecordingEventHandler,
    configure,
    record,
    record_event,
)
