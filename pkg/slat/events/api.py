#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import abc
import logging
import time
from typing import Any, Dict, List, Optional


class Event:
    """
    Something noteworthy that happened while generating data or training
    a model (an epoch finished, early stopping kicked in, a series was
    too short to window, ...).

    Args:
        name: event name, e.g. ``train.epoch``
        type: routes the event to a handler, see ``configure``
        metadata: free-form payload (epoch number, rmse, unit id, ...)
        timestamp: milliseconds since the epoch
    """

    __slots__ = ["name", "type", "metadata", "timestamp"]

    def __init__(
        self,
        name: str,
        type: str = "slat",
        metadata: Optional[Dict[str, Any]] = None,
        timestamp: int = 0,
    ):
        self.name = name
        self.type = type
        self.metadata = metadata if metadata is not None else {}
        self.timestamp = timestamp

    def __repr__(self):
        return f"Event(name={self.name}, type={self.type}, metadata={self.metadata})"


class EventHandler(abc.ABC):
    @abc.abstractmethod
    def record(self, event: Event):
        raise NotImplementedError()


class NullEventHandler(EventHandler):
    def record(self, event: Event):
        pass


class ConsoleEventHandler(EventHandler):
    def record(self, event: Event):
        print(f"[{event.timestamp}] {event.type}:{event.name} {event.metadata}")


class LoggingEventHandler(EventHandler):
    """
    Forwards events to a logger at ``INFO`` level.
    """

    def __init__(self, logger: Optional[logging.Logger] = None):
        self._log = logger or logging.getLogger("slat.events")

    def record(self, event: Event):
        self._log.info(f"{event.type}:{event.name} {event.metadata}")


class RecordingEventHandler(EventHandler):
    """
    Keeps events in memory, mostly useful in tests.
    """

    def __init__(self):
        self.events: List[Event] = []

    def record(self, event: Event):
        self.events.append(event)

    def names(self) -> List[str]:
        return [e.name for e in self.events]


_events_map: Dict[str, EventHandler] = {}
_default_event_handler: EventHandler = NullEventHandler()


def _get_event_handler(event_type: str) -> EventHandler:
    return _events_map.get(event_type, _default_event_handler)


def configure(handler: EventHandler, event_type: str = ""):
    r"""
    Routes all events of ``event_type`` to ``handler``. An empty
    ``event_type`` replaces the default handler.
    """
    if not event_type:
        global _default_event_handler
        _default_event_handler = handler
    else:
        _events_map[event_type] = handler


def record_event(event: Event):
    _get_event_handler(event.type).record(event)


def record(
    event_name: str,
    event_type: str = "slat",
    metadata: Optional[Dict[str, Any]] = None,
):
    r"""
    Builds an event stamped with the current time and records it.

    ::

      record("train.early_stop", metadata={"epoch": 42, "best_epoch": 22})
    """
    event = Event(
        event_name, event_type, metadata, timestamp=int(round(time.time() * 1000))
    )
    record_event(event)
