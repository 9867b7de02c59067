#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import inspect
import logging
import os
from typing import Optional


LOG_FORMAT = "[%(levelname)s] %(asctime)s %(module)s: %(message)s"


def get_logger(name: Optional[str] = None) -> logging.Logger:
    r"""
    Returns a logger that writes into stderr. The log level is taken
    from the ``LOGLEVEL`` environment variable (``INFO`` by default).
    If no name is given the module name of the caller is used, so
    ``log = get_logger()`` at module scope behaves like
    ``logging.getLogger(__name__)``.

    Arguments:
        name (str): Name of the logger.
    """

    if name is None:
        try:
            # depth=2: skip this function's frame
            name = _derive_module_name(depth=2)
        except Exception as e:
            default_log = _setup_logger()
            default_log.warning(
                f"Error while setting up logger. Will be using default logger. Got exception: {e}"
            )

    return _setup_logger(name)


def _setup_logger(name: Optional[str] = None) -> logging.Logger:
    log = logging.getLogger(name)
    if len(log.handlers) == 0:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        log.addHandler(handler)
        # the CLI may configure the root logger as well
        log.propagate = False
    log.setLevel(os.environ.get("LOGLEVEL", "INFO"))
    return log


def _derive_module_name(depth: int = 1) -> str:
    stack = inspect.stack()
    assert depth < len(stack)
    frame = stack[depth][0]
    module = inspect.getmodule(frame)
    if module is None:
        raise ValueError(f"Frame {frame} at depth {depth} does not have module.")
    return module.__name__
