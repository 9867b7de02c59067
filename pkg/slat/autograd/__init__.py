#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

"""
Minimal dense-tensor engine with reverse-mode differentiation.

All values are float64. Operations executed inside a ``Tape`` context
are recorded when any input requires a gradient; ``backward`` replays
the tape in reverse to populate ``Tensor.grad``.

::

  from slat.autograd import Tape, Tensor, backward, ops

  w = Tensor(np.ones((3, 1)), requires_grad=True)
  with Tape() as tape:
      loss = ops.sum(ops.matmul(x, w))
  backward(loss, tape)
  w.grad
"""

from slat.autograd.tensor import Node, Tape, Tensor, active_tape, backward  # noqa F401
