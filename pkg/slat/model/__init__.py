#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

"""
The SLAT network: dual (time and sensor) sparse attention encoders,
a fusion layer, a cross-attending decoder and a regression head.

::

  from slat.model import SlatConfig, init_parameters

  cfg = SlatConfig(window=40)
  model = init_parameters(cfg, d_k=15, seed=0)
  rul = model(encoder, decoder)
"""

from slat.model.checkpoint import load_checkpoint, save_checkpoint  # noqa F401
from slat.model.config import NUM_STAT_ROWS, SlatConfig  # noqa F401
from slat.model.layers import (  # noqa F401
    DecoderBlock,
    EncoderBlock,
    FeedForward,
    LayerNorm,
    Linear,
    Module,
    MultiHeadAttention,
)
from slat.model.slat import SlatModel, init_parameters, positional_encoding  # noqa F401
