#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

"""
Position-based sparse attention.

Masks combine a band pattern (local context, ``|i - j| <= b``) with
global nodes (positions that attend to and are attended from every
position). ``multi_head`` runs masked, scaled dot-product attention per
head and projects the concatenated heads back to ``d_model``.
"""

from slat.attention.api import (  # noqa F401
    DEFAULT_MAX_D_MODEL,
    MultiHeadConfig,
    MultiHeadWeights,
    attention,
    multi_head,
)
from slat.attention.mask import (  # noqa F401
    AttentionMask,
    band_mask,
    full_mask,
    global_mask,
    sparse_mask,
    union_mask,
)
