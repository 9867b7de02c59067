#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import numpy as np


def derive_seed(master_seed: int, *keys: int) -> int:
    r"""
    Derives a child seed from ``master_seed`` and a path of integer keys
    (e.g. ``derive_seed(seed, dataset_index, unit_id)``). The result is a
    pure function of its arguments and independent of call order, so
    units can be generated in any order or in parallel.

    Arguments:
        master_seed (int): the user supplied seed
        keys (int): path identifying the consumer of the seed
    """
    if master_seed < 0:
        raise ValueError(f"seed must be non-negative, got {master_seed}")
    seq = np.random.SeedSequence([master_seed, *keys])
    return int(seq.generate_state(1, dtype=np.uint32)[0])


def make_rng(master_seed: int, *keys: int) -> np.random.Generator:
    """
    Returns a numpy ``Generator`` seeded with ``derive_seed(master_seed, *keys)``.
    """
    return np.random.default_rng(derive_seed(master_seed, *keys))
