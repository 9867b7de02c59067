#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import math
from typing import Iterator, List

import torch
from slat.utils import derive_seed


class ShuffledBatchSampler:
    """
    Yields minibatches of sample indices. The order of each epoch is a
    pure function of ``(seed, epoch)``; call ``set_epoch`` before
    iterating.

    Arguments:
        num_samples: dataset size
        batch_size: indices per batch (the last batch may be smaller
            unless ``drop_last``)
        seed: master seed
        shuffle: ``False`` yields indices in order
    """

    def __init__(
        self,
        num_samples: int,
        batch_size: int,
        seed: int = 0,
        shuffle: bool = True,
        drop_last: bool = False,
    ):
        if num_samples < 1:
            raise ValueError(f"num_samples should be positive, got {num_samples}")
        if batch_size < 1:
            raise ValueError(f"batch_size should be positive, got {batch_size}")
        self.num_samples = num_samples
        self.batch_size = batch_size
        self.seed = seed
        self.shuffle = shuffle
        self.drop_last = drop_last
        self.epoch = 0

    def set_epoch(self, epoch: int):
        self.epoch = epoch

    def indices(self) -> List[int]:
        if not self.shuffle:
            return list(range(self.num_samples))
        # deterministically shuffle based on (seed, epoch)
        g = torch.Generator()
        g.manual_seed(derive_seed(self.seed, self.epoch))
        return torch.randperm(self.num_samples, generator=g).tolist()

    def __iter__(self) -> Iterator[List[int]]:
        indices = self.indices()
        for i in range(len(self)):
            yield indices[i * self.batch_size : (i + 1) * self.batch_size]

    def __len__(self) -> int:
        if self.drop_last:
            return max(1, self.num_samples // self.batch_size)
        return int(math.ceil(self.num_samples / self.batch_size))
