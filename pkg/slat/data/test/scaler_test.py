#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import unittest

import numpy as np
from slat.data import (
    RunToFailureSeries,
    ScalerParams,
    apply_minmax,
    fit_minmax,
    invert_minmax,
    scale_series,
)
from slat.errors import ContractError, DimensionError


def series(unit_id, values):
    values = np.asarray(values, dtype=np.float64)
    names = [f"c{i}" for i in range(values.shape[1])]
    return RunToFailureSeries(unit_id, values, names, len(values) - 1, num_op_conditions=0)


class MinMaxTest(unittest.TestCase):
    def setUp(self):
        self.train = [
            series(1, [[2.0, 5.0], [4.0, 5.0]]),
            series(2, [[6.0, 5.0]]),
        ]
        self.params = fit_minmax(self.train)

    def test_fit(self):
        np.testing.assert_array_equal([2.0, 5.0], self.params.minimum)
        np.testing.assert_array_equal([6.0, 5.0], self.params.maximum)
        np.testing.assert_array_equal([False, True], self.params.constant)

    def test_apply(self):
        x = np.array([[2.0, 5.0], [4.0, 5.0], [6.0, 5.0]])
        np.testing.assert_array_equal(
            [[0.0, 0.0], [0.5, 0.0], [1.0, 0.0]], apply_minmax(x, self.params)
        )

    def test_no_clipping(self):
        out = apply_minmax(np.array([[8.0, 7.0], [0.0, 1.0]]), self.params)
        np.testing.assert_array_equal([[1.5, 0.0], [-0.5, 0.0]], out)

    def test_invert(self):
        x = np.array([[3.0, 5.0], [5.5, 5.0]])
        np.testing.assert_allclose(x, invert_minmax(apply_minmax(x, self.params), self.params))

    def test_scale_series(self):
        scaled = scale_series(self.train[0], self.params)
        self.assertEqual(1, scaled.unit_id)
        np.testing.assert_array_equal([[0.0, 0.0], [0.5, 0.0]], scaled.values)
        np.testing.assert_array_equal([[2.0, 5.0], [4.0, 5.0]], self.train[0].values)

    def test_batched_input(self):
        x = np.full((3, 4, 2), 4.0)
        np.testing.assert_array_equal(np.full(3 * 4, 0.5), apply_minmax(x, self.params)[..., 0].ravel())

    def test_channel_mismatch(self):
        with self.assertRaises(DimensionError):
            apply_minmax(np.ones((2, 3)), self.params)

    def test_empty(self):
        with self.assertRaises(ContractError):
            fit_minmax([])


class ScalerParamsTest(unittest.TestCase):
    def test_dict_round_trip(self):
        params = ScalerParams([0.0, 1.5], [2.0, 1.5])
        self.assertEqual(params, ScalerParams.from_dict(params.to_dict()))
        self.assertEqual(2, params.num_channels)

    def test_invalid(self):
        with self.assertRaises(ContractError):
            ScalerParams([1.0], [0.0])
        with self.assertRaises(DimensionError):
            ScalerParams([0.0, 0.0], [1.0])
