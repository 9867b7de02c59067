#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import math
import os
import shutil
import tempfile
import unittest

import numpy as np
import pandas as pd
from slat.data import build_samples, final_window_samples, fit_minmax
from slat.errors import ContractError, DimensionError
from slat.model import init_parameters
from slat.train import (
    CI_WIDTHS,
    RTF_COLUMNS,
    ci_scoring,
    evaluate_rmse,
    evaluate_units,
    export_rtf,
    predict_samples,
    rmse,
)
from slat.test.test_utils import tiny_config, trend_fleet, trend_series


class RmseTest(unittest.TestCase):
    def test_closed_forms(self):
        self.assertEqual(0.0, rmse(np.arange(3.0), np.arange(3.0)))
        self.assertEqual(math.sqrt(12.5), rmse(np.zeros(2), np.array([3.0, 4.0])))
        self.assertEqual(2.0, rmse(np.full(5, 7.0), np.full(5, 5.0)))

    def test_invalid(self):
        with self.assertRaises(DimensionError):
            rmse(np.zeros(2), np.zeros(3))
        with self.assertRaises(ContractError):
            rmse(np.zeros(0), np.zeros(0))


class CiScoringTest(unittest.TestCase):
    def test_fixture(self):
        labels = np.zeros(3)
        predictions = np.array([0.0, 12.5, 40.0])
        curve = ci_scoring(predictions, labels, rul_max=125.0)
        self.assertEqual(31, len(curve))
        np.testing.assert_array_equal(np.full(10, 1 / 3), curve[:10])
        np.testing.assert_array_equal(np.full(21, 2 / 3), curve[10:])

    def test_closed_boundaries(self):
        labels = np.zeros(4)
        for i, w in enumerate(CI_WIDTHS):
            predictions = np.array([w * 125.0, -w * 125.0, 0.0, 0.0])
            self.assertEqual(1.0, ci_scoring(predictions, labels, 125.0, widths=[w])[0], i)

    def test_monotone(self):
        rng = np.random.default_rng(0)
        labels = rng.uniform(0, 125, 50)
        predictions = labels + rng.normal(0, 15, 50)
        curve = ci_scoring(predictions, labels, 125.0)
        self.assertTrue(np.all(np.diff(curve) >= 0))
        self.assertGreater(curve[-1], curve[0])

    def test_invalid(self):
        with self.assertRaises(DimensionError):
            ci_scoring(np.zeros(2), np.zeros(3), 125.0)
        with self.assertRaises(ContractError):
            ci_scoring(np.zeros(0), np.zeros(0), 125.0)


class EvaluateTest(unittest.TestCase):
    def setUp(self):
        self.cfg = tiny_config()
        self.model = init_parameters(self.cfg, 4, seed=0)
        self.fleet = trend_fleet(4, length_range=(8, 12))
        self.scaler = fit_minmax(self.fleet)
        self.test_dir = tempfile.mkdtemp(prefix=self.__class__.__name__)

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def test_evaluate_rmse(self):
        samples = build_samples(self.fleet, self.scaler, self.cfg)
        labels = np.array([s.label for s in samples])
        self.assertEqual(
            rmse(predict_samples(self.model, samples), labels),
            evaluate_rmse(self.model, samples),
        )
        with self.assertRaises(ContractError):
            evaluate_rmse(self.model, [])

    def test_evaluate_units(self):
        test = [s.truncated(s.length - 2) for s in self.fleet] + [trend_series(9, 3)]
        predictions, labels = evaluate_units(self.model, test, self.scaler)
        self.assertEqual((4,), predictions.shape)
        np.testing.assert_array_equal(np.full(4, 2.0), labels)
        expected = predict_samples(self.model, final_window_samples(test, self.scaler, self.cfg))
        np.testing.assert_array_equal(expected, predictions)

        with self.assertRaises(ContractError):
            evaluate_units(self.model, [trend_series(9, 3)], self.scaler)

    def test_export_rtf(self):
        unit = trend_series(1, 12)
        path = os.path.join(self.test_dir, "rtf.csv")
        frame = export_rtf(self.model, unit, self.scaler, path)

        self.assertEqual(RTF_COLUMNS, list(frame.columns))
        self.assertEqual(list(range(4, 12)), frame["interval"].tolist())
        self.assertEqual([7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0, 0.0], frame["true_rul"].tolist())
        self.assertTrue(np.all(frame["band_half_width"] == 12.5))
        np.testing.assert_array_equal(frame["true_rul"] - 12.5, frame["lower"])
        np.testing.assert_array_equal(frame["true_rul"] + 12.5, frame["upper"])
        np.testing.assert_array_equal(
            predict_samples(self.model, build_samples([unit], self.scaler, self.cfg)),
            frame["predicted_rul"],
        )

        written = pd.read_csv(path)
        self.assertEqual(RTF_COLUMNS, list(written.columns))
        self.assertEqual(len(frame), len(written))

    def test_export_rtf_short_unit(self):
        with self.assertRaises(ContractError):
            export_rtf(self.model, trend_series(1, 4), self.scaler)
