#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import unittest

import numpy as np
from slat import events
from slat.data import (
    RunToFailureSeries,
    build_samples,
    final_window_samples,
    fit_minmax,
    slide_windows,
    stack_samples,
    stat_features,
    window_count,
)
from slat.errors import ContractError, DimensionError
from slat.test.test_utils import channel_names, tiny_config, trend_series


def ramp_series(unit_id: int, length: int, failure_index=None) -> RunToFailureSeries:
    values = np.tile(np.arange(4.0), (length, 1)) + np.arange(length)[:, None]
    return RunToFailureSeries(
        unit_id,
        values,
        channel_names(4),
        failure_index=length - 1 if failure_index is None else failure_index,
    )


class SlideWindowsTest(unittest.TestCase):
    def setUp(self):
        self.handler = events.RecordingEventHandler()
        events.configure(self.handler, "slat")

    def tearDown(self):
        events.configure(events.NullEventHandler(), "slat")

    def test_exact_length(self):
        windows = slide_windows(ramp_series(1, 40), 40, 125.0)
        self.assertEqual(1, len(windows))
        start, rows, label = windows[0]
        self.assertEqual(0, start)
        self.assertEqual((40, 4), rows.shape)
        self.assertEqual(0.0, label)

    def test_labels_count_down_to_zero(self):
        windows = slide_windows(ramp_series(1, 45), 40, 125.0)
        self.assertEqual(6, len(windows))
        self.assertEqual([0, 1, 2, 3, 4, 5], [w[0] for w in windows])
        self.assertEqual([5.0, 4.0, 3.0, 2.0, 1.0, 0.0], [w[2] for w in windows])
        np.testing.assert_array_equal(ramp_series(1, 45).values[5:], windows[-1][1])

    def test_labels_capped(self):
        windows = slide_windows(ramp_series(1, 200), 40, 125.0)
        self.assertEqual(161, len(windows))
        labels = [w[2] for w in windows]
        self.assertEqual(125.0, max(labels))
        self.assertEqual(125.0, labels[0])
        self.assertEqual(0.0, labels[-1])
        # window starting at 36 ends at 75, the first uncapped label
        self.assertEqual(124.0, labels[36])

    def test_truncated_unit_labels(self):
        s = ramp_series(1, 60, failure_index=80)
        windows = slide_windows(s, 40, 125.0)
        self.assertEqual(21.0, windows[-1][2])

    def test_stride(self):
        self.assertEqual(3, window_count(45, 40, stride=2))
        windows = slide_windows(ramp_series(1, 45), 40, 125.0, stride=2)
        self.assertEqual([0, 2, 4], [w[0] for w in windows])

    def test_short_series_skipped(self):
        self.assertEqual([], slide_windows(ramp_series(7, 39), 40, 125.0))
        self.assertEqual(0, window_count(39, 40))
        self.assertEqual(["pipeline.series_skipped"], self.handler.names())
        self.assertEqual(7, self.handler.events[0].metadata["unit_id"])

    def test_bad_window(self):
        with self.assertRaises(ContractError):
            slide_windows(ramp_series(1, 10), 0, 125.0)


class StatFeaturesTest(unittest.TestCase):
    def test_shape(self):
        out = stat_features(np.random.default_rng(0).uniform(size=(40, 15)))
        self.assertEqual((43, 15), out.shape)

    def test_constant_channel(self):
        out = stat_features(np.full((5, 2), 3.0))
        np.testing.assert_array_equal(np.full(2, 3.0), out[5])
        np.testing.assert_array_equal(np.zeros(2), out[6])
        np.testing.assert_array_equal(np.full(2, 3.0), out[7])

    def test_linear_channel(self):
        x = 2.0 * np.arange(6.0) + 1.0
        out = stat_features(x[:, None])
        self.assertAlmostEqual(x.mean(), out[6, 0])
        self.assertAlmostEqual(1.0, out[7, 0])
        self.assertAlmostEqual(2.0, out[8, 0])

    def test_matches_least_squares(self):
        window = np.random.default_rng(1).standard_normal((12, 3))
        out = stat_features(window)
        np.testing.assert_array_equal(window, out[:12])
        for c in range(3):
            slope, intercept = np.polyfit(window[:-1, c], window[1:, c], 1)
            self.assertAlmostEqual(slope, out[13, c], places=10)
            self.assertAlmostEqual(intercept, out[14, c], places=10)

    def test_bad_input(self):
        with self.assertRaises(DimensionError):
            stat_features(np.ones(5))
        with self.assertRaises(ContractError):
            stat_features(np.ones((1, 3)))


class BuildSamplesTest(unittest.TestCase):
    def test_samples(self):
        cfg = tiny_config(decoder_steps=2)
        fleet = [trend_series(2, 9), trend_series(1, 7)]
        params = fit_minmax(fleet)
        samples = build_samples(fleet, params, cfg)

        self.assertEqual(3 + 5, len(samples))
        self.assertEqual([1] * 3 + [2] * 5, [s.unit_id for s in samples])
        self.assertEqual([0, 1, 2, 0, 1, 2, 3, 4], [s.start for s in samples])

        last = samples[-1]
        self.assertEqual(8, last.end)
        self.assertEqual(0.0, last.label)
        self.assertEqual((8, 4), last.encoder.shape)
        self.assertEqual((2, 4), last.decoder.shape)
        np.testing.assert_array_equal(last.encoder[3:5], last.decoder)
        self.assertTrue(np.all(last.encoder[:5] >= 0.0))
        self.assertTrue(np.all(last.encoder[:5] <= 1.0))

    def test_final_window(self):
        cfg = tiny_config()
        fleet = [trend_series(1, 12), trend_series(2, 3), trend_series(3, 8).truncated(6)]
        params = fit_minmax(fleet)
        finals = final_window_samples(fleet, params, cfg)
        self.assertEqual([1, 3], [s.unit_id for s in finals])
        self.assertEqual([0.0, 2.0], [s.label for s in finals])
        self.assertEqual([7, 1], [s.start for s in finals])

    def test_stack(self):
        cfg = tiny_config()
        fleet = [trend_series(1, 8)]
        enc, dec, labels = stack_samples(build_samples(fleet, fit_minmax(fleet), cfg))
        self.assertEqual((4, 8, 4), enc.shape)
        self.assertEqual((4, 1, 4), dec.shape)
        np.testing.assert_array_equal([3.0, 2.0, 1.0, 0.0], labels)
        with self.assertRaises(ContractError):
            stack_samples([])
