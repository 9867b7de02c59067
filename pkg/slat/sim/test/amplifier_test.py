#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import unittest

import numpy as np
from slat.errors import ConfigError
from slat.sim import (
    CHANNELS,
    SENSOR_CHANNELS,
    GainLookup,
    Impairments,
    OperatingGrid,
    gain_split,
    settle,
)


class GainLookupTest(unittest.TestCase):
    def test_split_closes_budget(self):
        lookup = GainLookup()
        for gain in np.linspace(19.0, 35.0, 33):
            g1, g2, loss = gain_split(float(gain), lookup)
            self.assertAlmostEqual(gain, g1 + g2 + loss, delta=1e-12)
            self.assertLessEqual(loss, 0.0)

    def test_out_of_range(self):
        with self.assertRaises(ConfigError):
            gain_split(18.0, GainLookup())

    def test_invalid_tables(self):
        with self.assertRaises(ConfigError):
            GainLookup(gains=[20.0, 19.0], stage1=[10.0, 10.0], stage2=[10.0, 10.0])
        with self.assertRaises(ConfigError):
            GainLookup(gains=[19.0, 20.0], stage1=[15.0, 14.0], stage2=[10.0, 10.0])
        with self.assertRaises(ConfigError):
            # stage gains below the target would need an interstage gain
            GainLookup(gains=[19.0, 20.0], stage1=[5.0, 5.0], stage2=[5.0, 5.0])


class SettleTest(unittest.TestCase):
    def setUp(self):
        self.lookup = GainLookup()

    def test_healthy_budget_over_grid(self):
        grid = OperatingGrid()
        self.assertEqual(153, len(grid))
        for power, gain in grid.conditions():
            with self.subTest(power=power, gain=gain):
                state = settle(gain, power, self.lookup)
                self.assertLess(abs(state.budget_residual()), 1e-9)
                self.assertLess(abs(state.accounting_residual()), 1e-9)
                self.assertLess(abs(state.total_gain - gain), 1e-9)
                self.assertLess(abs(state.reported_gain - gain), 1e-9)
                self.assertEqual(0.0, state.pump1.deficit)
                self.assertEqual(0.0, state.pump2.deficit)

    def test_output_pd_reading_low_raises_gain(self):
        for pd in ("pd_out1", "pd_out2"):
            with self.subTest(pd=pd):
                state = settle(27.0, -10.0, self.lookup, Impairments(pd_bias={pd: -0.5}))
                self.assertAlmostEqual(27.5, state.total_gain, places=9)
                self.assertAlmostEqual(27.0, state.reported_gain1 + state.reported_gain2 + state.loss_int, places=9)
                self.assertAlmostEqual(0.5, state.accounting_residual(), places=9)

    def test_input_pd_reading_low_lowers_gain(self):
        state = settle(27.0, -10.0, self.lookup, Impairments(pd_bias={"pd_in1": -0.5}))
        self.assertAlmostEqual(26.5, state.total_gain, places=9)
        self.assertAlmostEqual(-0.5, state.accounting_residual(), places=9)

    def test_isolator_loss_shows_in_budget(self):
        state = settle(27.0, -10.0, self.lookup, Impairments(excess_loss={"isolator": 0.3}))
        healthy = settle(27.0, -10.0, self.lookup)
        self.assertAlmostEqual(healthy.loss_int - 0.3, state.loss_int, places=12)
        self.assertAlmostEqual(26.7, state.total_gain, places=9)
        self.assertAlmostEqual(0.3, state.budget_residual(), places=9)

    def test_gff_loss_made_up_by_pump(self):
        healthy = settle(27.0, -10.0, self.lookup)
        state = settle(27.0, -10.0, self.lookup, Impairments(excess_loss={"gff": 0.5}))
        self.assertGreater(state.pump1.current, healthy.pump1.current)
        self.assertNotEqual(healthy.tilt, state.tilt)
        self.assertAlmostEqual(27.0, state.total_gain, places=9)

    def test_voa_error_raises_stage2_input(self):
        healthy = settle(27.0, -10.0, self.lookup)
        state = settle(27.0, -10.0, self.lookup, Impairments(voa_error=0.2))
        self.assertGreater(state.s2_in, healthy.s2_in)
        self.assertGreater(state.pump2.current, healthy.pump2.current)
        self.assertAlmostEqual(0.2 * abs(healthy.loss_target), state.voa_loss - state.loss_target, places=12)

    def test_weak_pump_saturates(self):
        state = settle(35.0, 1.0, self.lookup, Impairments(pump_efficiency={"pump2": 0.1}))
        self.assertEqual(600.0, state.pump2.current)
        self.assertGreater(state.pump2.deficit, 0.0)
        self.assertLess(state.total_gain, 35.0)

    def test_sensor_vector(self):
        state = settle(27.0, -10.0, self.lookup)
        sensors = state.sensors()
        self.assertEqual(len(SENSOR_CHANNELS), len(sensors))
        self.assertEqual(len(CHANNELS), len(sensors) + len(state.op_conditions()))
        np.testing.assert_array_equal([-10.0, 27.0], state.op_conditions())

    def test_input_power_out_of_range(self):
        with self.assertRaises(ConfigError):
            settle(27.0, 5.0, self.lookup)


class OperatingGridTest(unittest.TestCase):
    def test_grid(self):
        grid = OperatingGrid()
        self.assertEqual((-35.0, 19.0), grid[0])
        self.assertEqual((1.0, 35.0), grid[len(grid) - 1])
        self.assertEqual(grid.conditions()[10], grid[10])
        self.assertTrue(grid.contains(-35.0, 27.0))
        self.assertFalse(grid.contains(-34.0, 27.0))
        with self.assertRaises(ConfigError):
            OperatingGrid(0, 9)
