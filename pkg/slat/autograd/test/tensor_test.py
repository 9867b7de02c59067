#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import unittest

import numpy as np
from slat.autograd import Tape, Tensor, active_tape, backward, ops
from slat.autograd.gradcheck import numerical_grad, relative_error
from slat.autograd.tensor import unbroadcast
from slat.errors import ContractError


class TensorTest(unittest.TestCase):
    def test_data_is_float64_and_contiguous(self):
        t = Tensor(np.arange(6, dtype=np.int32).reshape(2, 3).T)
        self.assertEqual(np.float64, t.data.dtype)
        self.assertTrue(t.data.flags["C_CONTIGUOUS"])
        self.assertEqual((3, 2), t.shape)
        self.assertEqual(6, t.size)

    def test_item(self):
        self.assertEqual(3.0, Tensor([[3.0]]).item())
        with self.assertRaises(ContractError):
            Tensor([1.0, 2.0]).item()

    def test_nothing_recorded_without_tape(self):
        x = Tensor(np.ones(3), requires_grad=True)
        y = ops.sum(x * x)
        self.assertTrue(y.is_leaf)
        self.assertFalse(y.requires_grad)

    def test_nothing_recorded_for_constants(self):
        with Tape() as tape:
            ops.sum(Tensor(np.ones(3)) * 2.0)
        self.assertEqual(0, len(tape))

    def test_tapes_nest(self):
        self.assertIsNone(active_tape())
        with Tape() as outer:
            with Tape() as inner:
                self.assertIs(inner, active_tape())
            self.assertIs(outer, active_tape())
        self.assertIsNone(active_tape())


class BackwardTest(unittest.TestCase):
    def test_sum(self):
        x = Tensor(np.arange(4.0), requires_grad=True)
        with Tape() as tape:
            loss = ops.sum(x)
        backward(loss, tape)
        np.testing.assert_array_equal(np.ones(4), x.grad)

    def test_sum_of_squares(self):
        x = Tensor(np.array([1.0, -2.0, 3.0]), requires_grad=True)
        with Tape() as tape:
            loss = ops.sum(x * x)
        backward(loss, tape)
        np.testing.assert_array_equal(2 * x.data, x.grad)

    def test_shared_input_accumulates(self):
        x = Tensor(np.array([2.0]), requires_grad=True)
        with Tape() as tape:
            y = x * 3.0
            loss = ops.sum(y + y * x)
        backward(loss, tape)
        # d/dx (3x + 3x^2) = 3 + 6x
        np.testing.assert_allclose([15.0], x.grad)

    def test_repeated_backward_accumulates(self):
        x = Tensor(np.ones(2), requires_grad=True)
        with Tape() as tape:
            loss = ops.sum(x)
        backward(loss, tape)
        backward(loss, tape)
        np.testing.assert_array_equal([2.0, 2.0], x.grad)
        x.zero_grad()
        self.assertIsNone(x.grad)

    def test_non_scalar_loss(self):
        x = Tensor(np.ones(2), requires_grad=True)
        with Tape() as tape:
            y = x * 2.0
        with self.assertRaises(ContractError):
            backward(y, tape)

    def test_loss_without_grad(self):
        with self.assertRaises(ContractError):
            backward(Tensor(1.0))

    def test_loss_from_another_tape(self):
        x = Tensor(np.ones(2), requires_grad=True)
        with Tape():
            loss = ops.sum(x)
        with self.assertRaises(ContractError):
            backward(loss, Tape())

    def test_unbroadcast(self):
        g = np.ones((4, 2, 3))
        np.testing.assert_array_equal(np.full((2, 3), 4.0), unbroadcast(g, (2, 3)))
        np.testing.assert_array_equal(np.full((1, 3), 8.0), unbroadcast(g, (1, 3)))


class GradcheckTest(unittest.TestCase):
    def test_numerical_grad_restores_data(self):
        x = Tensor(np.array([1.0, 2.0]), requires_grad=True)
        before = x.data.copy()
        grad = numerical_grad(lambda: ops.sum(x * x), x)
        np.testing.assert_array_equal(before, x.data)
        np.testing.assert_allclose([2.0, 4.0], grad, rtol=1e-8)

    def test_relative_error_floor(self):
        self.assertEqual(0.0, relative_error(np.zeros(0), np.zeros(0)))
        self.assertAlmostEqual(1e-6 / 1e-3, relative_error(np.array([1e-6]), np.array([0.0])))
