#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import threading
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from slat.errors import ContractError


ArrayLike = Union[np.ndarray, Sequence, float, int]

# backward function of a node: output adjoint -> one adjoint (or None) per input
BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Tensor:
    """
    Dense float64 array with an optional gradient buffer.

    ``data`` is a C-contiguous (row-major) ``numpy.ndarray``; ``shape`` is
    its shape and ``data.size == prod(shape)``. ``grad``, once populated
    by ``backward``, has the same shape as ``data``.

    Tensors are never mutated by operations. Only ``grad`` changes
    after creation (and parameter ``data`` when an optimizer steps).
    """

    __slots__ = ["data", "requires_grad", "grad", "name", "_node"]

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        name: Optional[str] = None,
    ):
        self.data: np.ndarray = np.ascontiguousarray(data, dtype=np.float64)
        self.requires_grad: bool = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.name: Optional[str] = name
        # the node that produced this tensor, None for leaves
        self._node: Optional["Node"] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def is_leaf(self) -> bool:
        return self._node is None

    @property
    def T(self) -> "Tensor":
        from slat.autograd import ops

        return ops.transpose(self)

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractError(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(()))

    def numpy(self) -> np.ndarray:
        return self.data.copy()

    def zero_grad(self):
        self.grad = None

    def __add__(self, other):
        from slat.autograd import ops

        return ops.add(self, _lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        from slat.autograd import ops

        return ops.subtract(self, _lift(other))

    def __rsub__(self, other):
        from slat.autograd import ops

        return ops.subtract(_lift(other), self)

    def __mul__(self, other):
        from slat.autograd import ops

        if isinstance(other, (int, float)):
            return ops.scale(self, float(other))
        return ops.multiply(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        from slat.autograd import ops

        return ops.scale(self, -1.0)

    def __matmul__(self, other):
        from slat.autograd import ops

        return ops.matmul(self, other)

    def __repr__(self):
        grad = ", requires_grad=True" if self.requires_grad else ""
        name = f", name={self.name}" if self.name else ""
        return f"Tensor(shape={self.shape}{grad}{name})"


def _lift(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


class Node:
    """
    One recorded operation: its inputs, its output and the function
    mapping the output adjoint to the input adjoints.
    """

    __slots__ = ["op", "inputs", "output", "backward_fn"]

    def __init__(
        self, op: str, inputs: Sequence[Tensor], output: Tensor, backward_fn: BackwardFn
    ):
        self.op = op
        self.inputs = tuple(inputs)
        self.output = output
        self.backward_fn = backward_fn

    def __repr__(self):
        return f"Node({self.op}, out={self.output.shape})"


class Tape:
    """
    Ordered record of the operations executed while the tape is active.
    Since an operation is recorded after its inputs exist, the record
    order is a topological order of the graph and walking it backwards
    visits every node after all of its consumers.

    Usage

    ::

     with Tape() as tape:
         loss = ops.mse_loss(model(x), y)
     backward(loss, tape)

    A tape is bound to the thread that entered it.
    """

    def __init__(self):
        self.nodes: List[Node] = []

    def __enter__(self) -> "Tape":
        _active_tapes().append(self)
        return self

    def __exit__(self, *exc):
        stack = _active_tapes()
        assert stack and stack[-1] is self, "tapes must be exited in LIFO order"
        stack.pop()
        return False

    def record(self, node: Node):
        self.nodes.append(node)

    def reset(self):
        self.nodes = []

    def __len__(self):
        return len(self.nodes)

    def backward(self, loss: Tensor):
        backward(loss, self)


_tls = threading.local()


def _active_tapes() -> List[Tape]:
    stack = getattr(_tls, "tapes", None)
    if stack is None:
        stack = []
        _tls.tapes = stack
    return stack


def active_tape() -> Optional[Tape]:
    stack = _active_tapes()
    return stack[-1] if stack else None


def make_result(
    op: str, inputs: Sequence[Tensor], data: np.ndarray, backward_fn: BackwardFn
) -> Tensor:
    """
    Wraps ``data`` in a tensor and, if a tape is active and any input
    requires a gradient, records the producing node on it.
    """
    out = Tensor(data)
    tape = active_tape()
    if tape is not None and any(t.requires_grad for t in inputs):
        out.requires_grad = True
        node = Node(op, inputs, out, backward_fn)
        out._node = node
        tape.record(node)
    return out


def unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """
    Sums ``grad`` over the axes that were broadcast to produce it from
    an operand of ``shape`` (leading batch axes and size-1 axes).
    """
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def backward(loss: Tensor, tape: Optional[Tape] = None):
    r"""
    Populates ``grad`` of every ``requires_grad`` tensor reachable from
    ``loss`` through the nodes recorded on ``tape``. Gradients accumulate:
    calling ``backward`` twice without ``zero_grad`` doubles them.

    Raises:
        ContractError: if ``loss`` is not a single element or was not
            recorded on ``tape``.
    """
    if loss.size != 1:
        raise ContractError(f"backward needs a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        raise ContractError("loss does not depend on any tensor that requires grad")

    if loss.is_leaf:
        _accumulate(loss, np.ones_like(loss.data))
        return

    if tape is None:
        tape = active_tape()
    if tape is None:
        raise ContractError("no tape given and no tape active")

    reachable = _reachable_nodes(loss)
    adjoints: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    leaves: Dict[int, Tensor] = {}
    found = False

    for node in reversed(tape.nodes):
        if id(node) not in reachable:
            continue
        found = True
        g_out = adjoints.pop(id(node.output), None)
        if g_out is None:
            continue
        _accumulate(node.output, g_out)
        grads = node.backward_fn(g_out)
        for inp, g in zip(node.inputs, grads):
            if g is None or not inp.requires_grad:
                continue
            g = unbroadcast(np.asarray(g, dtype=np.float64), inp.shape)
            key = id(inp)
            if key in adjoints:
                adjoints[key] = adjoints[key] + g
            else:
                adjoints[key] = g
            if inp.is_leaf:
                leaves[key] = inp

    if not found:
        raise ContractError("loss was not recorded on the given tape")

    for key, leaf in leaves.items():
        _accumulate(leaf, adjoints[key])


def _accumulate(t: Tensor, g: np.ndarray):
    if t.grad is None:
        t.grad = np.array(g, dtype=np.float64, copy=True).reshape(t.shape)
    else:
        t.grad = t.grad + g.reshape(t.shape)


def _reachable_nodes(loss: Tensor) -> set:
    seen = set()
    stack = [loss._node]
    while stack:
        node = stack.pop()
        if node is None or id(node) in seen:
            continue
        seen.add(id(node))
        for inp in node.inputs:
            if inp._node is not None:
                stack.append(inp._node)
    return seen
