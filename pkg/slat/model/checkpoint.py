#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

"""
Checkpoint file layout (all integers little-endian)::

  b"SLATCKPT"                         magic
  uint32 format_version, uint32 n     prefix
  n bytes                             JSON header (utf-8)
  records, one per tensor, in parameter order:
    uint32 name_len, name (utf-8)
    uint32 ndim, ndim x uint32 dims
    prod(dims) x float64 payload

The header carries ``slat_config``, ``d_k``, the number of records and
free-form ``metadata`` (scaler params, training history, ...).
"""

import json
import struct
from collections import OrderedDict
from typing import Any, BinaryIO, Dict, Optional, Tuple

import numpy as np
from slat.errors import CheckpointError
from slat.model.config import SlatConfig
from slat.model.slat import SlatModel
from slat.utils.logging import get_logger


log = get_logger()

MAGIC = b"SLATCKPT"
FORMAT_VERSION = 1

_PREFIX = struct.Struct("<II")
_U32 = struct.Struct("<I")
_PAYLOAD_DTYPE = np.dtype("<f8")


def _read_exact(f: BinaryIO, n: int, what: str) -> bytes:
    buf = f.read(n)
    if len(buf) != n:
        raise CheckpointError(f"truncated checkpoint while reading {what}")
    return buf


def write_tensors(
    f: BinaryIO, tensors: "OrderedDict[str, np.ndarray]", header: Dict[str, Any]
):
    """
    Writes a named-tensor container. ``header`` must be JSON serializable;
    the record count is added to it.
    """
    header = dict(header)
    header["num_tensors"] = len(tensors)
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    f.write(MAGIC)
    f.write(_PREFIX.pack(FORMAT_VERSION, len(header_bytes)))
    f.write(header_bytes)
    for name, value in tensors.items():
        value = np.ascontiguousarray(value, dtype=_PAYLOAD_DTYPE)
        name_bytes = name.encode("utf-8")
        f.write(_U32.pack(len(name_bytes)))
        f.write(name_bytes)
        f.write(_U32.pack(value.ndim))
        f.write(struct.pack(f"<{value.ndim}I", *value.shape))
        f.write(value.tobytes(order="C"))


def read_tensors(f: BinaryIO) -> Tuple[Dict[str, Any], "OrderedDict[str, np.ndarray]"]:
    magic = _read_exact(f, len(MAGIC), "magic")
    if magic != MAGIC:
        raise CheckpointError(f"not a slat checkpoint (magic={magic!r})")
    version, header_len = _PREFIX.unpack(_read_exact(f, _PREFIX.size, "prefix"))
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f"unsupported checkpoint format version {version}"
            f" (supported: {FORMAT_VERSION})"
        )
    try:
        header = json.loads(_read_exact(f, header_len, "header").decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"corrupt checkpoint header: {e}")

    tensors: "OrderedDict[str, np.ndarray]" = OrderedDict()
    for _ in range(int(header.get("num_tensors", 0))):
        (name_len,) = _U32.unpack(_read_exact(f, _U32.size, "name length"))
        name = _read_exact(f, name_len, "name").decode("utf-8")
        (ndim,) = _U32.unpack(_read_exact(f, _U32.size, f"{name} ndim"))
        dims = struct.unpack(f"<{ndim}I", _read_exact(f, 4 * ndim, f"{name} dims"))
        count = int(np.prod(dims, dtype=np.int64))
        payload = _read_exact(f, count * _PAYLOAD_DTYPE.itemsize, f"{name} payload")
        tensors[name] = (
            np.frombuffer(payload, dtype=_PAYLOAD_DTYPE).astype(np.float64).reshape(dims)
        )
    if f.read(1):
        raise CheckpointError("trailing bytes after the last tensor record")
    return header, tensors


def save_checkpoint(
    path: str, model: SlatModel, metadata: Optional[Dict[str, Any]] = None
):
    header = {
        "slat_config": model.cfg.to_dict(),
        "d_k": model.d_k,
        "metadata": metadata or {},
    }
    with open(path, "wb") as f:
        write_tensors(f, model.state_dict(), header)
    log.info(f"saved checkpoint ({model.num_parameters()} parameters) to {path}")


def load_checkpoint(path: str) -> Tuple[SlatModel, Dict[str, Any]]:
    """
    Rebuilds the model stored at ``path``. Returns the model and the
    ``metadata`` dict that was saved with it.
    """
    with open(path, "rb") as f:
        header, tensors = read_tensors(f)
    try:
        cfg = SlatConfig.from_dict(header["slat_config"])
        d_k = int(header["d_k"])
    except KeyError as e:
        raise CheckpointError(f"checkpoint header lacks {e}")
    model = SlatModel(cfg, d_k)
    model.load_state_dict(tensors)
    return model, header.get("metadata", {})
