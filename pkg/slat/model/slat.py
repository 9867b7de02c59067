#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

from collections import OrderedDict
from typing import Dict, List, Tuple

import numpy as np
from slat.attention import AttentionMask, full_mask, sparse_mask
from slat.autograd import Tensor, ops
from slat.errors import CheckpointError, DimensionError
from slat.model.config import SlatConfig
from slat.model.layers import DecoderBlock, EncoderBlock, Linear, Module


def positional_encoding(length: int, d_model: int) -> Tensor:
    r"""
    Sinusoidal position table of shape ``length x d_model``::

      PE[t, j] = sin(t / 10000^(j / d_model))   j even
      PE[t, j] = cos(t / 10000^(j / d_model))   j odd

    The table is a constant (it never requires grad).
    """
    if length < 1 or d_model < 1:
        raise DimensionError("positional_encoding", [(length, d_model)])
    t = np.arange(length, dtype=np.float64)[:, None]
    j = np.arange(d_model, dtype=np.float64)[None, :]
    angle = t / np.power(10000.0, j / d_model)
    pe = np.where(np.arange(d_model)[None, :] % 2 == 0, np.sin(angle), np.cos(angle))
    return Tensor(pe)


class SlatModel(Module):
    """
    Sparse low-rank dual-aspect attention network for RUL regression.

    The encoder input is a ``(window + 3) x d_k`` matrix (window rows
    followed by the statistical rows). It is read twice:

    * time path: every row is a token of width ``d_k``
    * sensor path: every column (one channel over time) is a token of
      width ``window + 3``

    Each path embeds its tokens into ``d_model``, adds a positional
    encoding and runs ``encoder_blocks`` sparse pre-LN blocks. The two
    token sequences are stacked and contracted by the fusion weight
    ``W_F`` of shape ``(window + 3 + d_k) x d_model`` into a
    ``d_model x d_model`` memory (``F = W_F^T [F_time; F_sensor]``).

    The decoder embeds the ``decoder_steps`` most recent raw rows
    (no positional encoding), runs ``decoder_blocks`` blocks of
    self-attention, cross-attention onto the memory and FFN, and the
    flattened result goes through a ReLU hidden layer to a single output.

    All methods accept leading batch axes.
    """

    def __init__(self, cfg: SlatConfig, d_k: int):
        super().__init__()
        if d_k < 2:
            raise DimensionError("SlatModel", [(d_k,)], "need at least 2 input channels")
        self.cfg = cfg
        self.d_k = d_k
        attn_cfg = cfg.attention_config()
        t_enc, d = cfg.encoder_length, cfg.d_model

        self.time_embedding = self.register_module("time_embedding", Linear(d_k, d))
        self.sensor_embedding = self.register_module(
            "sensor_embedding", Linear(t_enc, d)
        )
        self.time_blocks: List[EncoderBlock] = [
            self.register_module(
                f"time_blocks.{i}", EncoderBlock(attn_cfg, cfg.ffn_hidden, cfg.ln_eps)
            )
            for i in range(cfg.encoder_blocks)
        ]
        self.sensor_blocks: List[EncoderBlock] = [
            self.register_module(
                f"sensor_blocks.{i}",
                EncoderBlock(attn_cfg, cfg.ffn_hidden, cfg.ln_eps),
            )
            for i in range(cfg.encoder_blocks)
        ]
        self.fusion = self.register_parameter(
            "fusion", (t_enc + d_k, d), fan_in=t_enc + d_k
        )
        self.decoder_embedding = self.register_module(
            "decoder_embedding", Linear(d_k, d)
        )
        self.decoder_blocks: List[DecoderBlock] = [
            self.register_module(
                f"decoder_blocks.{i}", DecoderBlock(attn_cfg, cfg.ffn_hidden, cfg.ln_eps)
            )
            for i in range(cfg.decoder_blocks)
        ]
        self.head_hidden = self.register_module(
            "head_hidden", Linear(cfg.decoder_steps * d, cfg.head_hidden)
        )
        self.head_out = self.register_module("head_out", Linear(cfg.head_hidden, 1))

        self.time_pe = positional_encoding(t_enc, d)
        self.sensor_pe = positional_encoding(d_k, d)

        m = cfg.decoder_steps
        self.time_mask: AttentionMask = sparse_mask(
            t_enc, cfg.band_half_width, cfg.global_nodes
        )
        self.sensor_mask: AttentionMask = sparse_mask(
            d_k, cfg.sensor_half_width, cfg.sensor_num_global
        )
        self.decoder_mask: AttentionMask = (
            sparse_mask(m, cfg.band_half_width, cfg.global_nodes)
            if cfg.sparse_decoder
            else full_mask(m, m)
        )
        self.cross_mask: AttentionMask = full_mask(m, d)

    # shapes

    @property
    def encoder_shape(self) -> Tuple[int, int]:
        return (self.cfg.encoder_length, self.d_k)

    @property
    def decoder_shape(self) -> Tuple[int, int]:
        return (self.cfg.decoder_steps, self.d_k)

    def _check_input(self, name: str, x: Tensor, expected: Tuple[int, int]):
        if x.ndim < 2 or tuple(x.shape[-2:]) != expected:
            raise DimensionError(f"SlatModel.{name}", [x.shape, expected])

    # forward pieces

    def encode_paths(self, encoder: Tensor) -> Tuple[Tensor, Tensor]:
        """
        Runs both encoder paths. Returns ``(F_time, F_sensor)`` of shapes
        ``[..., window + 3, d_model]`` and ``[..., d_k, d_model]``.
        """
        encoder = _tensor(encoder)
        self._check_input("encode", encoder, self.encoder_shape)

        x = ops.add(self.time_embedding(encoder), self.time_pe)
        for block in self.time_blocks:
            x = block(x, self.time_mask)

        s = ops.add(self.sensor_embedding(ops.transpose(encoder)), self.sensor_pe)
        for block in self.sensor_blocks:
            s = block(s, self.sensor_mask)
        return x, s

    def fuse(self, time_features: Tensor, sensor_features: Tensor) -> Tensor:
        stacked = ops.concat([time_features, sensor_features], axis=-2)
        return ops.matmul(ops.transpose(self.fusion), stacked)

    def encode(self, encoder: Tensor) -> Tensor:
        """Fused memory ``[..., d_model, d_model]``."""
        return self.fuse(*self.encode_paths(encoder))

    def decode(self, decoder: Tensor, memory: Tensor) -> Tensor:
        """
        Decoder output ``[..., decoder_steps, d_model]``.
        """
        decoder = _tensor(decoder)
        self._check_input("decode", decoder, self.decoder_shape)
        d = self.cfg.d_model
        if memory.ndim < 2 or tuple(memory.shape[-2:]) != (d, d):
            raise DimensionError("SlatModel.decode", [memory.shape, (d, d)], "memory")

        y = self.decoder_embedding(decoder)
        for block in self.decoder_blocks:
            y = block(y, memory, self.decoder_mask, self.cross_mask)
        return y

    def head(self, decoded: Tensor) -> Tensor:
        # one row of width M * d_model per item
        batch = decoded.shape[:-2]
        flat = ops.reshape(decoded, batch + (1, decoded.shape[-2] * decoded.shape[-1]))
        h = ops.relu(self.head_hidden(flat))
        out = ops.reshape(self.head_out(h), batch)
        if self.cfg.scale_output:
            out = ops.scale(out, self.cfg.rul_max)
        return out

    def forward(self, encoder: Tensor, decoder: Tensor) -> Tensor:
        """
        Predicted RUL, one value per batch item (a 0-d tensor for
        unbatched input).
        """
        encoder, decoder = _tensor(encoder), _tensor(decoder)
        if encoder.shape[:-2] != decoder.shape[:-2]:
            raise DimensionError(
                "SlatModel.forward", [encoder.shape, decoder.shape], "batch axes differ"
            )
        return self.head(self.decode(decoder, self.encode(encoder)))

    __call__ = forward

    def predict(
        self, encoder: np.ndarray, decoder: np.ndarray, batch_size: int = 256
    ) -> np.ndarray:
        """
        Inference over stacked inputs ``[N, window + 3, d_k]`` and
        ``[N, decoder_steps, d_k]``. Nothing is recorded for backward.
        """
        encoder = np.asarray(encoder, dtype=np.float64)
        decoder = np.asarray(decoder, dtype=np.float64)
        n = encoder.shape[0]
        out = np.empty(n, dtype=np.float64)
        for start in range(0, n, batch_size):
            stop = min(start + batch_size, n)
            out[start:stop] = self.forward(
                Tensor(encoder[start:stop]), Tensor(decoder[start:stop])
            ).data
        return out

    # state

    def state_dict(self) -> "OrderedDict[str, np.ndarray]":
        return OrderedDict((name, t.data.copy()) for name, t in self.named_parameters())

    def load_state_dict(self, state: Dict[str, np.ndarray]):
        params = OrderedDict(self.named_parameters())
        missing = [k for k in params if k not in state]
        unexpected = [k for k in state if k not in params]
        if missing or unexpected:
            raise CheckpointError(
                f"state does not match the model: missing={missing[:5]}"
                f" unexpected={unexpected[:5]}"
            )
        for name, t in params.items():
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != t.shape:
                raise DimensionError(f"load_state_dict[{name}]", [t.shape, value.shape])
            t.data[...] = value


def _tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def init_parameters(cfg: SlatConfig, d_k: int, seed: int) -> SlatModel:
    """
    Builds a model and initializes it from ``seed``: every weight matrix
    and bias is drawn from ``U(-1/sqrt(fan_in), 1/sqrt(fan_in))`` in
    parameter registration order, norm gains are 1 and norm biases 0.
    """
    model = SlatModel(cfg, d_k)
    model.reset_parameters(np.random.default_rng(seed))
    return model
