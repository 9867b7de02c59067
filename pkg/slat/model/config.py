#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

from typing import Any, Dict, Optional

from slat.attention import DEFAULT_MAX_D_MODEL, MultiHeadConfig
from slat.autograd.ops import DEFAULT_LN_EPS
from slat.errors import ConfigError


# mean, successor-regression slope and intercept rows appended to a window
NUM_STAT_ROWS = 3


class SlatConfig:
    """
    Structural parameters of a SLAT network. Defaults follow the
    published configuration: 64 hidden units, 4 encoder blocks per path,
    2 decoder blocks, 8 heads, a 64-unit ReLU head and a window of 40.

    Arguments:
        d_model: embedding width of both encoder paths and the decoder
        encoder_blocks: ``n``, blocks per encoder path
        decoder_blocks: ``m``
        heads: ``h``
        ffn_hidden: hidden width of the position-wise feed-forward nets
        window: ``T_w``, sliding window length
        decoder_steps: ``M``, number of most recent window rows fed to the decoder
        band_half_width: band pattern half width of the time path
        global_nodes: number of leading global positions of the time path
        sensor_band_half_width: band half width of the sensor path
            (``None``: same as the time path)
        sensor_global_nodes: global positions of the sensor path
            (``None``: same as the time path)
        sparse_decoder: also apply the band/global pattern to the
            decoder self-attention
        per_head_scaling: scale scores by ``sqrt(head_dim)`` instead of
            ``sqrt(d_model)``
        head_hidden: width of the hidden layer of the regression head
        rul_max: cap of the RUL targets
        scale_output: the head predicts ``RUL / rul_max`` and the model
            multiplies its output by ``rul_max``
        max_d_model: low-rank ceiling on ``d_model``
        ln_eps: layer norm epsilon
    """

    __slots__ = [
        "d_model",
        "encoder_blocks",
        "decoder_blocks",
        "heads",
        "ffn_hidden",
        "window",
        "decoder_steps",
        "band_half_width",
        "global_nodes",
        "sensor_band_half_width",
        "sensor_global_nodes",
        "sparse_decoder",
        "per_head_scaling",
        "head_hidden",
        "rul_max",
        "scale_output",
        "max_d_model",
        "ln_eps",
    ]

    def __init__(
        self,
        d_model: int = 64,
        encoder_blocks: int = 4,
        decoder_blocks: int = 2,
        heads: int = 8,
        ffn_hidden: int = 64,
        window: int = 40,
        decoder_steps: int = 1,
        band_half_width: int = 2,
        global_nodes: int = 1,
        sensor_band_half_width: Optional[int] = None,
        sensor_global_nodes: Optional[int] = None,
        sparse_decoder: bool = False,
        per_head_scaling: bool = False,
        head_hidden: int = 64,
        rul_max: float = 125.0,
        scale_output: bool = True,
        max_d_model: int = DEFAULT_MAX_D_MODEL,
        ln_eps: float = DEFAULT_LN_EPS,
    ):
        self.d_model = int(d_model)
        self.encoder_blocks = int(encoder_blocks)
        self.decoder_blocks = int(decoder_blocks)
        self.heads = int(heads)
        self.ffn_hidden = int(ffn_hidden)
        self.window = int(window)
        self.decoder_steps = int(decoder_steps)
        self.band_half_width = int(band_half_width)
        self.global_nodes = int(global_nodes)
        self.sensor_band_half_width = (
            None if sensor_band_half_width is None else int(sensor_band_half_width)
        )
        self.sensor_global_nodes = (
            None if sensor_global_nodes is None else int(sensor_global_nodes)
        )
        self.sparse_decoder = bool(sparse_decoder)
        self.per_head_scaling = bool(per_head_scaling)
        self.head_hidden = int(head_hidden)
        self.rul_max = float(rul_max)
        self.scale_output = bool(scale_output)
        self.max_d_model = int(max_d_model)
        self.ln_eps = float(ln_eps)
        self._validate()

    def _validate(self):
        # raises ConfigError on bad d_model/heads combinations
        self.attention_config()
        if self.encoder_blocks < 1 or self.decoder_blocks < 1:
            raise ConfigError(
                f"need at least one encoder and decoder block"
                f" (n={self.encoder_blocks}, m={self.decoder_blocks})"
            )
        if not 1 <= self.decoder_steps < self.window:
            raise ConfigError(
                f"decoder_steps must satisfy 1 <= M < window"
                f" (M={self.decoder_steps}, window={self.window})"
            )
        if self.ffn_hidden < 1 or self.head_hidden < 1:
            raise ConfigError("ffn_hidden and head_hidden must be positive")
        for name in ("band_half_width", "global_nodes"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        for name in ("sensor_band_half_width", "sensor_global_nodes"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ConfigError(f"{name} must be >= 0")
        if self.rul_max <= 0:
            raise ConfigError(f"rul_max must be positive, got {self.rul_max}")
        if self.ln_eps <= 0:
            raise ConfigError(f"ln_eps must be positive, got {self.ln_eps}")

    @property
    def encoder_length(self) -> int:
        """Rows of the encoder input: the window plus the statistical rows."""
        return self.window + NUM_STAT_ROWS

    @property
    def sensor_half_width(self) -> int:
        if self.sensor_band_half_width is None:
            return self.band_half_width
        return self.sensor_band_half_width

    @property
    def sensor_num_global(self) -> int:
        if self.sensor_global_nodes is None:
            return self.global_nodes
        return self.sensor_global_nodes

    def attention_config(self) -> MultiHeadConfig:
        return MultiHeadConfig(
            self.d_model,
            self.heads,
            max_d_model=self.max_d_model,
            per_head_scaling=self.per_head_scaling,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {s: getattr(self, s) for s in self.__slots__}

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "SlatConfig":
        unknown = set(d) - set(cls.__slots__)
        if unknown:
            raise ConfigError(f"unknown SlatConfig fields: {sorted(unknown)}")
        return cls(**d)

    def __eq__(self, other):
        return isinstance(other, SlatConfig) and self.to_dict() == other.to_dict()

    def __repr__(self):
        fields = ", ".join(f"{k}={v}" for k, v in self.to_dict().items())
        return f"SlatConfig({fields})"
