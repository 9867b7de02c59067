#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

"""
Behavioral steady-state model of a two-stage, gain-controlled EDFA.

Signal path (powers in dBm, gains and losses in dB)::

  in -> coupler_in -> [PD in1] stage 1 (pump1, GFF) [PD out1]
     -> isolator -> VOA -> [PD in2] stage 2 (pump2) [PD out2] -> coupler_out -> out

Each stage is held at its target gain by an AGC loop that trusts its two
power detectors. The VOA is driven open loop. A stage whose pump cannot
deliver the required power falls short of its target gain.
"""

from typing import Dict, Optional, Tuple

import numpy as np
from slat.errors import ConfigError


INPUT_POWER_RANGE = (-35.0, 1.0)
GAIN_RANGE = (19.0, 35.0)

OP_CONDITION_CHANNELS = ("input_power", "target_gain")
SENSOR_CHANNELS = (
    "pump_current1",
    "pump_current2",
    "pump_power1",
    "pump_power2",
    "pd_in1",
    "pd_out1",
    "pd_in2",
    "pd_out2",
    "voa_voltage",
    "gain1",
    "gain2",
    "gain_total",
    "tilt",
)
CHANNELS = OP_CONDITION_CHANNELS + SENSOR_CHANNELS

# multiplier of the noise sigma per sensor channel (mA, mW, dBm, dB, V)
SENSOR_NOISE_SCALE = np.array(
    [10.0, 10.0, 10.0, 10.0, 1.0, 1.0, 1.0, 1.0, 0.2, 1.0, 1.0, 1.0, 1.0]
)

PD_NAMES = ("pd_in1", "pd_out1", "pd_in2", "pd_out2")
PASSIVE_NAMES = ("coupler_in", "gff", "isolator", "coupler_out")

# pump: P = eta * (I - I_th), P in mW, I in mA
PUMP_EFFICIENCY = 0.8
PUMP_THRESHOLD_MA = 30.0
PUMP_MAX_MA = 600.0
# required pump power: base + per dB of stage gain + per dB of stage input above -35 dBm
PUMP_BASE_MW = 20.0
PUMP_MW_PER_DB_GAIN = 6.0
PUMP_MW_PER_DB_INPUT = 2.0

VOA_DB_PER_VOLT = 1.0
TILT_PER_DB_INPUT2 = 0.3
TILT_PER_DB_GFF = 0.5


class GainLookup:
    """
    Design-time table mapping the target gain ``G`` to the stage gains.
    ``G1`` and ``G2`` are linearly interpolated between the table rows;
    the interstage loss is whatever closes the budget,
    ``LOSS_INT = G - G1 - G2``.
    """

    __slots__ = ["gains", "stage1", "stage2"]

    def __init__(
        self,
        gains: Optional[np.ndarray] = None,
        stage1: Optional[np.ndarray] = None,
        stage2: Optional[np.ndarray] = None,
    ):
        if gains is None:
            gains = np.linspace(GAIN_RANGE[0], GAIN_RANGE[1], 17)
        gains = np.asarray(gains, dtype=np.float64)
        if stage1 is None:
            stage1 = 14.0 + 0.25 * (gains - GAIN_RANGE[0])
        if stage2 is None:
            stage2 = 12.0 + 0.5 * (gains - GAIN_RANGE[0])
        stage1 = np.asarray(stage1, dtype=np.float64)
        stage2 = np.asarray(stage2, dtype=np.float64)
        if not (gains.shape == stage1.shape == stage2.shape) or gains.ndim != 1:
            raise ConfigError("gain lookup columns must be 1-D and of equal length")
        if np.any(np.diff(gains) <= 0):
            raise ConfigError("gain lookup must be strictly increasing in G")
        if np.any(np.diff(stage1) < 0) or np.any(np.diff(stage2) < 0):
            raise ConfigError("stage gains must be non-decreasing in G")
        if np.any(gains - stage1 - stage2 > 0):
            raise ConfigError("lookup implies a positive interstage loss")
        self.gains = gains
        self.stage1 = stage1
        self.stage2 = stage2

    @property
    def range(self) -> Tuple[float, float]:
        return float(self.gains[0]), float(self.gains[-1])


def gain_split(gain: float, lookup: GainLookup) -> Tuple[float, float, float]:
    """
    ``(G1, G2, LOSS_INT)`` for target gain ``gain``, with
    ``G1 + G2 + LOSS_INT == gain``.
    """
    lo, hi = lookup.range
    if not lo <= gain <= hi:
        raise ConfigError(f"target gain {gain} dB outside [{lo}, {hi}]")
    g1 = float(np.interp(gain, lookup.gains, lookup.stage1))
    g2 = float(np.interp(gain, lookup.gains, lookup.stage2))
    return g1, g2, gain - g1 - g2


class Impairments:
    """
    Component condition at one interval. The default is a healthy
    amplifier.

    Arguments:
        pump_efficiency: ``{"pump1": eta, "pump2": eta}`` in mW/mA
        pd_bias: reading error per PD in dB (negative: reads low)
        voa_error: fraction by which the realized VOA attenuation falls
            short of the commanded one
        excess_loss: extra insertion loss per passive component in dB
    """

    __slots__ = ["pump_efficiency", "pd_bias", "voa_error", "excess_loss"]

    def __init__(
        self,
        pump_efficiency: Optional[Dict[str, float]] = None,
        pd_bias: Optional[Dict[str, float]] = None,
        voa_error: float = 0.0,
        excess_loss: Optional[Dict[str, float]] = None,
    ):
        self.pump_efficiency = {"pump1": PUMP_EFFICIENCY, "pump2": PUMP_EFFICIENCY}
        self.pump_efficiency.update(pump_efficiency or {})
        self.pd_bias = {name: 0.0 for name in PD_NAMES}
        self.pd_bias.update(pd_bias or {})
        self.voa_error = float(voa_error)
        self.excess_loss = {name: 0.0 for name in PASSIVE_NAMES}
        self.excess_loss.update(excess_loss or {})


class PumpState:
    __slots__ = ["current", "power", "required", "deficit"]

    def __init__(self, current: float, power: float, required: float, deficit: float):
        self.current = current
        self.power = power
        self.required = required
        # gain (dB) the stage falls short of because the pump is saturated
        self.deficit = deficit


def required_pump_power(stage_gain: float, stage_input: float) -> float:
    return (
        PUMP_BASE_MW
        + PUMP_MW_PER_DB_GAIN * stage_gain
        + PUMP_MW_PER_DB_INPUT * (stage_input - INPUT_POWER_RANGE[0])
    )


def drive_pump(stage_gain: float, stage_input: float, efficiency: float) -> PumpState:
    """
    Current the AGC sets to deliver the pump power a stage needs. Above
    ``PUMP_MAX_MA`` the current is clamped and the missing power turns
    into a gain deficit.
    """
    required = required_pump_power(stage_gain, stage_input)
    current = required / efficiency + PUMP_THRESHOLD_MA
    if current <= PUMP_MAX_MA:
        return PumpState(current, required, required, 0.0)
    power = efficiency * (PUMP_MAX_MA - PUMP_THRESHOLD_MA)
    return PumpState(
        PUMP_MAX_MA, power, required, (required - power) / PUMP_MW_PER_DB_GAIN
    )


class AmplifierState:
    """
    Steady state at one operating condition. ``s*`` fields are true
    optical powers (dBm); ``pd_*`` fields are what the detectors report.
    ``g1``, ``g2`` and ``loss_int`` are the realized stage gains and
    interstage loss, so a healthy amplifier satisfies
    ``target_gain == g1 + g2 + loss_int``.
    """

    __slots__ = [
        "target_gain",
        "input_power",
        "g1_target",
        "g2_target",
        "loss_target",
        "g1",
        "g2",
        "loss_int",
        "voa_loss",
        "s1_in",
        "s1_out",
        "s2_in",
        "s2_out",
        "output_power",
        "pd_in1",
        "pd_out1",
        "pd_in2",
        "pd_out2",
        "pump1",
        "pump2",
        "voa_voltage",
        "tilt",
        "impairments",
    ]

    def __init__(self, **fields):
        for name in self.__slots__:
            setattr(self, name, fields[name])

    @property
    def total_gain(self) -> float:
        """True gain between the stage-1 input and the stage-2 output."""
        return self.s2_out - self.s1_in

    @property
    def reported_gain1(self) -> float:
        return self.pd_out1 - self.pd_in1

    @property
    def reported_gain2(self) -> float:
        return self.pd_out2 - self.pd_in2

    @property
    def reported_gain(self) -> float:
        return self.pd_out2 - self.pd_in1

    def budget_residual(self) -> float:
        """``target_gain - (g1 + g2 + loss_int)``; 0 when healthy."""
        return self.target_gain - (self.g1 + self.g2 + self.loss_int)

    def accounting_residual(self) -> float:
        """
        ``total_gain - (reported_gain1 + reported_gain2 + loss_int)``.
        Equals minus the net detector bias
        ``(b_out1 - b_in1) + (b_out2 - b_in2)``.
        """
        return self.total_gain - (
            self.reported_gain1 + self.reported_gain2 + self.loss_int
        )

    def sensors(self) -> np.ndarray:
        """Noiseless sensor vector in ``SENSOR_CHANNELS`` order."""
        return np.array(
            [
                self.pump1.current,
                self.pump2.current,
                self.pump1.power,
                self.pump2.power,
                self.pd_in1,
                self.pd_out1,
                self.pd_in2,
                self.pd_out2,
                self.voa_voltage,
                self.reported_gain1,
                self.reported_gain2,
                self.reported_gain,
                self.tilt,
            ]
        )

    def op_conditions(self) -> np.ndarray:
        return np.array([self.input_power, self.target_gain])


def settle(
    target_gain: float,
    input_power: float,
    lookup: GainLookup,
    impairments: Optional[Impairments] = None,
) -> AmplifierState:
    """
    Fixed point of both AGC loops for one operating condition.
    """
    lo, hi = INPUT_POWER_RANGE
    if not lo <= input_power <= hi:
        raise ConfigError(f"input power {input_power} dBm outside [{lo}, {hi}]")
    imp = impairments or Impairments()
    bias, excess = imp.pd_bias, imp.excess_loss
    g1_t, g2_t, loss_t = gain_split(target_gain, lookup)

    # stage 1: the AGC holds pd_out1 - pd_in1 at g1_t
    s1_in = input_power - excess["coupler_in"]
    g1 = g1_t - (bias["pd_out1"] - bias["pd_in1"])
    pump1 = drive_pump(
        g1 + excess["gff"], s1_in, imp.pump_efficiency["pump1"]
    )
    g1 -= pump1.deficit
    s1_out = s1_in + g1

    # interstage
    voa_voltage = -loss_t / VOA_DB_PER_VOLT
    voa_loss = loss_t * (1.0 - imp.voa_error)
    loss_int = voa_loss - excess["isolator"]
    s2_in = s1_out + loss_int

    # stage 2: the output tap sits behind coupler_out, so the AGC makes up its loss
    g2_fiber = g2_t + excess["coupler_out"] - (bias["pd_out2"] - bias["pd_in2"])
    pump2 = drive_pump(g2_fiber, s2_in, imp.pump_efficiency["pump2"])
    g2_fiber -= pump2.deficit
    s2_out = s2_in + g2_fiber - excess["coupler_out"]

    nominal_s2_in = input_power + g1_t + loss_t
    tilt = TILT_PER_DB_INPUT2 * (s2_in - nominal_s2_in) + TILT_PER_DB_GFF * excess["gff"]

    return AmplifierState(
        target_gain=target_gain,
        input_power=input_power,
        g1_target=g1_t,
        g2_target=g2_t,
        loss_target=loss_t,
        g1=g1,
        g2=s2_out - s2_in,
        loss_int=loss_int,
        voa_loss=voa_loss,
        s1_in=s1_in,
        s1_out=s1_out,
        s2_in=s2_in,
        s2_out=s2_out,
        output_power=s2_out,
        pd_in1=s1_in + bias["pd_in1"],
        pd_out1=s1_out + bias["pd_out1"],
        pd_in2=s2_in + bias["pd_in2"],
        pd_out2=s2_out + bias["pd_out2"],
        pump1=pump1,
        pump2=pump2,
        voa_voltage=voa_voltage,
        tilt=tilt,
        impairments=imp,
    )
