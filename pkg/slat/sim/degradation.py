#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import math
from typing import Any, Dict, Tuple

from slat.errors import ConfigError, ContractError
from slat.sim.amplifier import (
    PASSIVE_NAMES,
    PD_NAMES,
    PUMP_EFFICIENCY,
    PUMP_MAX_MA,
    PUMP_MW_PER_DB_GAIN,
    PUMP_THRESHOLD_MA,
    AmplifierState,
    GainLookup,
    Impairments,
    settle,
)


PUMP = "PUMP"
PD = "PD"
VOA = "VOA"
PASSIVE = "PASSIVE"

COMPONENTS: Dict[str, Tuple[str, ...]] = {
    PUMP: ("pump1", "pump2"),
    PD: PD_NAMES,
    VOA: ("voa",),
    PASSIVE: PASSIVE_NAMES,
}

LINEAR = "linear"
EXPONENTIAL = "exponential"

DEFAULT_THRESHOLD_DB = 1.0
# exponential drift: scale * (exp(rate * (t - onset)) - 1)
DEFAULT_EXP_SCALE = 0.01


class DegradationMode:
    """
    How one component of one unit wears out.

    The drift variable is 0 up to ``onset`` and grows monotonically after
    it, linearly (``rate * (t - onset)``) or exponentially
    (``scale * (exp(rate * (t - onset)) - 1)``). What it means depends on
    the group:

    * ``PUMP``: loss of pump efficiency (mW/mA)
    * ``PD``: reading bias in dB (the detector reads low)
    * ``VOA``: fraction of the commanded attenuation that is lost
    * ``PASSIVE``: excess insertion loss in dB

    The unit fails once ``failure_metric`` exceeds ``threshold``.
    """

    __slots__ = ["group", "component", "law", "rate", "onset", "threshold", "scale"]

    def __init__(
        self,
        group: str,
        component: str,
        law: str = LINEAR,
        rate: float = 0.0,
        onset: int = 0,
        threshold: float = DEFAULT_THRESHOLD_DB,
        scale: float = DEFAULT_EXP_SCALE,
    ):
        if group not in COMPONENTS:
            raise ConfigError(f"unknown degradation group {group}")
        if component not in COMPONENTS[group]:
            raise ConfigError(
                f"{component} is not a {group} component {COMPONENTS[group]}"
            )
        if law not in (LINEAR, EXPONENTIAL):
            raise ConfigError(f"unknown drift law {law}")
        if rate < 0 or onset < 0 or threshold <= 0 or scale <= 0:
            raise ConfigError(
                f"bad drift parameters rate={rate} onset={onset}"
                f" threshold={threshold} scale={scale}"
            )
        self.group = group
        self.component = component
        self.law = law
        self.rate = float(rate)
        self.onset = int(onset)
        self.threshold = float(threshold)
        self.scale = float(scale)

    @property
    def name(self) -> str:
        return f"{self.group}:{self.component}"

    def drift(self, t: int) -> float:
        dt = max(0, t - self.onset)
        if self.law == LINEAR:
            return self.rate * dt
        return self.scale * math.expm1(self.rate * dt)

    def impairments(self, t: int) -> Impairments:
        d = self.drift(t)
        if self.group == PUMP:
            return Impairments(pump_efficiency={self.component: PUMP_EFFICIENCY - d})
        if self.group == PD:
            return Impairments(pd_bias={self.component: -d})
        if self.group == VOA:
            return Impairments(voa_error=d)
        return Impairments(excess_loss={self.component: d})

    def failure_metric(self, state: AmplifierState) -> float:
        """
        The quantity compared against ``threshold`` (dB): the gain deficit
        of the degraded pump's stage, the PD's reading error, the error of
        the realized interstage attenuation or the excess loss.
        """
        imp = state.impairments
        if self.group == PUMP:
            pump = state.pump1 if self.component == "pump1" else state.pump2
            return pump.deficit
        if self.group == PD:
            return abs(imp.pd_bias[self.component])
        if self.group == VOA:
            return abs(state.voa_loss - state.loss_target)
        return imp.excess_loss[self.component]

    def failed(self, state: AmplifierState) -> bool:
        return self.failure_metric(state) > self.threshold

    def to_dict(self) -> Dict[str, Any]:
        return {s: getattr(self, s) for s in self.__slots__}

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "DegradationMode":
        return cls(**d)

    def __repr__(self):
        return (
            f"DegradationMode({self.name}, law={self.law}, rate={self.rate:.6g},"
            f" onset={self.onset})"
        )


def default_law(group: str) -> str:
    return EXPONENTIAL if group == VOA else LINEAR


def calibrate_mode(
    group: str,
    component: str,
    target_gain: float,
    input_power: float,
    lookup: GainLookup,
    failure_at: int,
    onset: int,
    threshold: float = DEFAULT_THRESHOLD_DB,
) -> DegradationMode:
    r"""
    A mode whose failure metric crosses ``threshold`` half an interval
    before ``failure_at``, so that stepping the unit reports failure at
    ``failure_at``.
    """
    if not 0 <= onset < failure_at:
        raise ConfigError(f"onset {onset} must precede failure at {failure_at}")
    horizon = failure_at - onset - 0.5
    law = default_law(group)

    if group == PUMP:
        # efficiency below which the saturated pump misses the gain by threshold
        healthy = settle(target_gain, input_power, lookup)
        pump = healthy.pump1 if component == "pump1" else healthy.pump2
        critical = (pump.required - PUMP_MW_PER_DB_GAIN * threshold) / (
            PUMP_MAX_MA - PUMP_THRESHOLD_MA
        )
        if critical >= PUMP_EFFICIENCY:
            raise ConfigError(f"{component} cannot hold the gain even when healthy")
        rate = (PUMP_EFFICIENCY - critical) / horizon
    elif group == VOA:
        loss_t = settle(target_gain, input_power, lookup).loss_target
        # fraction of the commanded attenuation whose loss is the threshold
        critical = threshold / abs(loss_t)
        rate = math.log1p(critical / DEFAULT_EXP_SCALE) / horizon
    else:
        rate = threshold / horizon
    return DegradationMode(group, component, law, rate, onset, threshold)


def _degrade(
    state: AmplifierState, mode: DegradationMode, t: int, lookup: GainLookup, group: str
) -> AmplifierState:
    if mode.group != group:
        raise ContractError(f"expected a {group} mode, got {mode.name}")
    return settle(state.target_gain, state.input_power, lookup, mode.impairments(t))


def degrade_pump(
    state: AmplifierState, mode: DegradationMode, t: int, lookup: GainLookup
) -> AmplifierState:
    """
    State at interval ``t`` of a unit whose pump loses efficiency. The AGC
    raises the pump current to keep the pump power; once the current is
    at ``PUMP_MAX_MA`` the stage gain drops.
    """
    return _degrade(state, mode, t, lookup, PUMP)


def degrade_pd(
    state: AmplifierState, mode: DegradationMode, t: int, lookup: GainLookup
) -> AmplifierState:
    """
    A detector that reads low steers its stage's AGC: a low output reading
    raises the realized gain, a low input reading lowers it.
    """
    return _degrade(state, mode, t, lookup, PD)


def degrade_voa(
    state: AmplifierState, mode: DegradationMode, t: int, lookup: GainLookup
) -> AmplifierState:
    """
    The VOA attenuates less than commanded: stage 2 sees more input power,
    its pump works harder and the tilt shifts.
    """
    return _degrade(state, mode, t, lookup, VOA)


def degrade_passive(
    state: AmplifierState, mode: DegradationMode, t: int, lookup: GainLookup
) -> AmplifierState:
    """
    Excess loss whose effect depends on the position: the couplers shift
    the calibration of the detectors that tap them, the GFF loss is made
    up by pump 1 and tilts the spectrum, the isolator loss adds to the
    interstage loss.
    """
    return _degrade(state, mode, t, lookup, PASSIVE)


DEGRADE = {PUMP: degrade_pump, PD: degrade_pd, VOA: degrade_voa, PASSIVE: degrade_passive}


def degrade(
    state: AmplifierState, mode: DegradationMode, t: int, lookup: GainLookup
) -> AmplifierState:
    return DEGRADE[mode.group](state, mode, t, lookup)
