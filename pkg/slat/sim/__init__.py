#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

"""
Synthetic run-to-failure data of a two-stage EDFA.

Four sub-datasets follow the degradation groups: ``FD1`` pumps,
``FD2`` power detectors, ``FD3`` the VOA and ``FD4`` passive components.
Every unit runs at one condition of the 153-point operating grid until
its degrading component crosses its failure threshold.

::

  from slat.sim import generate_dataset, preset

  splits = generate_dataset(preset("mini"), seed=0, out_dir="data/")
"""

from slat.sim.amplifier import (  # noqa F401
    CHANNELS,
    OP_CONDITION_CHANNELS,
    SENSOR_CHANNELS,
    AmplifierState,
    GainLookup,
    Impairments,
    gain_split,
    settle,
)
from slat.sim.degradation import (  # noqa F401
    COMPONENTS,
    PASSIVE,
    PD,
    PUMP,
    VOA,
    DegradationMode,
    calibrate_mode,
    degrade,
    degrade_passive,
    degrade_pd,
    degrade_pump,
    degrade_voa,
)
from slat.sim.generator import (  # noqa F401
    OperatingGrid,
    dataset_rows,
    generate_dataset,
    generate_run_to_failure,
    generate_subdataset,
    plan_lengths,
)
from slat.sim.spec import (  # noqa F401
    DatasetSpec,
    SubDatasetSpec,
    dump_spec,
    full_spec,
    load_spec,
    mini_spec,
    preset,
)
