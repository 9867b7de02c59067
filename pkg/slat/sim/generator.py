#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import os
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import torch.multiprocessing as mp
from slat import events, metrics
from slat.data.io import save_dataset
from slat.data.series import RunToFailureSeries
from slat.data.split import train_test_split
from slat.errors import ConfigError
from slat.sim.amplifier import (
    CHANNELS,
    GAIN_RANGE,
    INPUT_POWER_RANGE,
    OP_CONDITION_CHANNELS,
    SENSOR_NOISE_SCALE,
    GainLookup,
    settle,
)
from slat.sim.degradation import DegradationMode, calibrate_mode
from slat.sim.spec import DatasetSpec, SubDatasetSpec
from slat.utils import derive_seed, make_rng
from slat.utils.logging import get_logger


log = get_logger()

HEALTHY = "healthy"


class OperatingGrid:
    """
    The ``17 x 9`` grid of (input power dBm, target gain dB) conditions,
    powers from -35 to 1 dBm and gains from 19 to 35 dB.
    """

    __slots__ = ["powers", "gains"]

    def __init__(self, num_powers: int = 17, num_gains: int = 9):
        if num_powers < 1 or num_gains < 1:
            raise ConfigError("grid needs at least one power and one gain level")
        self.powers = np.linspace(*INPUT_POWER_RANGE, num_powers)
        self.gains = np.linspace(*GAIN_RANGE, num_gains)

    def conditions(self) -> List[Tuple[float, float]]:
        return [(float(p), float(g)) for p in self.powers for g in self.gains]

    def __len__(self) -> int:
        return len(self.powers) * len(self.gains)

    def __getitem__(self, index: int) -> Tuple[float, float]:
        p, g = divmod(index, len(self.gains))
        return float(self.powers[p]), float(self.gains[g])

    def contains(self, power: float, gain: float) -> bool:
        return bool(np.any(self.powers == power) and np.any(self.gains == gain))


def generate_run_to_failure(
    unit_id: int,
    mode: Optional[DegradationMode],
    condition: Tuple[float, float],
    seed: int,
    noise_sigma: float = 0.05,
    max_length: int = 10000,
    lookup: Optional[GainLookup] = None,
) -> RunToFailureSeries:
    """
    Steps one unit at a fixed operating condition until ``mode`` reports
    failure (that interval is the last row) or ``max_length`` rows exist.
    A unit without a mode, or whose mode never fails, ends after
    ``max_length`` rows with ``failed=False``.

    Sensor channels get Gaussian noise of ``noise_sigma`` times the
    channel's scale; operating-condition channels are exact.
    """
    if max_length < 1:
        raise ConfigError(f"max_length must be positive, got {max_length}")
    lookup = lookup or GainLookup()
    power, gain = condition

    rows = []
    failed = False
    for t in range(max_length):
        imp = mode.impairments(t) if mode is not None else None
        state = settle(gain, power, lookup, imp)
        rows.append(np.concatenate([state.op_conditions(), state.sensors()]))
        if mode is not None and mode.failed(state):
            failed = True
            break

    values = np.stack(rows)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((len(rows), len(SENSOR_NOISE_SCALE)))
    values[:, len(OP_CONDITION_CHANNELS) :] += noise * noise_sigma * SENSOR_NOISE_SCALE

    return RunToFailureSeries(
        unit_id,
        values,
        CHANNELS,
        failure_index=len(rows) - 1,
        fault_mode=mode.name if mode is not None else HEALTHY,
        num_op_conditions=len(OP_CONDITION_CHANNELS),
        failed=failed,
    )


def plan_lengths(
    num_units: int,
    row_budget: int,
    length_range: Tuple[int, int],
    rng: np.random.Generator,
) -> np.ndarray:
    """
    Random per-unit lengths within ``length_range`` that add up to
    ``row_budget`` (or as close as the range allows).
    """
    lo, hi = length_range
    if num_units * lo > row_budget * 1.05 or num_units * hi < row_budget * 0.95:
        raise ConfigError(
            f"{num_units} units of {lo}-{hi} intervals cannot fill {row_budget} rows"
        )
    draw = rng.uniform(lo, hi, size=num_units)
    lengths = np.clip(np.round(draw * row_budget / draw.sum()), lo, hi).astype(np.int64)

    missing = row_budget - int(lengths.sum())
    step = 1 if missing > 0 else -1
    i = 0
    stalled = 0
    while missing != 0 and stalled < num_units:
        j = i % num_units
        if lo <= lengths[j] + step <= hi:
            lengths[j] += step
            missing -= step
            stalled = 0
        else:
            stalled += 1
        i += 1
    return lengths


class _UnitJob:
    __slots__ = ["unit_id", "mode", "condition", "seed", "noise_sigma", "length"]

    def __init__(self, unit_id, mode, condition, seed, noise_sigma, length):
        self.unit_id = unit_id
        self.mode = mode
        self.condition = condition
        self.seed = seed
        self.noise_sigma = noise_sigma
        self.length = length


def _run_job(job: _UnitJob) -> RunToFailureSeries:
    # the calibrated mode fails at job.length - 1; twice that is a hard stop
    return generate_run_to_failure(
        job.unit_id,
        job.mode,
        job.condition,
        job.seed,
        job.noise_sigma,
        max_length=2 * job.length,
    )


def plan_units(
    spec: SubDatasetSpec,
    seed: int,
    index: int,
    grid: Optional[OperatingGrid] = None,
    lookup: Optional[GainLookup] = None,
) -> List[_UnitJob]:
    grid = grid or OperatingGrid()
    lookup = lookup or GainLookup()
    rng = make_rng(seed, index)
    n = spec.units()
    lengths = plan_lengths(n, spec.row_budget, spec.length_range, rng)
    order = rng.permutation(len(grid))

    jobs = []
    for i in range(n):
        unit_id = i + 1
        length = int(lengths[i])
        power, gain = grid[int(order[i % len(grid)])]
        unit_rng = make_rng(seed, index, unit_id)
        onset = int(unit_rng.integers(0, int(spec.onset_fraction * (length - 1)) + 1))
        mode = calibrate_mode(
            spec.group,
            spec.components[i % len(spec.components)],
            gain,
            power,
            lookup,
            failure_at=length - 1,
            onset=onset,
            threshold=spec.threshold,
        )
        jobs.append(
            _UnitJob(
                unit_id,
                mode,
                (power, gain),
                derive_seed(seed, index, unit_id, 1),
                spec.noise_sigma,
                length,
            )
        )
    return jobs


def generate_subdataset(
    spec: SubDatasetSpec, seed: int, index: int = 0, workers: int = 1
) -> List[RunToFailureSeries]:
    """
    Complete run-to-failure units of one sub-dataset, ordered by unit id.
    Units are spread over the operating grid and cycle through the
    sub-dataset's fault modes. Output is a pure function of
    ``(spec, seed, index)`` regardless of ``workers``.
    """
    jobs = plan_units(spec, seed, index)
    if workers > 1:
        with mp.get_context("spawn").Pool(workers) as pool:
            series = pool.map(_run_job, jobs)
    else:
        series = [_run_job(job) for job in jobs]

    for s in series:
        if not s.failed:
            log.warning(f"{spec.name} unit {s.unit_id} did not reach failure")
        events.record(
            "sim.unit_generated",
            metadata={
                "subdataset": spec.name,
                "unit_id": s.unit_id,
                "fault_mode": s.fault_mode,
                "length": s.length,
                "failed": s.failed,
            },
        )
    rows = sum(s.length for s in series)
    log.info(f"{spec.name}: {len(series)} units, {rows} rows (budget {spec.row_budget})")
    return sorted(series, key=lambda s: s.unit_id)


@metrics.prof(group="slat.sim")
def generate_dataset(
    spec: DatasetSpec,
    seed: int,
    out_dir: Optional[str] = None,
    workers: int = 1,
) -> Dict[str, Tuple[List[RunToFailureSeries], List[RunToFailureSeries]]]:
    """
    Generates every sub-dataset of ``spec`` and splits it into complete
    training units and truncated test units. With ``out_dir`` the splits
    are written as ``train_<name>.csv`` and ``test_<name>.csv`` plus
    sidecars.

    Returns ``{name: (train, test)}``.
    """
    out = {}
    for index, sub in enumerate(spec.subdatasets):
        series = generate_subdataset(sub, seed, index, workers)
        train, test = train_test_split(
            series,
            ratio=sub.test_ratio,
            seed=derive_seed(seed, index),
            truncate_test=True,
            window=sub.truncation_window,
        )
        out[sub.name] = (train, test)
        if out_dir is not None:
            os.makedirs(out_dir, exist_ok=True)
            metadata = {"seed": seed, "subdataset": sub.to_dict()}
            for split, units in (("train", train), ("test", test)):
                save_dataset(
                    os.path.join(out_dir, f"{split}_{sub.name}.csv"),
                    units,
                    metadata=dict(metadata, split=split),
                )
    return out


def dataset_rows(series: Sequence[RunToFailureSeries]) -> int:
    return sum(s.length for s in series)
