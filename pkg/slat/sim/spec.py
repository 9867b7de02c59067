#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

"""
Generator spec: a versioned YAML document describing the sub-datasets.

::

  format_version: 1
  subdatasets:
    - name: FD3
      group: VOA
      components: [voa]
      row_budget: 1199
      length_range: [60, 120]
      onset_fraction: 0.3
      noise_sigma: 0.05
      threshold: 1.0
      test_ratio: 0.33
      truncation_window: 40

``num_units`` may be given explicitly; by default it is the row budget
divided by the mean series length.
"""

from typing import Any, Dict, List, Optional, Sequence, Tuple

import yaml
from slat.data.split import DEFAULT_TEST_RATIO
from slat.errors import ConfigError
from slat.sim.degradation import COMPONENTS, DEFAULT_THRESHOLD_DB, PASSIVE, PD, PUMP, VOA


SPEC_FORMAT_VERSION = 1

# fault modes per sub-dataset
SUBDATASET_GROUPS = {"FD1": PUMP, "FD2": PD, "FD3": VOA, "FD4": PASSIVE}

# rows (train + test) of the reference sub-datasets
REFERENCE_ROWS = {
    "FD1": 92100 + 27652,
    "FD2": 184100 + 56069,
    "FD3": 46950 + 12980,
    "FD4": 184100 + 55835,
}

MINI_FRACTION = 0.02
FULL_LENGTH_RANGE = (150, 350)
MINI_LENGTH_RANGE = (60, 120)


class SubDatasetSpec:
    """
    One sub-dataset: a degradation group, the components that may fail
    (one fault mode each) and the size of the generated data.
    """

    __slots__ = [
        "name",
        "group",
        "components",
        "row_budget",
        "num_units",
        "length_range",
        "onset_fraction",
        "noise_sigma",
        "threshold",
        "test_ratio",
        "truncation_window",
    ]

    def __init__(
        self,
        name: str,
        group: str,
        components: Optional[Sequence[str]] = None,
        row_budget: int = 10000,
        num_units: Optional[int] = None,
        length_range: Tuple[int, int] = FULL_LENGTH_RANGE,
        onset_fraction: float = 0.3,
        noise_sigma: float = 0.05,
        threshold: float = DEFAULT_THRESHOLD_DB,
        test_ratio: float = DEFAULT_TEST_RATIO,
        truncation_window: int = 40,
    ):
        if group not in COMPONENTS:
            raise ConfigError(f"{name}: unknown degradation group {group}")
        components = list(components) if components else list(COMPONENTS[group])
        unknown = [c for c in components if c not in COMPONENTS[group]]
        if unknown:
            raise ConfigError(f"{name}: {unknown} are not {group} components")
        lo, hi = (int(v) for v in length_range)
        if not 2 <= lo <= hi:
            raise ConfigError(f"{name}: bad length_range {length_range}")
        if row_budget < 2 * lo:
            raise ConfigError(f"{name}: row_budget {row_budget} below two units")
        if num_units is not None and num_units < 2:
            raise ConfigError(f"{name}: need at least 2 units, got {num_units}")
        if not 0.0 <= onset_fraction < 1.0:
            raise ConfigError(f"{name}: onset_fraction must lie in [0, 1)")
        if noise_sigma < 0 or threshold <= 0:
            raise ConfigError(f"{name}: bad noise_sigma or threshold")
        if not 0.0 < test_ratio < 1.0:
            raise ConfigError(f"{name}: test_ratio must lie in (0, 1)")
        if truncation_window < 1:
            raise ConfigError(f"{name}: truncation_window must be positive")
        self.name = name
        self.group = group
        self.components = components
        self.row_budget = int(row_budget)
        self.num_units = None if num_units is None else int(num_units)
        self.length_range = (lo, hi)
        self.onset_fraction = float(onset_fraction)
        self.noise_sigma = float(noise_sigma)
        self.threshold = float(threshold)
        self.test_ratio = float(test_ratio)
        self.truncation_window = int(truncation_window)

    def units(self) -> int:
        if self.num_units is not None:
            return self.num_units
        mean_length = 0.5 * (self.length_range[0] + self.length_range[1])
        return max(2, int(round(self.row_budget / mean_length)))

    def to_dict(self) -> Dict[str, Any]:
        d = {s: getattr(self, s) for s in self.__slots__}
        d["length_range"] = list(self.length_range)
        return d

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "SubDatasetSpec":
        unknown = set(d) - set(cls.__slots__)
        if unknown:
            raise ConfigError(f"unknown sub-dataset fields: {sorted(unknown)}")
        if "name" not in d or "group" not in d:
            raise ConfigError("sub-dataset needs a name and a group")
        return cls(**d)

    def __eq__(self, other):
        return isinstance(other, SubDatasetSpec) and self.to_dict() == other.to_dict()


class DatasetSpec:
    __slots__ = ["subdatasets", "format_version"]

    def __init__(
        self,
        subdatasets: Sequence[SubDatasetSpec],
        format_version: int = SPEC_FORMAT_VERSION,
    ):
        if format_version != SPEC_FORMAT_VERSION:
            raise ConfigError(
                f"unsupported generator spec format_version {format_version}"
                f" (supported: {SPEC_FORMAT_VERSION})"
            )
        names = [s.name for s in subdatasets]
        if not names:
            raise ConfigError("generator spec has no sub-datasets")
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate sub-dataset names {names}")
        self.subdatasets: List[SubDatasetSpec] = list(subdatasets)
        self.format_version = format_version

    def __getitem__(self, name: str) -> SubDatasetSpec:
        for s in self.subdatasets:
            if s.name == name:
                return s
        raise KeyError(name)

    def select(self, names: Sequence[str]) -> "DatasetSpec":
        return DatasetSpec([self[n] for n in names], self.format_version)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "format_version": self.format_version,
            "subdatasets": [s.to_dict() for s in self.subdatasets],
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "DatasetSpec":
        if not isinstance(d, dict) or "subdatasets" not in d:
            raise ConfigError("generator spec needs a 'subdatasets' list")
        return cls(
            [SubDatasetSpec.from_dict(s) for s in d["subdatasets"]],
            d.get("format_version", SPEC_FORMAT_VERSION),
        )

    def __eq__(self, other):
        return isinstance(other, DatasetSpec) and self.to_dict() == other.to_dict()


def load_spec(path: str) -> DatasetSpec:
    with open(path) as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"{path}: invalid YAML: {e}")
    return DatasetSpec.from_dict(data)


def dump_spec(spec: DatasetSpec, path: str):
    with open(path, "w") as f:
        yaml.safe_dump(spec.to_dict(), f, sort_keys=False)


def _preset(fraction: float, length_range: Tuple[int, int]) -> DatasetSpec:
    return DatasetSpec(
        [
            SubDatasetSpec(
                name,
                group,
                row_budget=int(round(REFERENCE_ROWS[name] * fraction)),
                length_range=length_range,
            )
            for name, group in SUBDATASET_GROUPS.items()
        ]
    )


def mini_spec() -> DatasetSpec:
    """
    About 2% of the reference row counts, series of 60-120 intervals.

    Series are shorter than ``rul_max`` (125), so labels of this preset
    never reach the cap; use ``full_spec`` or a custom ``length_range``
    to exercise capped labels.
    """
    return _preset(MINI_FRACTION, MINI_LENGTH_RANGE)


def full_spec() -> DatasetSpec:
    """The reference row counts, series of 150-350 intervals."""
    return _preset(1.0, FULL_LENGTH_RANGE)


PRESETS = {"mini": mini_spec, "full": full_spec}


def preset(name: str) -> DatasetSpec:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name}, choose one of {sorted(PRESETS)}")
    return PRESETS[name]()
