#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

"""
Repeated train/evaluate protocol. Run ``i`` uses seed ``cfg.seed + i``
for initialization, batch order and the validation split; the data
stays fixed. The report aggregates RMSE as mean and (population) std.
"""

import json
import time
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import torch.multiprocessing as mp
from slat import events, metrics
from slat.data import RunToFailureSeries
from slat.errors import ConfigError
from slat.model import SlatConfig
from slat.train.evaluate import CI_WIDTHS, ci_scoring, evaluate_units, rmse
from slat.train.trainer import TrainConfig, fit
from slat.utils.logging import get_logger


log = get_logger()

REPORT_FORMAT_VERSION = 1


class RunResult:
    __slots__ = ["run", "seed", "rmse", "ci_curve", "train_time_s", "test_time_s", "best_epoch"]

    def __init__(
        self,
        run: int,
        seed: int,
        rmse: float,
        ci_curve: Sequence[float],
        train_time_s: float,
        test_time_s: float,
        best_epoch: int,
    ):
        self.run = run
        self.seed = seed
        self.rmse = rmse
        self.ci_curve = [float(v) for v in ci_curve]
        self.train_time_s = train_time_s
        self.test_time_s = test_time_s
        self.best_epoch = best_epoch

    def to_dict(self) -> Dict[str, Any]:
        return {s: getattr(self, s) for s in self.__slots__}

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "RunResult":
        return cls(**d)


class MetricsReport:
    """
    Aggregate of one or more runs on one dataset. ``ci_curve`` is the
    mean of the per-run curves over ``ci_widths``.
    """

    def __init__(
        self,
        runs: Sequence[RunResult],
        name: str = "",
        slat_config: Optional[Dict[str, Any]] = None,
        train_config: Optional[Dict[str, Any]] = None,
        ci_widths: Optional[Sequence[float]] = None,
    ):
        if not runs:
            raise ConfigError("a metrics report needs at least one run")
        self.runs: List[RunResult] = list(runs)
        self.name = name
        self.slat_config = slat_config or {}
        self.train_config = train_config or {}
        self.ci_widths = [float(w) for w in (CI_WIDTHS if ci_widths is None else ci_widths)]

    @property
    def rmse(self) -> List[float]:
        return [r.rmse for r in self.runs]

    @property
    def rmse_mean(self) -> float:
        return float(np.mean(self.rmse))

    @property
    def rmse_std(self) -> float:
        return float(np.std(self.rmse))

    @property
    def ci_curve(self) -> List[float]:
        return [float(v) for v in np.mean([r.ci_curve for r in self.runs], axis=0)]

    def timing(self) -> Dict[str, Dict[str, float]]:
        return timing_report(self.runs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "format_version": REPORT_FORMAT_VERSION,
            "name": self.name,
            "rmse": {
                "runs": self.rmse,
                "mean": self.rmse_mean,
                "std": self.rmse_std,
            },
            "ci": {"widths": self.ci_widths, "curve": self.ci_curve},
            "timing": self.timing(),
            "runs": [r.to_dict() for r in self.runs],
            "slat_config": self.slat_config,
            "train_config": self.train_config,
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "MetricsReport":
        version = d.get("format_version")
        if version != REPORT_FORMAT_VERSION:
            raise ConfigError(f"unsupported metrics report format_version {version}")
        return cls(
            [RunResult.from_dict(r) for r in d["runs"]],
            name=d.get("name", ""),
            slat_config=d.get("slat_config"),
            train_config=d.get("train_config"),
            ci_widths=d["ci"]["widths"],
        )

    def save(self, path: str):
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)

    @classmethod
    def load(cls, path: str) -> "MetricsReport":
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def __eq__(self, other):
        return isinstance(other, MetricsReport) and self.to_dict() == other.to_dict()


def timing_report(runs: Sequence[RunResult]) -> Dict[str, Dict[str, float]]:
    """Wall-clock seconds of the train and test phases over ``runs``."""
    out = {}
    for phase in ("train", "test"):
        times = np.array([getattr(r, f"{phase}_time_s") for r in runs], dtype=np.float64)
        out[phase] = {
            "mean_s": float(times.mean()),
            "std_s": float(times.std()),
            "total_s": float(times.sum()),
        }
    return out


def run_once(
    run: int,
    train_series: Sequence[RunToFailureSeries],
    test_series: Sequence[RunToFailureSeries],
    model_cfg: SlatConfig,
    cfg: TrainConfig,
) -> RunResult:
    """Trains with seed ``cfg.seed + run`` and scores the test units."""
    seed = cfg.seed + run
    run_cfg = TrainConfig.from_dict(dict(cfg.to_dict(), seed=seed))
    result = fit(train_series, model_cfg, run_cfg)

    start = time.perf_counter()
    predictions, labels = evaluate_units(result.model, test_series, result.scaler)
    test_time_s = metrics.get_elapsed_time_ms(start) / 1000.0

    score = rmse(predictions, labels)
    curve = ci_scoring(predictions, labels, model_cfg.rul_max)
    log.info(f"run {run} (seed {seed}): rmse={score:.4f}")
    return RunResult(
        run, seed, score, curve, result.train_time_s, test_time_s, result.history.best_epoch
    )


def _run_star(args) -> RunResult:
    return run_once(*args)


@metrics.prof
def multi_run(
    train_series: Sequence[RunToFailureSeries],
    test_series: Sequence[RunToFailureSeries],
    model_cfg: SlatConfig,
    cfg: TrainConfig,
    runs: Optional[int] = None,
    workers: int = 1,
    name: str = "",
) -> MetricsReport:
    """
    ``runs`` (default ``cfg.runs``) independent train/evaluate runs.
    With ``workers > 1`` runs execute in a spawn pool; the report does
    not depend on the number of workers.
    """
    runs = cfg.runs if runs is None else runs
    if runs < 1:
        raise ConfigError(f"runs must be positive, got {runs}")
    jobs = [(i, train_series, test_series, model_cfg, cfg) for i in range(runs)]
    if workers > 1:
        with mp.get_context("spawn").Pool(min(workers, runs)) as pool:
            results = pool.map(_run_star, jobs)
    else:
        results = [_run_star(job) for job in jobs]

    report = MetricsReport(
        sorted(results, key=lambda r: r.run),
        name=name,
        slat_config=model_cfg.to_dict(),
        train_config=cfg.to_dict(),
    )
    events.record(
        "train.multi_run",
        metadata={
            "name": name,
            "runs": runs,
            "rmse_mean": report.rmse_mean,
            "rmse_std": report.rmse_std,
        },
    )
    log.info(
        f"{name or 'dataset'}: rmse {report.rmse_mean:.4f} +- {report.rmse_std:.4f}"
        f" over {runs} runs"
    )
    return report
