#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import contextlib
import io
import json
import os
import shutil
import tempfile
import unittest

import pandas as pd
from slat.cli.main import main, model_config, parse_args, train_config
from slat.errors import ConfigError
from slat.model import SlatConfig
from slat.train import CI_WIDTHS, RTF_COLUMNS, TrainConfig


SPEC_YAML = """
format_version: 1
subdatasets:
  - name: FD3
    group: VOA
    row_budget: 300
    length_range: [20, 40]
    truncation_window: 10
"""

TINY_MODEL = [
    "--d_model", "8",
    "--encoder_blocks", "1",
    "--decoder_blocks", "1",
    "--heads", "2",
    "--ffn_hidden", "8",
    "--head_hidden", "8",
    "--window", "5",
    "--band_half_width", "1",
]
TINY_TRAIN = ["--epochs", "1", "--warmup_steps", "10", "--batch_size", "64", "--seed", "0"]


def run(args):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(args)
    return code, out.getvalue(), err.getvalue()


class ArgsTest(unittest.TestCase):
    def test_configs_from_flags(self):
        args = parse_args(
            ["train", "--train", "t.csv", "--checkpoint", "m.ckpt", "--sparse_decoder"]
            + TINY_MODEL
            + TINY_TRAIN
        )
        self.assertEqual(
            SlatConfig(
                d_model=8,
                encoder_blocks=1,
                decoder_blocks=1,
                heads=2,
                ffn_hidden=8,
                head_hidden=8,
                window=5,
                band_half_width=1,
                sparse_decoder=True,
            ),
            model_config(args),
        )
        self.assertEqual(
            TrainConfig(epochs=1, warmup_steps=10, batch_size=64, seed=0), train_config(args)
        )

    def test_defaults(self):
        args = parse_args(["multi-run", "--train", "a", "--test", "b", "--seed", "5", "--runs", "3"])
        self.assertEqual(SlatConfig(), model_config(args))
        self.assertEqual(TrainConfig(seed=5, runs=3), train_config(args))

    def test_no_scale_output(self):
        args = parse_args(["train", "--train", "a", "--checkpoint", "b", "--seed", "0", "--no_scale_output"])
        self.assertFalse(model_config(args).scale_output)

    def test_seed_required(self):
        with self.assertRaises(ConfigError):
            parse_args(["train", "--train", "a", "--checkpoint", "b"])

    def test_usage_errors_exit_2_with_json(self):
        for argv in [
            ["train", "--train", "a.csv", "--checkpoint", "b"],
            ["generate", "--preset", "huge", "--seed", "0", "--out_dir", "d"],
            ["train", "--train", "a.csv", "--checkpoint", "b", "--seed", "x"],
            ["fly"],
            [],
        ]:
            with self.subTest(argv=argv):
                code, out, err = run(argv)
                self.assertEqual(2, code)
                self.assertEqual("", out)
                record = json.loads(err.strip().splitlines()[-1])
                self.assertEqual("ConfigError", record["error"])
                self.assertTrue(record["message"].startswith("slat"))


class EndToEndTest(unittest.TestCase):
    def setUp(self):
        self.test_dir = tempfile.mkdtemp(prefix=self.__class__.__name__)
        self.spec = self.path("spec.yaml")
        with open(self.spec, "w") as f:
            f.write(SPEC_YAML)

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def path(self, name):
        return os.path.join(self.test_dir, name)

    def test_pipeline(self):
        data = self.path("data")
        code, out, _ = run(["generate", "--spec", self.spec, "--seed", "0", "--out_dir", data])
        self.assertEqual(0, code)
        summary = json.loads(out)
        self.assertEqual(10, summary["FD3"]["train_units"] + summary["FD3"]["test_units"])
        train_csv = os.path.join(data, "train_FD3.csv")
        test_csv = os.path.join(data, "test_FD3.csv")
        self.assertTrue(os.path.exists(train_csv) and os.path.exists(test_csv))

        ckpt = self.path("fd3.ckpt")
        history = self.path("history.json")
        code, out, _ = run(
            ["train", "--train", train_csv, "--checkpoint", ckpt, "--history", history]
            + TINY_MODEL
            + TINY_TRAIN
        )
        self.assertEqual(0, code)
        self.assertEqual(1, json.loads(out)["epochs"])
        with open(history) as f:
            self.assertEqual(1, len(json.load(f)["epochs"]))

        report_path = self.path("report.json")
        code, out, _ = run(
            ["evaluate", "--checkpoint", ckpt, "--test", test_csv, "--out", report_path]
        )
        self.assertEqual(0, code)
        report = json.loads(out)
        self.assertEqual(1, len(report["rmse"]["runs"]))
        self.assertEqual(len(CI_WIDTHS), len(report["ci"]["curve"]))
        self.assertEqual("test_FD3.csv", report["name"])
        with open(report_path) as f:
            self.assertEqual(report, json.load(f))

        frame = pd.read_csv(test_csv)
        unit_id = int(frame["unit_id"].iloc[0])
        window_csv = self.path("window.csv")
        frame[frame["unit_id"] == unit_id].to_csv(window_csv, index=False)
        code, out, _ = run(["predict", "--checkpoint", ckpt, "--window", window_csv])
        self.assertEqual(0, code)
        self.assertIsInstance(json.loads(out)["rul"], float)

        rtf = self.path("rtf.csv")
        code, out, _ = run(
            ["export-rtf", "--checkpoint", ckpt, "--data", test_csv, "--unit", str(unit_id), "--out", rtf]
        )
        self.assertEqual(0, code)
        written = pd.read_csv(rtf)
        self.assertEqual(RTF_COLUMNS, list(written.columns))
        self.assertEqual(json.loads(out)["rows"], len(written))

        code, _, err = run(
            ["export-rtf", "--checkpoint", ckpt, "--data", test_csv, "--unit", "999", "--out", rtf]
        )
        self.assertEqual(2, code)
        self.assertEqual("ContractError", json.loads(err.strip().splitlines()[-1])["error"])

    def test_invalid_config_exits_2(self):
        code, out, err = run(
            ["train", "--train", self.path("missing.csv"), "--checkpoint", self.path("m.ckpt"),
             "--d_model", "8", "--heads", "3", "--seed", "0"]
        )
        self.assertEqual(2, code)
        self.assertEqual("", out)
        self.assertEqual("ConfigError", json.loads(err.strip().splitlines()[-1])["error"])

    def test_missing_file_exits_1(self):
        code, _, err = run(
            ["train", "--train", self.path("missing.csv"), "--checkpoint", self.path("m.ckpt"),
             "--seed", "0"]
        )
        self.assertEqual(1, code)
        self.assertEqual("FileNotFoundError", json.loads(err.strip().splitlines()[-1])["error"])

    def test_corrupt_checkpoint_exits_1(self):
        ckpt = self.path("bad.ckpt")
        with open(ckpt, "wb") as f:
            f.write(b"garbage")
        code, _, err = run(["predict", "--checkpoint", ckpt, "--window", self.path("w.csv")])
        self.assertEqual(1, code)
        self.assertEqual("CheckpointError", json.loads(err.strip().splitlines()[-1])["error"])
