# tests/python/test_smoke.py

# Copyright 2026 The prsmos Authors

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

# Smoke tests for the python module. Runs under pytest or as a plain script.

import json
import math
import os
import tempfile
from pathlib import Path

import prsmos

ROOT = Path(__file__).resolve().parents[2]


def test_partial_rank_matrix():
    assert prsmos.partial_rank_matrix([1, 3, 2]) == [[0, -2, -1], [2, 0, 1], [1, -1, 0]]


def test_losses():
    value, grad = prsmos.loss([1, 2, 3], [1, 3, 2], family="PRS")
    assert value == 8.0
    assert len(grad) == 3
    value, grad = prsmos.loss([1.0, 1.2], [1.2, 1.0], family="UTMOS_MARGIN", gamma=0.5)
    assert value == 0.0
    value, _ = prsmos.loss([1, 2], [2, 1], family="EPRS", cache_pred=[3], cache_target=[3])
    assert math.isclose(value, 4.2, rel_tol=1e-15)


def test_metrics():
    assert prsmos.srcc([1, 2, 3], [1, 3, 2]) == 0.5
    assert math.isclose(prsmos.ktau([1, 2, 3], [1, 3, 2]), 1 / 3)
    report = prsmos.evaluate([1, 2, 3], [1, 3, 2])
    assert list(report) == ["level", "n", "mse", "lcc", "srcc", "ktau", "status"]
    try:
        prsmos.srcc([1, 1, 1], [1, 2, 3])
    except prsmos.Error as e:
        assert e.kind == "undefined_metric"
    else:
        raise AssertionError("constant input should be undefined")


def test_simulate_and_bapmos():
    records = prsmos.simulate_dataset(n_systems=5, samples_per_system=4, feature_dim=3, seed=1)
    assert len(records) == 20
    assert len(records[0]["features"]) == 3
    assert records == prsmos.simulate_dataset(
        n_systems=5, samples_per_system=4, feature_dim=3, seed=1)
    sel = prsmos.bapmos_select([0.1] * 5 + [1.5] * 3 + [2.9] * 7, bins=3, seed=1)
    assert len(sel) == 9
    assert sel == sorted(sel)


def test_commands():
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "train")
        prsmos.train(str(ROOT / "configs" / "train_toy.ini"), out=out, seed=3)
        for name in ("checkpoint.json", "train_log.csv", "metrics_dev.json",
                     "resolved_config.ini"):
            assert os.path.exists(os.path.join(out, name))
        ev = os.path.join(tmp, "eval")
        prsmos.eval(os.path.join(out, "checkpoint.json"),
                    str(ROOT / "data" / "toy_dev.jsonl"), ev)
        metrics = json.loads(Path(ev, "metrics.json").read_text())
        assert -1 <= metrics["utterance"]["srcc"] <= 1
        assert len(prsmos.load_dataset(ROOT / "data" / "toy_dev.jsonl")) == 24


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print("ok", name)
