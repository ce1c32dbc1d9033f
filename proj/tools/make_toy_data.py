# tools/make_toy_data.py

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

"""Regenerates the bundled toy datasets under data/ from the simulator."""

import json
import pathlib
import sys

import prsmos

root = pathlib.Path(__file__).resolve().parent.parent / "data"


def write(path, records, keep_mos=True):
    with open(path, "w") as f:
        for r in records:
            row = dict(r)
            if not keep_mos:
                row["mos"] = None
            f.write(json.dumps(row, separators=(",", ":")) + "\n")


def main():
    toy = prsmos.simulate_dataset(n_systems=10, samples_per_system=12,
                                  feature_dim=8, seed=11)
    write(root / "toy.jsonl", toy)

    target = prsmos.simulate_dataset(n_systems=8, samples_per_system=10,
                                     feature_dim=8, seed=12)
    for r in target:
        r["id"] = "t_" + r["id"]
    labeled, rest = target[::8], [r for i, r in enumerate(target) if i % 8]
    dev = [r for i, r in enumerate(rest) if i % 3 == 0]
    unlabeled = [r for i, r in enumerate(rest) if i % 3]
    write(root / "toy_labeled.jsonl", labeled)
    write(root / "toy_unlabeled.jsonl", unlabeled, keep_mos=False)
    write(root / "toy_dev.jsonl", dev)


if __name__ == "__main__":
    sys.exit(main())
