# python/prsmos/__init__.py

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

"""Rank-similarity MOS prediction toolkit (C++ core)."""

from ._core import (
    Error,
    bapmos_select,
    eval,
    evaluate,
    ktau,
    lcc,
    load_dataset,
    loss,
    mse,
    partial_rank_matrix,
    semisup,
    simulate,
    simulate_dataset,
    srcc,
    train,
)

__all__ = [
    "Error",
    "bapmos_select",
    "eval",
    "evaluate",
    "ktau",
    "lcc",
    "load_dataset",
    "loss",
    "mse",
    "partial_rank_matrix",
    "semisup",
    "simulate",
    "simulate_dataset",
    "srcc",
    "train",
]
