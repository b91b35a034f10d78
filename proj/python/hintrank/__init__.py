# Copyright 2026 The Hintrank Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python access to the hintrank core: plans, training, evaluation."""

import json

from . import _core
from ._core import (
    HintrankError,
    catalog_hash,
    listwise_loss,
    pairwise_loss,
    param_count,
    parse_plan,
    run_cli,
)

__all__ = [
    "HintrankError",
    "catalog_hash",
    "default_catalog",
    "evaluate",
    "listwise_loss",
    "load_queries",
    "pairwise_loss",
    "param_count",
    "parse_plan",
    "run_cli",
    "spectrum",
    "train",
]


def _paths(data):
    return [data] if isinstance(data, str) else list(data)


def default_catalog():
    """The 49 valid hint sets, hint set 0 first."""
    return json.loads(_core.default_catalog_json())


def load_queries(data, catalog=None):
    """Records grouped per query, one entry per distinct plan."""
    return _core.load_queries(_paths(data), catalog)


def train(data, out, mode="pairwise", catalog=None, split=None, max_epochs=None, seed=0):
    """Trains a scorer, writes the checkpoint to `out`, returns the report."""
    return json.loads(
        _core.train(_paths(data), out, mode, catalog, split, max_epochs, seed))


def evaluate(data, checkpoint, catalog=None, split=None):
    """Speedup report on the split's test side, or on every query."""
    return json.loads(_core.evaluate(_paths(data), checkpoint, catalog, split))


def spectrum(embeddings):
    """Covariance spectrum of a (dimensions x plans) embedding matrix."""
    return json.loads(_core.spectrum(embeddings))
