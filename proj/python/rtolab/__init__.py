# Copyright 2026 The rtolab Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Retransmission timeout algorithm laboratory.

Runs the five-layer timeout algorithms over a simulated chain network.
Config values may be given as Python numbers, bools or strings.
"""

from ._rtolab import (
    ConfigError,
    RttEstimate,
    RunResult,
    TraceRow,
    edge_update,
    ewma_shift_update,
    ewma_update,
    fig3_divergence,
    fig6_false_convergence,
    jth_attempt_matrix,
    mean_plus_deviation_timeout,
    mills_update,
    policy_catalog,
    scale_timeout,
    scenario_names,
)
from . import _rtolab

__all__ = [
    "ConfigError",
    "RttEstimate",
    "RunResult",
    "TraceRow",
    "classify",
    "default_config",
    "edge_update",
    "ewma_shift_update",
    "ewma_update",
    "fig3_divergence",
    "fig6_false_convergence",
    "jth_attempt_matrix",
    "loss_threshold_sweep",
    "mean_plus_deviation_timeout",
    "mills_update",
    "policy_catalog",
    "run",
    "scale_timeout",
    "scenario_names",
    "sweep",
    "tsao_lee",
]


def _text(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_text(v) for v in value)
    return str(value)


def _config(overrides):
    return {str(k): _text(v) for k, v in (overrides or {}).items()}


def default_config(name):
    return _rtolab.default_config(name)


def run(scenario, overrides=None, seed=None):
    """Run a named scenario with config overrides and return a RunResult."""
    config = _config(overrides)
    config["scenario"] = scenario
    if seed is not None:
        config["seed"] = str(seed)
    return _rtolab.run_config(config)


def tsao_lee(ingress_rate_bps, overrides=None):
    return _rtolab.tsao_lee(float(ingress_rate_bps), _config(overrides))


def loss_threshold_sweep(k, p_values, seeds, overrides=None):
    """List of (p, seed, verdict, max_E) sorted by p then seed."""
    return _rtolab.loss_threshold_sweep(float(k), list(p_values), list(seeds), _config(overrides))


def classify(case, seed=1):
    """Class of a canned case: "from_first", "ignore" or "early_copy"."""
    return _rtolab.classify(case, seed)


def sweep(scenario, axis, values, overrides=None, seed=1):
    """CSV text with one row per axis value."""
    config = _config(overrides)
    config["scenario"] = scenario
    config["seed"] = str(seed)
    return _rtolab.sweep_csv(config, axis, [float(v) for v in values])
