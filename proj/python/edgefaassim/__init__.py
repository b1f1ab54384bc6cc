"""Discrete-event simulator of stateful function chains on edge topologies."""

import json
from pathlib import Path

from . import _core
from ._core import (
    ConfigError,
    EngineError,
    MetricsError,
    ModelError,
    RunError,
    TopologyError,
    WorkloadError,
)

__version__ = _core.version()

MODELS = ("client_state", "remote_state", "local_state", "state_propagation")
SCHEDULERS = ("random", "round_robin", "least_loaded", "closest")


def _document(config):
    if isinstance(config, (str, Path)):
        return Path(config).read_text()
    return json.dumps(config)


def validate(config):
    """Validate a config (dict or path); return the number of grid cells."""
    return _core.validate(_document(config))


def run_experiment(config, out=None, seed=None, replications=None, threads=1, write=True):
    """Run the full grid. Returns the CSV texts and the manifest as a dict."""
    ret = _core.run_experiment(_document(config), out, seed, replications, threads, write)
    ret["manifest"] = json.loads(ret["manifest"])
    return ret


def simulate(topology, workload, model, scheduler="least_loaded", seed=0, holders=None,
             warmup=None, duration=None):
    """One run of a single model; per-invocation records plus the aggregate."""
    return json.loads(
        _core.simulate(json.dumps(topology), json.dumps(workload), model, scheduler, seed,
                       json.dumps(holders or {}), warmup, duration))


def shortest_path(topology, src, dst):
    """(node sequence, latency) of the route used between two nodes."""
    nodes, latency = _core.shortest_path(json.dumps(topology), src, dst)
    return list(nodes), latency


def nearest_rank(values, percent):
    return _core.nearest_rank(list(values), percent)


__all__ = [
    "ConfigError", "EngineError", "MetricsError", "ModelError", "RunError", "TopologyError",
    "WorkloadError", "MODELS", "SCHEDULERS", "validate", "run_experiment", "simulate",
    "shortest_path", "nearest_rank",
]
