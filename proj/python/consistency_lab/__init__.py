"""Distinguishability bounds, consistent test schedules and their simulations."""

import json

from ._core import (
    ConstructionError,
    DegenerateError,
    Error,
    NumericError,
    ResourceError,
    ValidationError,
    __version__,
    block_lengths,
    chernoff,
    hull_variation,
    kraft_bound,
    poisson_atom_tail_bound,
    run,
    scenario_hash,
    separation,
    tail_bound,
    total_variation,
)


def run_file(command, path, **kwargs):
    """Runs `command` on the scenario stored at `path`."""
    with open(path, encoding="utf-8") as f:
        return run(command, f.read(), **kwargs)


def run_scenario(command, scenario, **kwargs):
    """Runs `command` on a scenario given as a dict."""
    return run(command, json.dumps(scenario), **kwargs)


__all__ = [
    "ConstructionError",
    "DegenerateError",
    "Error",
    "NumericError",
    "ResourceError",
    "ValidationError",
    "__version__",
    "block_lengths",
    "chernoff",
    "hull_variation",
    "kraft_bound",
    "poisson_atom_tail_bound",
    "run",
    "run_file",
    "run_scenario",
    "scenario_hash",
    "separation",
    "tail_bound",
    "total_variation",
]
