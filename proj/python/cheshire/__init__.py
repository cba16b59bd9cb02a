"""Weak values, Cheshire-cat interferometry and weak-measurement meter dynamics.

Angles passed to the functions here are in radians; scenario files use units of pi.
"""

from ._cheshire import (
    DegeneratePostselection,
    Error,
    ScenarioError,
    bundle_text,
    bundles,
    cheshire_quartet,
    cheshire_table,
    disembodiment_table,
    noisy_effective_weak_value,
    observables,
    prepare_state,
    run_scenario,
    states,
    verify,
    weak_value,
)

__all__ = [
    "DegeneratePostselection",
    "Error",
    "ScenarioError",
    "bundle_text",
    "bundles",
    "cheshire_quartet",
    "cheshire_table",
    "disembodiment_table",
    "noisy_effective_weak_value",
    "observables",
    "prepare_state",
    "run_scenario",
    "states",
    "verify",
    "weak_value",
]
