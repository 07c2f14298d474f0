"""Verification laboratory for differential Harnack inequalities.

Thin Python surface over the C++ core: built-in scenario library, config
validation, the run/sweep/hypotheses/geometry pipelines, and the closed-form
comparison functions used by the bounds.
"""

from ._core import (
    abc_parameters,
    geometry_tests,
    hypotheses,
    kcoth,
    list_scenarios,
    riccati_comparison,
    run,
    scenario_description,
    scenario_json,
    sweep,
    validate,
)

__all__ = [
    "abc_parameters",
    "geometry_tests",
    "hypotheses",
    "kcoth",
    "list_scenarios",
    "riccati_comparison",
    "run",
    "scenario_description",
    "scenario_json",
    "sweep",
    "validate",
]
