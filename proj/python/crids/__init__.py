"""Composite resilience index for decentralized wastewater systems.

Thin wrapper over the C++ core: membership functions, aggregation, batch
assessment/planning from a study config, and the threshold summary.
"""

from ._core import (
    CridsError,
    __version__,
    aggregate,
    assess,
    cri_ds,
    factors,
    grade,
    inverse_grade,
    inverse_sigmoid,
    median,
    plan,
    sigmoid,
    solve_budget,
    solve_threshold,
    summarize,
    synth,
)

__all__ = [
    "CridsError",
    "__version__",
    "aggregate",
    "assess",
    "cri_ds",
    "factors",
    "grade",
    "inverse_grade",
    "inverse_sigmoid",
    "median",
    "plan",
    "sigmoid",
    "solve_budget",
    "solve_threshold",
    "summarize",
    "synth",
]
