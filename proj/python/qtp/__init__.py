"""Solver and diagnostics for two-phase quasilinear transmission problems.

Problem specs are plain dicts in the same layout as the JSON configs, e.g.
``{"p": 2, "mu": 0.2, "A_plus": 4, "A_minus": 1, "g": {"expr": "x1"},
"domain": {"kind": "interval", "resolution": 256}}``.
"""

from ._core import (
    DyadicProfile,
    Error,
    Field,
    Oracle1D,
    Psi_minus,
    Psi_plus,
    SolveReport,
    a_eps,
    apply_tab,
    continuation,
    dyadic_decay_profile,
    geometric_schedule,
    invert_tab,
    monotonicity_gap,
    nearest_zero,
    psi_minus,
    psi_plus,
    solve,
    solve_oracle_1d,
    validate_spec,
)

__all__ = [
    "DyadicProfile",
    "Error",
    "Field",
    "Oracle1D",
    "Psi_minus",
    "Psi_plus",
    "SolveReport",
    "a_eps",
    "apply_tab",
    "continuation",
    "dyadic_decay_profile",
    "geometric_schedule",
    "invert_tab",
    "monotonicity_gap",
    "nearest_zero",
    "psi_minus",
    "psi_plus",
    "solve",
    "solve_oracle_1d",
    "validate_spec",
]
