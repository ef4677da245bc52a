"""Phase-field ferroelectric device simulator (C++ core)."""

from ._core import (
    Config,
    ConfigError,
    FixedPointError,
    NumericalError,
    Simulation,
    SolverError,
    fermi_half,
    fermi_half_quadrature,
    num_threads,
    run,
    run_suite,
    set_num_threads,
    solve_poisson,
)

__all__ = [
    "Config",
    "ConfigError",
    "FixedPointError",
    "NumericalError",
    "Simulation",
    "SolverError",
    "fermi_half",
    "fermi_half_quadrature",
    "num_threads",
    "run",
    "run_suite",
    "set_num_threads",
    "solve_poisson",
]
