"""Stellar resolution: constellations, execution and its encodings."""

from ._stellar import (
    Constellation,
    ParseError,
    Star,
    Term,
    analyze,
    execute,
    matchable,
    mll_check,
    mll_normalise,
    run_logic_program,
    run_turing_machine,
    unify,
)

__all__ = [
    "Constellation",
    "ParseError",
    "Star",
    "Term",
    "analyze",
    "execute",
    "matchable",
    "mll_check",
    "mll_normalise",
    "run_logic_program",
    "run_turing_machine",
    "unify",
]
