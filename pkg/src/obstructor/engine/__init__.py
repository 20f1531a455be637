"""Constraint propagation, case-splitting search and proof certificates."""

from .certificate import Certificate, Node, render
from .search import INCONCLUSIVE, NON_IMMERSIBLE, SearchConfig, Verdict, search
from .state import (
    BOX_ROW_MODES,
    Contradiction,
    ObstructionState,
    assert_parities,
    assert_parity,
    assert_pierce,
    hull_check,
    hull_feasible_vertices,
    init_state,
    propagate,
)
from .verify import Verification, verify

__all__ = [
    "BOX_ROW_MODES",
    "Certificate",
    "Contradiction",
    "INCONCLUSIVE",
    "NON_IMMERSIBLE",
    "Node",
    "ObstructionState",
    "SearchConfig",
    "Verdict",
    "Verification",
    "assert_parities",
    "assert_parity",
    "assert_pierce",
    "hull_check",
    "hull_feasible_vertices",
    "init_state",
    "propagate",
    "render",
    "search",
    "verify",
]
