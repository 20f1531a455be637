"""Certified non-immersibility proofs for triangulated surfaces."""

from .cycles import EdgeCycle, fundamental_cycle_basis, is_orientation_reversing, lift_reverses
from .datasets import load
from .engine import Certificate, SearchConfig, Verdict, render, search, verify
from .intersection import IntersectionModel, candidate_pairs, coupled_pairs, render_table
from .surface import SimplicialSurface, load_surface, surface_info
from .symmetry import automorphism_group

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "EdgeCycle",
    "IntersectionModel",
    "SearchConfig",
    "SimplicialSurface",
    "Verdict",
    "automorphism_group",
    "candidate_pairs",
    "coupled_pairs",
    "fundamental_cycle_basis",
    "is_orientation_reversing",
    "lift_reverses",
    "load",
    "load_surface",
    "render",
    "render_table",
    "search",
    "surface_info",
    "verify",
]
