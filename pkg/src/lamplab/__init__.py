"""Lamps and neon tubes of slim rectangular lattices.

Build slim rectangular lattices from grids by multiforks, read off their
lamps, compare the geometric lamp poset with the congruence oracle, check
the CTF_n and CDE_n properties, and search for representations of a given
finite distributive lattice.
"""
__version__ = "0.1.0"

from .order import MalformedInput, BudgetExceeded, Poset, is_isomorphic, find_morphism, MorphismSpec
from .lattice import Lattice, jir_con_poset, con_lattice
from .diagram import BuildScript, Diagram, grid, insert_fork, insert_multifork, remove_tube, replay
from .lamps import lamps, lamp_poset, lamp_relation, verify_neon_tube_lemma
from .gadgets import ctf, cde, has_ctf_property, has_cde_property
from .decide import bounds, decide, estimate_x, verify_witness

__all__ = [
    "BudgetExceeded", "BuildScript", "Diagram", "Lattice", "MalformedInput", "MorphismSpec", "Poset",
    "bounds", "cde", "con_lattice", "ctf", "decide", "estimate_x", "find_morphism", "grid",
    "has_cde_property", "has_ctf_property", "insert_fork", "insert_multifork", "is_isomorphic",
    "jir_con_poset", "lamp_poset", "lamp_relation", "lamps", "remove_tube", "replay",
    "verify_neon_tube_lemma", "verify_witness",
]
