"""Matroids of topological cycles in infinite graphs, checked at finite scale."""

from .graph import Multigraph, bonds, components, contract_to, cycle_edge_sets, induced_cut, project
from .matroid import CircuitSystem, check_axioms, finite_cycle_matroid

__all__ = [
    "Multigraph",
    "bonds",
    "components",
    "contract_to",
    "cycle_edge_sets",
    "induced_cut",
    "project",
    "CircuitSystem",
    "check_axioms",
    "finite_cycle_matroid",
]
