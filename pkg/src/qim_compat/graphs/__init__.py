"""
Directed hypergraphs and their graph constructions.
"""

from .hypergraph import (
    Hyperarc, DirectedHypergraph, from_graph, from_digraph, as_dag, enumerate_dags,
    complete_dag, dagger, add_parallel_arcs, is_weakening, coefficient_vector, CoefficientVector,
    noise_name,
)

__all__ = [
    'Hyperarc', 'DirectedHypergraph', 'from_graph', 'from_digraph', 'as_dag', 'enumerate_dags',
    'complete_dag', 'dagger', 'add_parallel_arcs', 'is_weakening', 'coefficient_vector',
    'CoefficientVector', 'noise_name',
]
