"""Community detection with Louvain seeding, overlap measures, and
best-response stabilization to a Nash equilibrium.

Works on unipartite, bipartite and directed binary graphs; bipartite and
directed inputs are analyzed through their block unipartite expansion.
"""

from .graphs import (
    BipartiteGraph,
    Graph,
    GraphInputError,
    build_bipartite,
    build_graph,
    directed_to_bipartite,
    links_to_community,
    load_graph_file,
    to_block_unipartite,
)
from .louvain import AggregateGraph, LouvainConfig, aggregate, local_move_phase, louvain
from .modularity import (
    bipartite_modularity,
    brute_force_best_partition,
    modularity,
    modularity_pairwise_oracle,
)
from .overlap import LegitimacyMatrix, legitimacy, legitimacy_matrix, unstable_vertices
from .partition import Partition
from .reassignment import (
    EPSILON,
    EquilibriumCapError,
    EquilibriumTrace,
    MoveStep,
    ReassignmentMatrix,
    apply_move_delta,
    best_response_step,
    is_nash_equilibrium,
    move_delta,
    reassignment_gain,
    reassignment_matrix,
    to_nash_equilibrium,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateGraph",
    "BipartiteGraph",
    "EPSILON",
    "EquilibriumCapError",
    "EquilibriumTrace",
    "Graph",
    "GraphInputError",
    "LegitimacyMatrix",
    "LouvainConfig",
    "MoveStep",
    "Partition",
    "ReassignmentMatrix",
    "aggregate",
    "apply_move_delta",
    "best_response_step",
    "bipartite_modularity",
    "brute_force_best_partition",
    "build_bipartite",
    "build_graph",
    "directed_to_bipartite",
    "is_nash_equilibrium",
    "legitimacy",
    "legitimacy_matrix",
    "links_to_community",
    "load_graph_file",
    "local_move_phase",
    "louvain",
    "modularity",
    "modularity_pairwise_oracle",
    "move_delta",
    "reassignment_gain",
    "reassignment_matrix",
    "to_block_unipartite",
    "to_nash_equilibrium",
    "unstable_vertices",
]
