"""Separability and entanglement of density matrices built from graph laplacians."""

from .criteria import (
    CriteriaReport,
    Verdict,
    degree_criterion,
    line_sum_symmetric_blocks,
    ppt_criterion,
    range_membership,
    realignment_criterion,
    theorem1_check,
    verdict,
)
from .decompose import (
    SeparableDecomposition,
    cycle_peel,
    decompose,
    decompose_2xq,
    decompose_matched_subgraph,
    verify_decomposition,
)
from .errors import *  # noqa: F401,F403
from .graph import (
    ArrayedGraph,
    adjacency_matrix,
    apply_vertex_permutation,
    build_graph,
    classify_edges,
    degree_matrix,
    density_matrix,
    from_bitmask,
    laplacian,
    parse_edge_list,
    partial_transpose_graph,
    to_bitmask,
    vertex_index,
)
from .harness import (
    analyze_graph,
    canonical_form,
    counterexample_graph,
    enumerate_labeled_graphs,
    family,
    parse_graph_file,
    table4_report,
)
from .linalg import (
    RationalSymmetricMatrix,
    exact_psd_check,
    partial_trace_B,
    partial_transpose_matrix,
    realign,
    singular_values,
    symmetric_eigenvalues,
    trace_norm,
)
from .measures import (
    concurrence_upper_bound,
    degree_discrepancy_norm,
    entanglement_of_formation_4dim,
    is_maximally_entangled,
    logarithmic_negativity,
    measure_report,
    pure_concurrence,
    wootters_concurrence,
)

__version__ = "0.1.0"
