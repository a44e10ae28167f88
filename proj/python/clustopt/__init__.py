"""Clustering versus convergence of decentralized gradient tracking."""

from ._core import (
    ClustoptError,
    CostModel,
    Graph,
    assign_random_weights,
    average_degree,
    build_jacobian,
    convergence_rate,
    generate_ba,
    generate_hk,
    global_clustering,
    is_connected,
    lambda2_laplacian,
    laplacian,
    local_clustering,
    local_clustering_all,
    optimize,
    parse_edge_list,
    predicted_c_ba,
    predicted_c_hk,
    quartic_cost,
    rewire,
    run_mc,
    sample_cost,
    trial_seed,
)

__all__ = [
    "ClustoptError",
    "CostModel",
    "Graph",
    "assign_random_weights",
    "average_degree",
    "build_jacobian",
    "convergence_rate",
    "generate_ba",
    "generate_hk",
    "global_clustering",
    "is_connected",
    "lambda2_laplacian",
    "laplacian",
    "local_clustering",
    "local_clustering_all",
    "optimize",
    "parse_edge_list",
    "predicted_c_ba",
    "predicted_c_hk",
    "quartic_cost",
    "rewire",
    "run_mc",
    "sample_cost",
    "trial_seed",
]
