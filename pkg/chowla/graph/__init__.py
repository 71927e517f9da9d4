from chowla.graph.components import (
    ComponentLabeling,
    ConnectivityReport,
    PathResult,
    UnionFind,
    components,
    connectivity_trials,
    validate_path,
)
from chowla.graph.ensemble import (
    EnsembleReport,
    PathEnsembleParams,
    asymptotic_parameters,
    ensemble_trials,
    exact_expected_s1,
    path_ensemble_stats,
    step_normalizer,
)
from chowla.graph.hops import (
    crt_edge_identity,
    edge_probability_test,
    joint_edge_probability,
    three_hop_search,
)
from chowla.graph.profinite import ProfiniteSample, integer_sample, integer_trial, sample_profinite
from chowla.graph.window import GraphWindow, build_graph

__all__ = [
    "ComponentLabeling",
    "ConnectivityReport",
    "EnsembleReport",
    "GraphWindow",
    "PathEnsembleParams",
    "PathResult",
    "ProfiniteSample",
    "UnionFind",
    "asymptotic_parameters",
    "build_graph",
    "components",
    "connectivity_trials",
    "crt_edge_identity",
    "edge_probability_test",
    "ensemble_trials",
    "exact_expected_s1",
    "integer_sample",
    "integer_trial",
    "joint_edge_probability",
    "path_ensemble_stats",
    "sample_profinite",
    "step_normalizer",
    "three_hop_search",
    "validate_path",
]
