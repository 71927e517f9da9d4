from chowla.circle.singular import (
    MainTerm,
    SingularData,
    euler_phi,
    f_value,
    fg_values,
    g_value,
    main_term_prediction,
    singular_series,
)
from chowla.circle.triples import (
    TripleSpec,
    brute_force_triples,
    count_triples,
    count_triples_in_classes,
    enumerate_triples,
    lattice_count,
)

__all__ = [
    "MainTerm",
    "SingularData",
    "TripleSpec",
    "brute_force_triples",
    "count_triples",
    "count_triples_in_classes",
    "enumerate_triples",
    "euler_phi",
    "f_value",
    "fg_values",
    "g_value",
    "lattice_count",
    "main_term_prediction",
    "singular_series",
]
