from chowla.density.estimates import (
    ChangeOfVariable,
    DensityEstimate,
    DensityReport,
    agreement_density,
    change_of_variable_check,
    default_scales,
    pattern_density,
    predicted_constants,
    run_density,
    sign_balance,
    squarefree_w_density,
)
from chowla.density.maximal import MaximalReport, hl_maximal, maximal_pilot
from chowla.density.pairs import PairTable, liouville_pair_table, mobius_pair_table, squarefree_pair_density
from chowla.density.patterns import SignPattern, all_patterns, match_pattern

__all__ = [
    "ChangeOfVariable",
    "DensityEstimate",
    "DensityReport",
    "MaximalReport",
    "PairTable",
    "SignPattern",
    "agreement_density",
    "all_patterns",
    "change_of_variable_check",
    "default_scales",
    "hl_maximal",
    "liouville_pair_table",
    "match_pattern",
    "maximal_pilot",
    "mobius_pair_table",
    "pattern_density",
    "predicted_constants",
    "run_density",
    "sign_balance",
    "squarefree_pair_density",
    "squarefree_w_density",
]
