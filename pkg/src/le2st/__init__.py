"""Label-efficient two-sample testing with the Friedman-Rafsky MST statistic.

Three stages: fit a posterior model on a few uniformly labeled points,
query labels where the model is most confident for each class (bimodal
query), then run the FR test on the queried points.
"""
from .errors import (
    DegenerateInstanceError,
    DegenerateTrainingError,
    DegenerateVarianceError,
    InfeasibleError,
    InvalidInputError,
    Le2stError,
    PoolExhaustedError,
)
from .frtest import (
    AsymptoticParams,
    FrInputs,
    TestOutcome,
    asymptotic_statistic,
    estimate_Ad,
    f_divergence_estimate,
    fr_statistic,
    p_value,
)
from .geometry import Mst, PointSet, cut_edge_count, euclidean_mst, shared_node_pairs
from .harness import (
    ExperimentConfig,
    LabelOracle,
    SyntheticSpec,
    classifier_null_error,
    dimension_sweep,
    divergence_curve,
    estimate_error_rates,
    generate_synthetic,
    run_three_stage,
    two_proportion_test,
    wilson_interval,
)
from .posterior import PosteriorModel, TrainConfig, platt_calibrate, posterior, train_logistic
from .query import (
    LpInstance,
    LpSolution,
    QueryState,
    bimodal_select,
    certainty_select,
    lp_brute_force,
    lp_closed_form,
    passive_select,
    uncertainty_select,
)
from .theory import (
    KnnErrorTable,
    TheoryParams,
    bimodal_cut_edge_distribution,
    crossover_query_count,
    expected_fr_variant_bimodal,
    expected_fr_variant_passive_lower_bound,
    expected_mn,
    gaussian_overlap_risk,
    knn_error_recursion,
)

__version__ = "0.1.0"

__all__ = [
    "asymptotic_statistic",
    "AsymptoticParams",
    "bimodal_cut_edge_distribution",
    "bimodal_select",
    "certainty_select",
    "classifier_null_error",
    "crossover_query_count",
    "cut_edge_count",
    "DegenerateInstanceError",
    "DegenerateTrainingError",
    "DegenerateVarianceError",
    "dimension_sweep",
    "divergence_curve",
    "estimate_Ad",
    "estimate_error_rates",
    "euclidean_mst",
    "expected_fr_variant_bimodal",
    "expected_fr_variant_passive_lower_bound",
    "expected_mn",
    "ExperimentConfig",
    "f_divergence_estimate",
    "fr_statistic",
    "FrInputs",
    "gaussian_overlap_risk",
    "generate_synthetic",
    "InfeasibleError",
    "InvalidInputError",
    "knn_error_recursion",
    "KnnErrorTable",
    "LabelOracle",
    "Le2stError",
    "lp_brute_force",
    "lp_closed_form",
    "LpInstance",
    "LpSolution",
    "Mst",
    "p_value",
    "passive_select",
    "platt_calibrate",
    "PointSet",
    "PoolExhaustedError",
    "posterior",
    "PosteriorModel",
    "QueryState",
    "run_three_stage",
    "shared_node_pairs",
    "SyntheticSpec",
    "TestOutcome",
    "TheoryParams",
    "train_logistic",
    "TrainConfig",
    "two_proportion_test",
    "uncertainty_select",
    "wilson_interval",
]
