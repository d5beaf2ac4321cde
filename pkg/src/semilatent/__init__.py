"""Certification of rational identifiability for linear SEMs with latent nodes.

The package decides, for a directed graph over observed and latent
variables, whether all semi-direct effects between observed variables can
be written as rational functions of the observed covariance matrix.  A
positive answer comes with a step-by-step certificate that a numeric
pipeline can replay to recover the effects from the covariance alone.

Layering, bottom up: :mod:`semilatent.graphs` holds the combinatorial
core (graphs, treks, reachability, canonicalization),
:mod:`semilatent.flows` the exact path- and trek-system solvers,
:mod:`semilatent.criterion` the per-node condition and the decision
procedure, :mod:`semilatent.numeric` the double-precision side, and
:mod:`semilatent.experiments` / :mod:`semilatent.cli` the survey harness
and command-line front end.  :mod:`semilatent.fixtures` collects the
small named graphs used throughout the tests and demos.
"""

from .criterion import (
    CertificateStep,
    DecideResult,
    FailureReport,
    LscCertificate,
    LscTuple,
    TupleCheck,
    VerificationResult,
    allowed_Y,
    allowed_Z,
    check_tuple,
    decide,
    parse_certificate,
    verify_certificate,
)
from .flows import (
    FlowStats,
    IlpSolution,
    PathSystemResult,
    TrekSystemResult,
    brute_force_path_system,
    brute_force_trek_system,
    build_flow_graph,
    build_glp,
    build_lp,
    has_path_system,
    has_trek_system,
    solve_ilp,
)
from .graphs import (
    GraphError,
    LatentDigraph,
    Trek,
    TrekSystem,
    canonicalize,
    descendants,
    enumerate_treks,
    extended_latent_reachable,
    is_confounding_free_acyclic,
    latent_reachable,
    latent_subgraph,
    load_graph,
    parse_graph,
    semi_direct_parents,
    trek_separates,
)
from .numeric import (
    CovariancePair,
    DetCheckResult,
    NumericError,
    ParameterPoint,
    RecoveryReport,
    SamplingConfig,
    StepRecord,
    SubgraphTrekMatrixSpec,
    canonical_parameters,
    covariance_pair,
    m_matrix,
    numerical_rank,
    omega_matrix,
    recover_effects,
    sample_parameters,
    semi_direct_matrix,
    sigma_matrix,
    subgraph_trek_det_check,
    trek_rule_sigma,
    verify_c2_formula,
)
from .experiments import (
    CellCounts,
    ExperimentConfig,
    ExperimentResult,
    random_graph,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "CellCounts",
    "CertificateStep",
    "CovariancePair",
    "DecideResult",
    "DetCheckResult",
    "ExperimentConfig",
    "ExperimentResult",
    "FailureReport",
    "FlowStats",
    "GraphError",
    "IlpSolution",
    "LatentDigraph",
    "LscCertificate",
    "LscTuple",
    "NumericError",
    "ParameterPoint",
    "PathSystemResult",
    "RecoveryReport",
    "SamplingConfig",
    "StepRecord",
    "SubgraphTrekMatrixSpec",
    "Trek",
    "TrekSystem",
    "TrekSystemResult",
    "TupleCheck",
    "VerificationResult",
    "allowed_Y",
    "allowed_Z",
    "brute_force_path_system",
    "brute_force_trek_system",
    "build_flow_graph",
    "build_glp",
    "build_lp",
    "canonical_parameters",
    "canonicalize",
    "check_tuple",
    "covariance_pair",
    "decide",
    "descendants",
    "enumerate_treks",
    "extended_latent_reachable",
    "has_path_system",
    "has_trek_system",
    "is_confounding_free_acyclic",
    "latent_reachable",
    "latent_subgraph",
    "load_graph",
    "m_matrix",
    "numerical_rank",
    "omega_matrix",
    "parse_certificate",
    "parse_graph",
    "random_graph",
    "recover_effects",
    "run_experiment",
    "sample_parameters",
    "semi_direct_matrix",
    "semi_direct_parents",
    "sigma_matrix",
    "solve_ilp",
    "subgraph_trek_det_check",
    "trek_rule_sigma",
    "trek_separates",
    "verify_c2_formula",
    "verify_certificate",
]
