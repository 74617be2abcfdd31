"""Economic-complexity metrics and a combinatorial model of knowhow.

The package turns country-product trade data into complexity metrics
(diversification/ubiquity, TDI/TSI, ECI/PCI, Fitness/Q), provides the
closed forms and simulator of a combinatorial knowhow model that
predicts how those metrics behave, and ships a statistical harness to
validate the two against income data and each other.
"""

from .errors import (
    Collinear,
    DegenerateInput,
    DegenerateSpectrum,
    DegenerateVector,
    DisconnectedMatrix,
    EcomplexError,
    EmptyMatrix,
    InfeasibleEnumeration,
    JoinEmpty,
    NegativeValue,
    NonConvergence,
    NumericalUnderflow,
    ParseError,
    ZeroMarginal,
)
from .matrix import (
    BinaryMatrix,
    ExportMatrix,
    binarize,
    prune_degenerate,
    rca,
    rca_binarize,
)
from .metrics import (
    CountryMetrics,
    EigenReport,
    ProductMetrics,
    compute_metrics,
    eci_pci,
    fitness_complexity,
    fitness_iterations,
    standardize,
    tdi,
    tsi,
)
from .model import (
    ModelParams,
    SophisticationDistribution,
    SyntheticWorld,
    coherence_prob,
    conditional_distribution,
    estimate_tau,
    expected_diversification,
    expected_sophistication,
    gaussian_binomial_approx,
    simulate_world,
    world_distribution,
)
from .validation import (
    CorrelationResult,
    IncomePanel,
    JoinReport,
    RegressionReport,
    RegressionResult,
    fit_exponential,
    join_panel,
    ols,
    rank_transform,
    run_paper_regressions,
    spearman,
)
from .fileio import (
    read_income_csv,
    read_matrix,
    read_trade_csv,
    sha256_file,
    write_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryMatrix",
    "Collinear",
    "CorrelationResult",
    "CountryMetrics",
    "DegenerateInput",
    "DegenerateSpectrum",
    "DegenerateVector",
    "DisconnectedMatrix",
    "EcomplexError",
    "EigenReport",
    "EmptyMatrix",
    "ExportMatrix",
    "IncomePanel",
    "InfeasibleEnumeration",
    "JoinEmpty",
    "JoinReport",
    "ModelParams",
    "NegativeValue",
    "NonConvergence",
    "NumericalUnderflow",
    "ParseError",
    "ProductMetrics",
    "RegressionReport",
    "RegressionResult",
    "SophisticationDistribution",
    "SyntheticWorld",
    "ZeroMarginal",
    "binarize",
    "coherence_prob",
    "compute_metrics",
    "conditional_distribution",
    "eci_pci",
    "estimate_tau",
    "expected_diversification",
    "expected_sophistication",
    "fit_exponential",
    "fitness_complexity",
    "fitness_iterations",
    "gaussian_binomial_approx",
    "join_panel",
    "ols",
    "prune_degenerate",
    "rank_transform",
    "rca",
    "rca_binarize",
    "read_income_csv",
    "read_matrix",
    "read_trade_csv",
    "run_paper_regressions",
    "sha256_file",
    "simulate_world",
    "spearman",
    "standardize",
    "tdi",
    "tsi",
    "world_distribution",
    "write_matrix",
    "__version__",
]
