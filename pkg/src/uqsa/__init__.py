"""Sensitivity analysis and uncertainty quantification toolkit.

Methods: local one-at-a-time finite differences, standardized regression and
partial correlation coefficients (with rank variants), Morris elementary
effects screening, Sobol variance decomposition, and forward uncertainty
propagation (Monte Carlo and the deterministic sandwich rule). Ships the
usual analytic benchmarks and a molten carbonate fuel cell model with its
sweep/optimum study, all driven by a declarative CLI (``uqsa run``).
"""

from .problem import ParameterSpec, SampleMatrix, rank_transform, sample_matrix, truncated_resample
from .models import (Model, McfcParams, MorrisCoefficients, default_specs, get_model,
                     ishigami, ishigami_indices, list_models, mcfc_outputs,
                     mcfc_power_efficiency, mcfc_specs, morris_fn, sfs, sobol_g,
                     sobol_g_indices)
from .local_sa import OATSensitivity, OatResult
from .regression_sa import (PCCAnalyzer, RegressionResult, SRCAnalyzer, pcc, prcc,
                            src, srrc, standardize)
from .morris import MorrisDesign, MorrisScreening, MorrisStats
from .sobol import SobolEstimator, SobolIndices, estimate_sobol
from .uq import (CovarianceMatrix, UncertaintyResult, deterministic_uq,
                 monte_carlo_uq, uq_compare)
from .mcfc_study import (BatteryResult, RankingTable, SweepResult, find_optimum,
                         optimum_battery, sweep)

__version__ = "0.1.0"

__all__ = [
    "ParameterSpec", "SampleMatrix", "sample_matrix", "rank_transform",
    "truncated_resample",
    "Model", "McfcParams", "MorrisCoefficients", "get_model", "list_models",
    "default_specs", "sobol_g", "sobol_g_indices", "ishigami", "ishigami_indices",
    "morris_fn", "sfs", "mcfc_outputs", "mcfc_power_efficiency", "mcfc_specs",
    "OATSensitivity", "OatResult",
    "SRCAnalyzer", "PCCAnalyzer", "RegressionResult", "standardize",
    "src", "srrc", "pcc", "prcc",
    "MorrisScreening", "MorrisDesign", "MorrisStats",
    "SobolEstimator", "SobolIndices", "estimate_sobol",
    "CovarianceMatrix", "UncertaintyResult", "deterministic_uq", "monte_carlo_uq",
    "uq_compare",
    "SweepResult", "BatteryResult", "RankingTable", "find_optimum", "sweep",
    "optimum_battery",
]
