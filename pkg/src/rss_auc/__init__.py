"""Empirical likelihood confidence intervals for the AUC from ranked set samples."""

from .el import (
    ConfidenceInterval,
    DegenerateSampleError,
    ELEvaluation,
    Form,
    HullViolationError,
    ScaleFactor,
    chi2_threshold,
    confidence_interval,
    confidence_interval_dual,
    el_log_ratio,
    el_log_ratio_dual,
    scale_factor,
    scale_factor_dual,
    solve_lambda,
)
from .estimators import (
    Kernel,
    PlacementResiduals,
    ecdf_rss,
    mw_auc,
    mw_auc_dual,
    placement_residuals,
)
from .kernel import KernelConfig, kernel_auc, kernel_ci, silverman_bandwidth
from .populations import (
    ConcomitantModel,
    Family,
    InvalidConfigurationError,
    PopulationPair,
    attach_concomitant,
    sample_pair,
)
from .sampling import (
    FinitePopulationSource,
    RankedSetSample,
    SyntheticSource,
    draw_brss,
    draw_srs,
    draw_urss,
    two_stratum_allocation,
)

__version__ = "0.1.0"
