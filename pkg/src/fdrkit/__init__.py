"""False discovery rate estimation and control."""

from .adjust import (
    AdjustmentMethod,
    FdrResult,
    MethodOutput,
    compute_bh,
    compute_bonferroni,
    compute_by,
    compute_hochberg,
    compute_holm,
    compute_sidak,
    p_fdr,
)
from .core import PValueSet, RankVector, ZValueSet, inv_norm_cdf, p_to_z, rank_with_ties, z_to_p
from .pi0 import Pi0Estimate, Pi0Spec, get_pi0, last_hist_height, scott_bin_count, storey_pi0
from .twogroup import LowerBoundConfig, TwoGroupModel, lower_bound_fdr, mixture_density

__version__ = "0.1.0"
