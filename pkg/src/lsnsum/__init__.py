"""Log skew normal approximation of sums of correlated lognormal variables."""

from .distributions import (
    XI,
    LognormalComponent,
    Moments2,
    SkewNormalParams,
    lognormal_cdf,
    lognormal_moments,
    lognormal_pdf,
    lsn_cdf,
    lsn_moments,
    lsn_pdf,
    sn_add_independent_normal,
    sn_cdf,
    sn_negate,
    sn_pdf,
)
from .lsn_fit import FitResult, cv2_lsn_at, cv2_sln, fit_fenton_wilkinson, fit_lsn, initial_guess, solve_lambda
from .montecarlo import EmpiricalCdf, SampleSpec, empirical_cdf_at, empirical_quantile, horizontal_deviation_db, sample_sln
from .sln_model import PrecisionAnalysis, SumModel, SumMoments, precision_analysis, prob_scale_transform, sum_moments

__version__ = "0.1.0"
