"""Generalized Bernoulli processes and the fractional Poisson process:
exact pattern probabilities and moments, renewal laws, seeded sampling and
Mittag-Leffler limits."""

__version__ = "0.1.0"

from .params import (  # noqa: E402
    FppParams,
    Gbp1Params,
    Gbp2Params,
    Process,
    ProcessSpec,
    ValidationError,
    gbp1_c_bound,
    validate,
)
from .exact import (  # noqa: E402
    Pmf,
    all_pattern_probs,
    d_h,
    d_h_circ,
    enumerate_pmf,
    exact_moment,
    exact_raw_moments,
    joint_ones_prob,
    l_h,
    l_h_circ,
    pattern_prob,
)
from .renewal import (  # noqa: E402
    NumericFailure,
    first_one_pmf_gbp2,
    interarrival_pmf_gbp1,
    interarrival_pmf_gbp2star,
    stationary_delay_gbp1,
    tail_index_fit,
)
from .sample import RngSeed, fpp_counts, sample_batch, sample_fpp, sample_mittag_leffler_wait, sample_path  # noqa: E402
from .mlf import fpp_mgf, mittag_leffler, mlf2_moment  # noqa: E402
from .stats import empirical_mgf, histogram, moment_report, tv_distance  # noqa: E402
