"""Self-similar and multifractal traffic streams.

Synthesis (fGn, fBm, exponential-transform traffic, binomial cascades,
AR(1), iid noise), additive mixing at an exact variance SNR, and
generalized Hurst exponent estimation by MFDFA and block-sum moments.
"""

from ._core import (
    __version__,
    beta_moment,
    cascade_theoretical_h,
    exp_transform,
    gen_ar1,
    gen_cascade,
    gen_fbm,
    gen_fgn,
    gen_iid,
    hurst_h2,
    measure_snr,
    mfdfa,
    mix,
    moment_spectrum,
    run_experiment,
)

__all__ = [
    "__version__",
    "beta_moment",
    "cascade_theoretical_h",
    "exp_transform",
    "gen_ar1",
    "gen_cascade",
    "gen_fbm",
    "gen_fgn",
    "gen_iid",
    "hurst_h2",
    "measure_snr",
    "mfdfa",
    "mix",
    "moment_spectrum",
    "run_experiment",
]
