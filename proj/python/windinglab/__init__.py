"""Monte Carlo laboratory for the winding number of planar Brownian motion.

The heavy lifting lives in the compiled extension; this package re-exports
its surface: analytic distributions (v_of, maxtime_cdf, cauchy_cdf, ...),
statistical tests (ks_one_sample, ks_two_sample, proportion_check, dkw_band),
the samplers (batch_run, hit_samples, euler_batch), and the claim runner.
"""

from ._core import (  # noqa: F401
    AlphaFamily,
    Convergence,
    batch_run,
    cauchy_cdf,
    claims,
    dkw_band,
    emit_samples,
    euler_batch,
    hit_samples,
    integral_test,
    ks_one_sample,
    ks_two_sample,
    maxtime_cdf,
    maxtime_density,
    proportion_check,
    q_prob,
    run_claim,
    spitzer_cdf,
    v_of,
    v_prime,
)

__all__ = [
    "AlphaFamily",
    "Convergence",
    "batch_run",
    "cauchy_cdf",
    "claims",
    "dkw_band",
    "emit_samples",
    "euler_batch",
    "hit_samples",
    "integral_test",
    "ks_one_sample",
    "ks_two_sample",
    "maxtime_cdf",
    "maxtime_density",
    "proportion_check",
    "q_prob",
    "run_claim",
    "spitzer_cdf",
    "v_of",
    "v_prime",
]

__version__ = "0.1.0"
