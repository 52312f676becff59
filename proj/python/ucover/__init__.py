"""Random covering of the circle by shrinking balls.

Thin Python layer over the C++ core: exact arc-set geometry, the dimension
bounds for r_n = c/n, and seeded Monte Carlo experiments.
"""

from ._ucover import (
    DEFAULT_SEED,
    ArcSet,
    RadiusFamily,
    UcoverError,
    __version__,
    ball,
    box_count,
    c_star,
    classify,
    coverage_experiment,
    cover_growth,
    dist,
    k_lm,
    lambda_,
    lower_bound,
    optimize_lower,
    optimize_upper_matrix,
    optimize_upper_weak,
    riesz_energy,
    riesz_experiment,
    riesz_potential,
    run_cli,
    s_exponent,
    sample_path,
    theta_delta,
    thicken,
    upper_bound_matrix,
    upper_bound_weak,
)

__all__ = [name for name in dir() if not name.startswith("_")]
