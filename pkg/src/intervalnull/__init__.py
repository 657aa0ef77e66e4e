"""Post-data inference for a parameter whose special value carries substantial prior belief."""

from intervalnull.dist import (
    NormalLikelihood,
    PosteriorMixture,
    SpecialInterval,
    TruncatedNormal,
    central_interval,
    mixture_cdf,
    mixture_quantile,
    std_normal_cdf,
    std_normal_quantile,
    trunc_cdf,
)
from intervalnull.effects import (
    DegenerateTableError,
    TwoByTwoTable,
    likelihood,
    log_odds_ratio,
    wald_ci,
    woolf_se,
)
from intervalnull.inference import (
    FloorViolationError,
    MethodResult,
    NoEvidenceError,
    flat_posterior,
    gamma_floor,
    one_sided_p,
    p_hybrid,
    q_hybrid,
    q_value,
    two_step,
)
from intervalnull.meta import RandomEffectsResult, StudyEffect, dersimonian_laird, forest_rows

__version__ = "0.1.0"
