"""DerSimonian-Laird random-effects pooling of study log odds ratios."""

from __future__ import annotations

import math
from dataclasses import dataclass

from intervalnull.dist import NormalLikelihood
from intervalnull.effects import wald_ci


@dataclass(frozen=True)
class StudyEffect:
    label: str
    estimate: float
    se: float

    def __post_init__(self):
        if not self.se > 0.0:
            raise ValueError(f"{self.label}: se must be > 0")


@dataclass(frozen=True)
class RandomEffectsResult:
    pooled: float
    pooled_se: float
    tau2: float
    q_stat: float
    ci: tuple[float, float]
    k: int


@dataclass(frozen=True)
class ForestRow:
    label: str
    odds_ratio: float
    lo: float
    hi: float
    combined: bool = False


def dersimonian_laird(studies, level: float = 0.95) -> RandomEffectsResult:
    """Pool ``studies`` with the moment estimator of the between-study variance.

    Sums are taken over the studies sorted by (estimate, se), which makes the
    result independent of input order down to the last bit.
    """
    studies = sorted(studies, key=lambda s: (s.estimate, s.se))
    k = len(studies)
    if k == 0:
        raise ValueError("need at least one study")

    y = [s.estimate for s in studies]
    w = [1.0 / s.se**2 for s in studies]
    sw = math.fsum(w)
    fixed = math.fsum(wi * yi for wi, yi in zip(w, y)) / sw
    q = math.fsum(wi * (yi - fixed) ** 2 for wi, yi in zip(w, y))

    if k == 1:
        tau2 = 0.0
    else:
        scale = sw - math.fsum(wi * wi for wi in w) / sw
        tau2 = max(0.0, (q - (k - 1)) / scale) if scale > 0 else 0.0

    w_re = [1.0 / (s.se**2 + tau2) for s in studies]
    sw_re = math.fsum(w_re)
    pooled = math.fsum(wi * yi for wi, yi in zip(w_re, y)) / sw_re
    # guard the invariant against last-ulp rounding
    pooled = min(max(pooled, min(y)), max(y))
    pooled_se = 1.0 / math.sqrt(sw_re)
    ci = wald_ci(NormalLikelihood(pooled, pooled_se), level)
    return RandomEffectsResult(pooled, pooled_se, tau2, q, ci, k)


def forest_rows(studies, combined: RandomEffectsResult | None = None, level: float = 0.95):
    """Rows of a forest plot in input order, with the pooled row last."""
    rows = []
    for s in studies:
        lo, hi = wald_ci(NormalLikelihood(s.estimate, s.se), level)
        rows.append(ForestRow(s.label, math.exp(s.estimate), lo, hi))
    if combined is not None:
        rows.append(
            ForestRow("Combined", math.exp(combined.pooled), combined.ci[0], combined.ci[1], True)
        )
    return rows
