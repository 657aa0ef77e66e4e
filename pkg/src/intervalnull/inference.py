"""Post-data distributions for a parameter with a special interval.

Four routes are provided, all built on a normal likelihood ``N(estimate, se**2)``:

* :func:`flat_posterior` -- plain Bayes with a flat improper prior.
* :func:`two_step` -- flat prior outside the interval for the shape of the
  outside posterior, then the smallest posterior interval probability over
  all symmetric non-increasing outside priors for the interval mass.
* :func:`p_hybrid` -- the analyst assigns a probability to
  ``theta >= theta0 - eps`` after reading the one-sided P value.
* :func:`q_hybrid` -- the analyst assigns a probability to the interval
  itself after reading the Q value.

Every route returns a :class:`MethodResult` whose ``mixture`` is the full
post-data distribution (a :class:`~intervalnull.dist.PosteriorMixture`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from intervalnull.dist import (
    NormalLikelihood,
    PosteriorMixture,
    SpecialInterval,
    central_interval,
    split_normal,
    std_normal_cdf,
    std_normal_pdf,
)

METHODS = ("flat", "standard-normal-g", "two-step", "p-hybrid", "q-hybrid")

GRID_POINTS = 512
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class FloorViolationError(ValueError):
    """The assigned probability for ``theta >= theta0 - eps`` is below lambda/(1+lambda)."""

    def __init__(self, gamma, floor):
        self.gamma = gamma
        self.floor = floor
        super().__init__(
            f"gamma={gamma:g} is below the consistency floor lambda/(1+lambda)={floor:.6f}; "
            "the interval probability gamma - lambda*(1-gamma) would be negative"
        )


class NoEvidenceError(ValueError):
    """Neither one-sided test points away from the interval.

    The estimate gives no grounds for lowering belief in the interval, so the
    prior probability of the interval should be carried over unchanged (see
    :func:`prior_carryover`).
    """


@dataclass(frozen=True)
class MethodResult:
    method: str
    interval_prob: float
    prob_ge_lower: float
    mixture: PosteriorMixture
    hyper: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)

    def central_interval(self, level: float = 0.95) -> tuple[float, float]:
        """Equal-tail interval on the parameter (log) scale."""
        return central_interval(self.mixture, level)

    def or_interval(self, level: float = 0.95) -> tuple[float, float]:
        lo, hi = self.central_interval(level)
        return math.exp(lo), math.exp(hi)

    @property
    def mixture_prob_ge_lower(self) -> float:
        """``P(theta >= theta0 - eps)`` read off the mixture itself."""
        w_below, w_inside, w_above = self.mixture.weights
        return w_inside + w_above


# -- building blocks ---------------------------------------------------------


def _region_masses(lik: NormalLikelihood, interval: SpecialInterval):
    """Flat-prior posterior mass below, inside and above the interval."""
    lo, hi = interval.lower(), interval.upper()
    below = lik.mass(-math.inf, lo)
    inside = lik.mass(lo, hi)
    above = lik.mass(hi, math.inf)
    total = below + inside + above
    return below / total, inside / total, above / total


def outside_split(lik: NormalLikelihood, interval: SpecialInterval) -> tuple[float, float]:
    """Fractions of the outside-conditional flat posterior below and above the interval."""
    below, _, above = _region_masses(lik, interval)
    out = below + above
    if out <= 0.0:
        raise ValueError("likelihood has no representable mass outside the interval")
    return below / out, above / out


def mean_likelihood_inside(lik: NormalLikelihood, interval: SpecialInterval) -> float:
    """Average likelihood height over the interval (its height at theta0 for a point)."""
    if interval.is_point:
        return lik.density(interval.theta0)
    return lik.mass(interval.lower(), interval.upper()) / (2.0 * interval.epsilon)


def endpoint_mean_likelihood(lik: NormalLikelihood, interval: SpecialInterval) -> float:
    """Mean likelihood height at the two interval limits."""
    return 0.5 * (lik.density(interval.lower()) + lik.density(interval.upper()))


def shell_mean_likelihood(lik: NormalLikelihood, interval: SpecialInterval, c: float) -> float:
    """Average likelihood over the shell ``eps < |theta - theta0| <= c``.

    This is the marginal likelihood under an outside prior that is uniform on
    the shell, the extreme points of the symmetric non-increasing class.
    """
    eps = interval.epsilon
    if not c > eps:
        raise ValueError(f"shell half-width c={c!r} must exceed epsilon={eps!r}")
    t0 = interval.theta0
    mass = lik.mass(t0 - c, t0 - eps) + lik.mass(t0 + eps, t0 + c)
    return mass / (2.0 * (c - eps))


def golden_section_max(f, a: float, b: float, tol: float, max_iter: int = 500):
    """Maximise a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def optimize_c(lik: NormalLikelihood, interval: SpecialInterval) -> tuple[float, float]:
    """Shell half-width maximising :func:`shell_mean_likelihood`.

    A 512-point grid over ``(eps, max(|estimate - theta0|, eps) + 10 se]`` picks
    the neighbourhood of the maximum; golden-section search refines it. The
    function is not known to be unimodal, so the grid does the global work.

    Returns ``(c_star, m_bar_star)``. When the supremum is the ``c -> eps``
    limit, ``c_star == eps`` and ``m_bar_star`` is the endpoint mean height.
    """
    eps = interval.epsilon
    dist = abs(lik.estimate - interval.theta0)
    top = max(dist, eps) + 10.0 * lik.se
    step = (top - eps) / GRID_POINTS
    limit = endpoint_mean_likelihood(lik, interval)

    def f(c):
        return limit if c <= eps else shell_mean_likelihood(lik, interval, c)

    grid = [eps + k * step for k in range(GRID_POINTS + 1)]
    values = [limit] + [f(c) for c in grid[1:]]
    best = max(range(len(grid)), key=values.__getitem__)
    a = grid[max(best - 1, 0)]
    b = grid[min(best + 1, GRID_POINTS)]
    c_star, m_star = golden_section_max(f, a, b, tol=1e-7 * lik.se)
    if values[best] > m_star:
        c_star, m_star = grid[best], values[best]
    if c_star - eps <= 1e-6 * lik.se and limit >= m_star:
        return eps, limit
    return c_star, m_star


# -- methods -----------------------------------------------------------------


def flat_posterior(lik: NormalLikelihood, interval: SpecialInterval) -> MethodResult:
    below, inside, above = _region_masses(lik, interval)
    mixture = split_normal(interval, lik.estimate, lik.se, (below, inside, above))
    return MethodResult("flat", inside, inside + above, mixture)


def standard_bayes_normal_g(
    lik: NormalLikelihood, interval: SpecialInterval, alpha: float, g_sd: float
) -> float:
    """Posterior probability of the interval under the mass-on-interval prior.

    The prior puts ``alpha`` uniformly on the interval (an atom at theta0 for a
    point interval) and ``1 - alpha`` on ``N(theta0, g_sd**2)`` restricted to
    the complement of the interval and renormalised there. As ``g_sd`` grows
    the result is driven towards 1 whatever the data say.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
    if not g_sd > 0.0:
        raise ValueError("g_sd must be > 0")
    if alpha in (0.0, 1.0):
        return alpha

    t0, eps, se = interval.theta0, interval.epsilon, lik.se
    inside = alpha * mean_likelihood_inside(lik, interval)

    # product of the two normal kernels = marginal density x normal in theta
    total_var = se * se + g_sd * g_sd
    marginal = std_normal_pdf((lik.estimate - t0) / math.sqrt(total_var)) / math.sqrt(total_var)
    if interval.is_point:
        outside = marginal
    else:
        post_mean = (lik.estimate * g_sd**2 + t0 * se**2) / total_var
        post_sd = se * g_sd / math.sqrt(total_var)
        lo, hi = interval.lower(), interval.upper()
        post_in = NormalLikelihood(post_mean, post_sd).mass(lo, hi)
        g_in = NormalLikelihood(t0, g_sd).mass(lo, hi)
        outside = marginal * (1.0 - post_in) / (1.0 - g_in)
    return inside / (inside + (1.0 - alpha) * outside)


def two_step(lik: NormalLikelihood, interval: SpecialInterval, alpha: float) -> MethodResult:
    """Two-step Bayesian post-data distribution for prior interval mass ``alpha``.

    ``prob_ge_lower`` follows the tabulation convention of the published
    analyses: interval probability plus the flat-posterior mass above the
    interval (capped at 1). The value implied by the mixture itself is
    :attr:`MethodResult.mixture_prob_ge_lower`.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    m_inside = mean_likelihood_inside(lik, interval)
    c_star, m_bar = optimize_c(lik, interval)
    lower_prob = alpha * m_inside / (alpha * m_inside + (1.0 - alpha) * m_bar)

    frac_below, frac_above = outside_split(lik, interval)
    rest = 1.0 - lower_prob
    mixture = split_normal(
        interval, lik.estimate, lik.se, (rest * frac_below, lower_prob, rest * frac_above)
    )
    flat_above = _region_masses(lik, interval)[2]
    return MethodResult(
        "two-step",
        lower_prob,
        min(1.0, lower_prob + flat_above),
        mixture,
        hyper=alpha,
        diagnostics={"c_star": c_star, "m_bar_star": m_bar, "m_inside": m_inside},
    )


def endpoint_ratio_bound(lik: NormalLikelihood, interval: SpecialInterval, alpha: float) -> float:
    """Closed-form lower bound ``alpha * M_inside / M_limits``.

    Only stated for a likelihood peaking inside the interval. Treat as a
    rough guide: it is not what the shell optimisation converges to (compare
    :func:`shell_limit_bound`) and it can exceed 1 for large ``alpha``.
    """
    if not interval.contains(lik.estimate):
        raise ValueError("likelihood maximum must lie inside the special interval")
    return alpha * mean_likelihood_inside(lik, interval) / endpoint_mean_likelihood(lik, interval)


def shell_limit_bound(lik: NormalLikelihood, interval: SpecialInterval, alpha: float) -> float:
    """Posterior interval probability with the outside prior shrunk onto the endpoints."""
    m_in = alpha * mean_likelihood_inside(lik, interval)
    return m_in / (m_in + (1.0 - alpha) * endpoint_mean_likelihood(lik, interval))


def one_sided_p(lik: NormalLikelihood, interval: SpecialInterval) -> tuple[float, str]:
    """One-sided P value against the nearer interval limit, and which side it tests.

    ``side == "lower"`` tests H0: theta >= theta0 - eps, ``"upper"`` tests
    H0: theta <= theta0 + eps. ``"none"`` means the estimate sits inside the
    interval so far that neither test points away from it; the P value
    returned is then 1.
    """
    below_lower = lik.sampling_cdf(lik.estimate, interval.lower())
    if below_lower <= 0.5:
        return below_lower, "lower"
    below_upper = lik.sampling_cdf(lik.estimate, interval.upper())
    if below_upper >= 0.5:
        return std_normal_cdf(-(lik.estimate - interval.upper()) / lik.se), "upper"
    return 1.0, "none"


def _lambda(lik, interval, side):
    frac_below, frac_above = outside_split(lik, interval)
    if side == "lower":
        return frac_above / frac_below
    return frac_below / frac_above


def gamma_floor(lik: NormalLikelihood, interval: SpecialInterval) -> float:
    """Smallest admissible probability for the null side, ``lambda / (1 + lambda)``."""
    _, side = one_sided_p(lik, interval)
    if side == "none":
        raise NoEvidenceError("no one-sided test applies; the floor is undefined")
    lam = _lambda(lik, interval, side)
    return lam / (1.0 + lam)


def p_hybrid(lik: NormalLikelihood, interval: SpecialInterval, gamma: float) -> MethodResult:
    """Post-data distribution from an analyst's probability ``gamma`` for the null side.

    For the usual lower side ``gamma`` is the probability of
    ``theta >= theta0 - eps``; the interval then receives
    ``gamma - lambda * (1 - gamma)`` and the far side ``lambda * (1 - gamma)``.
    The upper side is the mirror image.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma!r}")
    p, side = one_sided_p(lik, interval)
    if side == "none":
        raise NoEvidenceError(
            "the estimate gives no evidence against the interval; carry the prior "
            "probability over with prior_carryover()"
        )
    lam = _lambda(lik, interval, side)
    floor = lam / (1.0 + lam)
    if gamma < floor - 1e-12:
        raise FloorViolationError(gamma, floor)

    near = 1.0 - gamma
    far = lam * (1.0 - gamma)
    inside = max(0.0, 1.0 - near - far)
    weights = (near, inside, far) if side == "lower" else (far, inside, near)
    mixture = split_normal(interval, lik.estimate, lik.se, weights)
    return MethodResult(
        "p-hybrid",
        inside,
        inside + weights[2],
        mixture,
        hyper=gamma,
        diagnostics={"p_value": p, "side": side, "lambda": lam, "gamma_floor": floor},
    )


def q_value(lik: NormalLikelihood, interval: SpecialInterval, mu_star: float) -> float:
    """Probability, under ``N(mu_star, se**2)``, of an estimate further from theta0 than observed."""
    t0 = interval.theta0
    x = lik.estimate
    mirror = 2.0 * t0 - x
    if x >= t0:
        upper, lower = x, mirror
    else:
        upper, lower = mirror, x
    right = std_normal_cdf(-(upper - mu_star) / lik.se)
    left = std_normal_cdf((lower - mu_star) / lik.se)
    return right + left


def q_hybrid(lik: NormalLikelihood, interval: SpecialInterval, beta: float) -> MethodResult:
    """Post-data distribution from an analyst's probability ``beta`` for the interval.

    The outside mass ``1 - beta`` is shared between the two sides as the
    outside-conditional flat posterior shares it. ``prob_ge_lower`` follows the
    same tabulation convention as :func:`two_step`.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta!r}")
    frac_below, frac_above = outside_split(lik, interval)
    rest = 1.0 - beta
    mixture = split_normal(interval, lik.estimate, lik.se, (rest * frac_below, beta, rest * frac_above))
    flat_above = _region_masses(lik, interval)[2]
    return MethodResult(
        "q-hybrid",
        beta,
        min(1.0, beta + flat_above),
        mixture,
        hyper=beta,
        diagnostics={"q_value": q_value(lik, interval, interval.upper())},
    )


def prior_carryover(lik: NormalLikelihood, interval: SpecialInterval, prior_prob: float) -> MethodResult:
    """Keep the prior interval probability when no one-sided test points away from it."""
    result = q_hybrid(lik, interval, prior_prob)
    p, side = one_sided_p(lik, interval)
    return MethodResult(
        "p-hybrid",
        result.interval_prob,
        result.mixture_prob_ge_lower,
        result.mixture,
        hyper=prior_prob,
        diagnostics={"p_value": p, "side": side, "carried_over": True},
    )
