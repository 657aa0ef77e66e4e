import math

import numpy as np
import pytest
from scipy import stats

from intervalnull import NormalLikelihood, SpecialInterval
from intervalnull.inference import (
    FloorViolationError,
    NoEvidenceError,
    endpoint_mean_likelihood,
    endpoint_ratio_bound,
    flat_posterior,
    gamma_floor,
    mean_likelihood_inside,
    one_sided_p,
    optimize_c,
    p_hybrid,
    prior_carryover,
    q_hybrid,
    q_value,
    shell_limit_bound,
    shell_mean_likelihood,
    standard_bayes_normal_g,
    two_step,
)

ALPHAS = [round(0.1 * k, 1) for k in range(1, 10)]


def scipy_q(lik, interval, mu):
    d = abs(lik.estimate - interval.theta0)
    t0 = interval.theta0
    return stats.norm.sf(t0 + d, mu, lik.se) + stats.norm.cdf(t0 - d, mu, lik.se)


def random_liks(n, seed):
    rng = np.random.default_rng(seed)
    return [NormalLikelihood(float(rng.uniform(-2, 2)), float(rng.uniform(0.05, 1.0))) for _ in range(n)]


# -- flat ---------------------------------------------------------------------


def test_flat_rows(lik1, lik2, lik3, interval):
    for lik, (p_in, p_ge) in ((lik1, (0.004, 0.005)), (lik2, (0.0154, 0.026)), (lik3, (0.095, 0.138))):
        r = flat_posterior(lik, interval)
        assert abs(r.interval_prob - p_in) <= 0.002
        assert abs(r.prob_ge_lower - p_ge) <= 0.002
        ref = stats.norm(lik.estimate, lik.se)
        assert r.interval_prob == pytest.approx(ref.cdf(0.1) - ref.cdf(-0.1), abs=1e-12)


def test_flat_point_interval():
    assert flat_posterior(NormalLikelihood(0.0, 1.0), SpecialInterval(0.0, 0.0)).interval_prob == 0.0


# -- standard Bayes -------------------------------------------------------------


def test_standard_bayes_limits(lik1, interval):
    assert standard_bayes_normal_g(lik1, interval, 0.0, 1.0) == 0.0
    assert standard_bayes_normal_g(lik1, interval, 1.0, 1.0) == 1.0


def test_standard_bayes_tends_to_one(lik1, interval):
    values = [standard_bayes_normal_g(lik1, interval, 0.5, 2.0**k) for k in range(21)]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert values[-1] > 0.99


# -- likelihood averages ---------------------------------------------------------


def test_mean_likelihood_inside(lik1, interval):
    ref = (stats.norm.cdf(0.1, lik1.estimate, lik1.se) - stats.norm.cdf(-0.1, lik1.estimate, lik1.se)) / 0.2
    assert mean_likelihood_inside(lik1, interval) == pytest.approx(ref, abs=1e-14)
    assert abs(mean_likelihood_inside(lik1, interval) - 0.01906) <= 1e-4


def test_mean_likelihood_point_peak():
    lik = NormalLikelihood(0.3, 0.7)
    assert mean_likelihood_inside(lik, SpecialInterval(0.3, 0.0)) == pytest.approx(1 / (0.7 * math.sqrt(2 * math.pi)))


def test_mean_likelihood_reflection():
    lik = NormalLikelihood(0.0, 0.4)
    a = mean_likelihood_inside(lik, SpecialInterval(0.5, 0.2))
    b = mean_likelihood_inside(lik, SpecialInterval(-0.5, 0.2))
    assert a == pytest.approx(b, rel=1e-14)


def test_shell_examples(lik1, interval):
    assert abs(shell_mean_likelihood(lik1, interval, 1.62) - 0.2783) <= 5e-4
    near = shell_mean_likelihood(lik1, interval, 0.1 + 1e-7)
    assert near == pytest.approx(endpoint_mean_likelihood(lik1, interval), rel=1e-5)
    assert shell_mean_likelihood(lik1, interval, 1e6) < 1e-6
    with pytest.raises(ValueError):
        shell_mean_likelihood(lik1, interval, 0.1)


def test_optimize_c_against_dense_grid(lik1, lik3, interval):
    for lik in (lik1, lik3):
        c_star, m_star = optimize_c(lik, interval)
        grid = np.linspace(0.1 + 1e-6, 8.0, 40001)
        dense = max(shell_mean_likelihood(lik, interval, float(c)) for c in grid)
        assert m_star >= dense - 1e-9
        assert m_star == pytest.approx(dense, rel=1e-6)
    c1, m1 = optimize_c(lik1, interval)
    assert abs(c1 - 1.62) <= 0.01 and abs(m1 - 0.2783) <= 5e-4
    assert abs(optimize_c(lik3, interval)[1] - 0.5930) <= 5e-4


def test_optimize_c_limit_case():
    # estimate at theta0 with a wide interval: every shell averages less than the edges
    lik = NormalLikelihood(0.0, 0.05)
    interval = SpecialInterval(0.0, 0.1)
    c_star, m_star = optimize_c(lik, interval)
    assert c_star == 0.1
    assert m_star == endpoint_mean_likelihood(lik, interval)


def test_support_property_random_z():
    rng = np.random.default_rng(247)
    point = SpecialInterval(0.0, 0.0)
    for _ in range(50):
        se = float(rng.uniform(0.1, 2.0))
        z = float(rng.uniform(-2.46, 2.46))
        lik = NormalLikelihood(z * se, se)
        c_star, _ = optimize_c(lik, point)
        assert c_star <= abs(lik.estimate) + se


# -- two-step ------------------------------------------------------------------


@pytest.mark.parametrize(
    "which, alpha, p_in, p_ge, ci",
    [
        ("lik1", 0.5, 0.064, 0.065, (0.136, 0.992)),
        ("lik1", 0.8, 0.214, 0.215, (0.141, 1.060)),
        ("lik3", 0.5, 0.446, 0.488, (0.369, 1.112)),
    ],
)
def test_two_step_published(request, interval, which, alpha, p_in, p_ge, ci):
    r = two_step(request.getfixturevalue(which), interval, alpha)
    assert abs(r.interval_prob - p_in) <= 0.002
    assert abs(r.prob_ge_lower - p_ge) <= 0.002
    lo, hi = r.or_interval(0.95)
    assert abs(lo - ci[0]) <= 0.005 and abs(hi - ci[1]) <= 0.005


def test_two_step_monotone_in_alpha(lik1, lik2, lik3, interval):
    for lik in (lik1, lik2, lik3):
        probs = [two_step(lik, interval, a).interval_prob for a in ALPHAS]
        assert all(b > a for a, b in zip(probs, probs[1:]))


def test_two_step_rejects_bad_alpha(lik1, interval):
    for a in (0.0, 1.0, -0.1):
        with pytest.raises(ValueError):
            two_step(lik1, interval, a)


def test_two_step_weights(lik1, interval):
    r = two_step(lik1, interval, 0.5)
    below, inside, above = r.mixture.weights
    assert inside == r.interval_prob
    assert below + inside + above == pytest.approx(1.0, abs=1e-12)
    assert r.prob_ge_lower >= r.interval_prob - 1e-12


# -- closed-form bounds ---------------------------------------------------------


def test_endpoint_ratio_example():
    lik = NormalLikelihood(0.0, 1.0)
    value = endpoint_ratio_bound(lik, SpecialInterval(0.0, 0.1), 0.5)
    # frozen from an mpmath evaluation of 0.5 * (erf mass / 0.2) / pdf(0.1)
    assert value == pytest.approx(0.5016700047672006, abs=1e-14)


def test_endpoint_ratio_flat_limit():
    lik = NormalLikelihood(0.0, 1.0)
    assert endpoint_ratio_bound(lik, SpecialInterval(0.0, 1e-6), 0.3) == pytest.approx(0.3, abs=1e-10)


def test_endpoint_ratio_exceeds_alpha_and_precondition(lik1):
    lik = NormalLikelihood(0.02, 0.5)
    interval = SpecialInterval(0.0, 0.2)
    assert endpoint_ratio_bound(lik, interval, 0.4) > 0.4
    with pytest.raises(ValueError):
        endpoint_ratio_bound(lik1, SpecialInterval(0.0, 0.1), 0.5)


def test_shell_limit_bound_matches_optimizer_in_limit_case():
    lik = NormalLikelihood(0.0, 0.05)
    interval = SpecialInterval(0.0, 0.1)
    assert shell_limit_bound(lik, interval, 0.5) == pytest.approx(two_step(lik, interval, 0.5).interval_prob, rel=1e-12)


# -- P values and the P-hybrid ---------------------------------------------------


def test_one_sided_p(lik1, lik2, lik3, interval):
    for lik, p in ((lik1, 0.0049), (lik2, 0.0259), (lik3, 0.1379)):
        value, side = one_sided_p(lik, interval)
        assert side == "lower"
        assert abs(value - p) <= 2e-4
        assert value == pytest.approx(stats.norm.cdf(lik.estimate, -0.1, lik.se), rel=1e-12)


def test_one_sided_p_sides(interval):
    assert one_sided_p(NormalLikelihood(0.0, 0.3), interval)[1] == "none"
    p, side = one_sided_p(NormalLikelihood(0.8, 0.3), interval)
    assert side == "upper"
    assert p == pytest.approx(stats.norm.sf(0.8, 0.1, 0.3), rel=1e-12)


def test_gamma_floor(lik1):
    assert abs(gamma_floor(lik1, SpecialInterval(0.0, 0.1)) - 0.001) <= 5e-4
    # just off centre so a side exists, with the split essentially even
    assert gamma_floor(NormalLikelihood(-1e-12, 1.0), SpecialInterval(0.0, 0.0)) == pytest.approx(0.5, abs=1e-9)
    assert gamma_floor(NormalLikelihood(-8.0, 0.5), SpecialInterval(0.0, 0.0)) < 1e-50
    with pytest.raises(NoEvidenceError):
        gamma_floor(NormalLikelihood(0.0, 0.3), SpecialInterval(0.0, 0.1))


@pytest.mark.parametrize(
    "gamma, p_in, ci", [(0.05, 0.049, (0.136, 0.971)), (0.02, 0.019, (0.135, 0.813)), (0.01, 0.009, (0.135, 0.725))]
)
def test_p_hybrid_table1(lik1, interval, gamma, p_in, ci):
    r = p_hybrid(lik1, interval, gamma)
    assert abs(r.interval_prob - p_in) <= 0.001
    assert r.prob_ge_lower == pytest.approx(gamma, abs=1e-15)
    lo, hi = r.or_interval(0.95)
    assert abs(lo - ci[0]) <= 0.005 and abs(hi - ci[1]) <= 0.005


def test_p_hybrid_sums_to_one(lik1, lik2, lik3, interval):
    for lik in (lik1, lik2, lik3):
        for gamma in (0.05, 0.2, 0.5, 0.9):
            r = p_hybrid(lik, interval, gamma)
            below, _, above = r.mixture.weights
            assert r.interval_prob + below + above == pytest.approx(1.0, abs=1e-12)


def test_p_hybrid_at_floor(lik1, interval):
    floor = gamma_floor(lik1, interval)
    assert p_hybrid(lik1, interval, floor).interval_prob == pytest.approx(0.0, abs=1e-15)


def test_p_hybrid_floor_error(lik1, interval):
    with pytest.raises(FloorViolationError) as info:
        p_hybrid(lik1, interval, 0.0005)
    assert info.value.floor == pytest.approx(gamma_floor(lik1, interval))


def test_p_hybrid_upper_side_mirrors(lik1, interval):
    mirrored = NormalLikelihood(-lik1.estimate, lik1.se)
    a = p_hybrid(lik1, interval, 0.05)
    b = p_hybrid(mirrored, interval, 0.05)
    assert b.interval_prob == pytest.approx(a.interval_prob, abs=1e-15)
    assert b.mixture.weights == pytest.approx(a.mixture.weights[::-1], abs=1e-15)


def test_no_evidence_and_carryover(interval):
    lik = NormalLikelihood(0.0, 0.3)
    with pytest.raises(NoEvidenceError):
        p_hybrid(lik, interval, 0.5)
    r = prior_carryover(lik, interval, 0.3)
    assert r.interval_prob == 0.3
    assert r.diagnostics["side"] == "none"


# -- Q value and the Q-hybrid ----------------------------------------------------


def test_q_value_published(lik1, lik2, lik3, interval):
    for lik, q in ((lik1, 0.0060), (lik2, 0.0365), (lik3, 0.1805)):
        value = q_value(lik, interval, 0.1)
        assert abs(value - q) <= 2e-4
        assert value == pytest.approx(scipy_q(lik, interval, 0.1), rel=1e-12)


def test_q_value_point_is_two_sided_p(lik1):
    point = SpecialInterval(0.0, 0.0)
    z = lik1.estimate / lik1.se
    assert q_value(lik1, point, 0.0) == pytest.approx(2 * stats.norm.sf(abs(z)), rel=1e-12)


def test_q_symmetry_and_ordering():
    rng = np.random.default_rng(5)
    for lik in random_liks(100, seed=17):
        eps = float(rng.uniform(0.0, 0.5))
        t0 = float(rng.uniform(-0.5, 0.5))
        interval = SpecialInterval(t0, eps)
        edge = q_value(lik, interval, t0 + eps)
        assert abs(edge - q_value(lik, interval, t0 - eps)) <= 1e-12
        for mu in rng.uniform(t0 - eps, t0 + eps, 5):
            assert q_value(lik, interval, float(mu)) <= edge + 1e-15
        for _ in range(5):
            gap = lik.se * float(rng.uniform(0.01, 3.0))
            mu = t0 + eps + gap if rng.random() < 0.5 else t0 - eps - gap
            assert q_value(lik, interval, mu) > edge


def test_q_epsilon_insensitive(lik1):
    two_sided = q_value(lik1, SpecialInterval(0.0, 0.0), 0.0)
    for eps in (0.0, 0.05, 0.1):
        q = q_value(lik1, SpecialInterval(0.0, eps), eps)
        assert two_sided / 2 <= q <= 2 * two_sided


@pytest.mark.parametrize(
    "which, beta, p_ge, ci, tol",
    [
        ("lik1", 0.05, 0.051, (0.136, 0.973), 0.001),
        ("lik1", 0.01, 0.011, (0.135, 0.732), 0.001),
        ("lik3", 0.5, 0.543, (0.375, 1.104), 0.002),
        ("lik3", 0.8, 0.843, (0.437, 1.098), 0.002),
    ],
)
def test_q_hybrid_published(request, interval, which, beta, p_ge, ci, tol):
    r = q_hybrid(request.getfixturevalue(which), interval, beta)
    assert r.interval_prob == beta
    assert abs(r.prob_ge_lower - p_ge) <= tol
    lo, hi = r.or_interval(0.95)
    assert abs(lo - ci[0]) <= 0.006 and abs(hi - ci[1]) <= 0.006


def test_q_hybrid_all_inside(lik1, interval):
    r = q_hybrid(lik1, interval, 1.0)
    lo, hi = r.central_interval(0.95)
    tn = stats.truncnorm((-0.1 - lik1.estimate) / lik1.se, (0.1 - lik1.estimate) / lik1.se, lik1.estimate, lik1.se)
    assert lo == pytest.approx(tn.ppf(0.025), abs=1e-8)
    assert hi == pytest.approx(tn.ppf(0.975), abs=1e-8)
