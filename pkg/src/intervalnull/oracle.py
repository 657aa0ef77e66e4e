"""Slow, independent reference computations used to check the main code paths.

Nothing here calls into :mod:`intervalnull.inference`; integrals are done by
adaptive Simpson on the raw likelihood so the closed forms used elsewhere are
checked rather than reused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class QuadratureError(RuntimeError):
    pass


def _normal_density(x, mean, sd):
    z = (x - mean) / sd
    return math.exp(-0.5 * z * z) / (sd * math.sqrt(2.0 * math.pi))


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-12, max_depth: int = 60) -> float:
    """Integrate ``f`` over ``[a, b]`` by recursive Simpson bisection."""
    if a == b:
        return 0.0

    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        if depth <= 0:
            raise QuadratureError(f"no convergence on [{a}, {b}]")
        return recurse(a, m, fa, flm, fm, left, tol / 2, depth - 1) + recurse(
            m, b, fm, frm, fb, right, tol / 2, depth - 1
        )

    # pre-split so narrow peaks are not missed by the first Simpson estimate
    pieces = 4
    edges = [a + (b - a) * k / pieces for k in range(pieces + 1)]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        flo, fhi, fmid = f(lo), f(hi), f(0.5 * (lo + hi))
        total += recurse(lo, hi, flo, fmid, fhi, simpson(flo, fmid, fhi, lo, hi), tol / pieces, max_depth)
    return total


def quadrature_posterior(lik, prior_density, interval, atoms=(), tol: float = 1e-12) -> float:
    """Posterior probability of ``interval`` from prior x likelihood by quadrature.

    Parameters
    ----------
    lik : NormalLikelihood
        Only ``estimate`` and ``se`` are read.
    prior_density : callable
        Density of the continuous part of the prior (may be improper).
    interval : SpecialInterval
    atoms : sequence of (location, mass)
        Point masses of the prior.
    """

    def post(x):
        return _normal_density(x, lik.estimate, lik.se) * prior_density(x)

    span = 40.0 * lik.se
    a, b = lik.estimate - span, lik.estimate + span
    lo, hi = interval.lower(), interval.upper()
    cuts = sorted({a, b, *(c for c in (lo, hi) if a < c < b)})
    segments = [(s, e, adaptive_simpson(post, s, e, tol)) for s, e in zip(cuts[:-1], cuts[1:])]

    total = sum(v for _, _, v in segments)
    inside = sum(v for s, e, v in segments if s >= lo and e <= hi)
    for loc, mass in atoms:
        height = mass * _normal_density(loc, lik.estimate, lik.se)
        total += height
        if lo <= loc <= hi:
            inside += height
    if total <= 0.0:
        raise QuadratureError("posterior has no mass")
    return inside / total


def mass_on_interval_prior(interval, alpha: float, g_sd: float):
    """(density, atoms) for alpha on the interval and a renormalised N(theta0, g_sd^2) outside."""
    t0, eps = interval.theta0, interval.epsilon
    if eps == 0.0:
        atoms = [(t0, alpha)]

        def density(x):
            return (1.0 - alpha) * _normal_density(x, t0, g_sd)

        return density, atoms

    g_in = math.erf(eps / (g_sd * math.sqrt(2.0)))

    def density(x):
        if interval.lower() <= x <= interval.upper():
            return alpha / (2.0 * eps)
        return (1.0 - alpha) * _normal_density(x, t0, g_sd) / (1.0 - g_in)

    return density, []


@dataclass(frozen=True)
class UniformShellGrid:
    """A mixture of uniform shells ``eps < |theta - theta0| <= c``."""

    c_values: tuple
    mixture_weights: tuple

    def __post_init__(self):
        w = np.asarray(self.mixture_weights, dtype=float)
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("mixture weights must be a probability vector")


def shell_marginals(lik, interval, c_values, tol: float = 1e-13):
    """Marginal likelihood under each uniform shell, by quadrature.

    ``c_values`` must be increasing; the likelihood is integrated once per
    grid gap on each side and accumulated.
    """
    t0, eps = interval.theta0, interval.epsilon

    def lik_at(x):
        return _normal_density(x, lik.estimate, lik.se)

    out = []
    left = right = 0.0
    prev = eps
    for c in c_values:
        if c <= prev:
            raise ValueError("c_values must be increasing and exceed epsilon")
        right += adaptive_simpson(lik_at, t0 + prev, t0 + c, tol)
        left += adaptive_simpson(lik_at, t0 - c, t0 - prev, tol)
        prev = c
        out.append((left + right) / (2.0 * (c - eps)))
    return np.array(out)


def inside_marginal(lik, interval, tol: float = 1e-13) -> float:
    eps = interval.epsilon
    if eps == 0.0:
        return _normal_density(interval.theta0, lik.estimate, lik.se)
    mass = adaptive_simpson(
        lambda x: _normal_density(x, lik.estimate, lik.se), interval.lower(), interval.upper(), tol
    )
    return mass / (2.0 * eps)


def gnis_search(lik, interval, alpha: float, grid_size: int = 256, n_random: int = 200, seed: int = 0):
    """Search symmetric non-increasing outside priors for the least interval probability.

    Returns a dict with the best single shell (``vertex``) and the best random
    mixture of shells (``mixture``); by linearity the mixture never wins.
    """
    if grid_size < 64:
        raise ValueError("grid_size must be at least 64")
    eps = interval.epsilon
    reach = max(abs(lik.estimate - interval.theta0), eps) + 12.0 * lik.se
    c_values = eps + (reach - eps) * np.arange(1, grid_size + 1) / grid_size
    marg = shell_marginals(lik, interval, c_values)
    m_in = inside_marginal(lik, interval)

    def prob(outside_marginal):
        num = alpha * m_in
        den = num + (1.0 - alpha) * outside_marginal
        return num / den if den > 0 else 0.0

    vertex_probs = np.array([prob(m) for m in marg])
    best = int(np.argmin(vertex_probs))

    rng = np.random.default_rng(seed)
    mixture_best = math.inf
    for _ in range(n_random):
        # sparse Dirichlet draws put weight near a few shells, dense ones spread it
        w = rng.dirichlet(np.full(grid_size, rng.choice([0.05, 1.0])))
        mixture_best = min(mixture_best, prob(float(w @ marg)))
    return {
        "vertex": float(vertex_probs[best]),
        "mixture": float(mixture_best),
        "c_best": float(c_values[best]),
        "grid": UniformShellGrid(tuple(c_values), tuple(np.eye(grid_size)[best])),
    }


def gnis_bruteforce_lower(lik, interval, alpha: float, grid_size: int = 256, n_random: int = 200, seed: int = 0):
    if alpha == 0.0:
        return 0.0
    res = gnis_search(lik, interval, alpha, grid_size, n_random, seed)
    return min(res["vertex"], res["mixture"])


def dersimonian_laird_steps(estimates, ses, level_z: float = 1.959963984540054):
    """Textbook DerSimonian-Laird, one line per step, in input order."""
    k = len(estimates)
    w = [1.0 / (s * s) for s in ses]
    sum_w = 0.0
    for wi in w:
        sum_w += wi
    ybar = 0.0
    for wi, yi in zip(w, estimates):
        ybar += wi * yi
    ybar /= sum_w
    q = 0.0
    for wi, yi in zip(w, estimates):
        q += wi * (yi - ybar) ** 2
    sum_w2 = 0.0
    for wi in w:
        sum_w2 += wi * wi
    denom = sum_w - sum_w2 / sum_w
    tau2 = (q - (k - 1)) / denom if k > 1 else 0.0
    if tau2 < 0:
        tau2 = 0.0
    ws = [1.0 / (s * s + tau2) for s in ses]
    sum_ws = 0.0
    num = 0.0
    for wi, yi in zip(ws, estimates):
        sum_ws += wi
        num += wi * yi
    pooled = num / sum_ws
    se = 1.0 / math.sqrt(sum_ws)
    return {
        "pooled": pooled,
        "pooled_se": se,
        "tau2": tau2,
        "q_stat": q,
        "ci": (math.exp(pooled - level_z * se), math.exp(pooled + level_z * se)),
    }
