"""Normal kernels, truncated normals and the three-piece post-data mixture.

Every inference method in this package ends up describing the parameter by a
mixture of at most three normal pieces: one truncated below the special
interval, one truncated to it, one truncated above it. The helpers here
evaluate and invert such mixtures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)

# Standard scores beyond this are treated as +/- infinity when bracketing.
_Z_BRACKET = 40.0


def std_normal_cdf(z: float) -> float:
    """Standard normal cdf via the complementary error function.

    ``erfc`` keeps full relative precision in the lower tail, so
    ``std_normal_cdf(-z)`` does not suffer cancellation for large ``z``.
    """
    if z == math.inf:
        return 1.0
    if z == -math.inf:
        return 0.0
    return 0.5 * math.erfc(-z / SQRT2)


def std_normal_pdf(z: float) -> float:
    return math.exp(-0.5 * z * z) / SQRT2PI


def std_normal_quantile(p: float) -> float:
    """Invert :func:`std_normal_cdf` by bisection.

    Bisection runs until the bracket stops shrinking in floating point, which
    leaves the cdf of the result within 1e-10 of ``p`` (usually far closer).
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile needs 0 < p < 1, got {p!r}")
    if p == 0.5:
        return 0.0
    lo, hi = -_Z_BRACKET, _Z_BRACKET
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if std_normal_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _std_mass(a: float, b: float) -> float:
    """Standard normal probability of (a, b), computed on the tail side."""
    if b <= a:
        return 0.0
    if a >= 0.0:
        return std_normal_cdf(-a) - std_normal_cdf(-b)
    return std_normal_cdf(b) - std_normal_cdf(a)


@dataclass(frozen=True)
class SpecialInterval:
    """The interval ``[theta0 - epsilon, theta0 + epsilon]``; ``epsilon == 0`` is a point."""

    theta0: float
    epsilon: float

    def __post_init__(self):
        if not (self.epsilon >= 0.0 and math.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be finite and >= 0, got {self.epsilon!r}")
        if not math.isfinite(self.theta0):
            raise ValueError("theta0 must be finite")

    def lower(self) -> float:
        return self.theta0 - self.epsilon

    def upper(self) -> float:
        return self.theta0 + self.epsilon

    @property
    def is_point(self) -> bool:
        return self.epsilon == 0.0

    def contains(self, x: float) -> bool:
        return self.lower() <= x <= self.upper()


@dataclass(frozen=True)
class NormalLikelihood:
    """Normal approximation ``N(estimate, se**2)`` to the likelihood, read as a function of theta."""

    estimate: float
    se: float

    def __post_init__(self):
        if not (self.se > 0.0 and math.isfinite(self.se)):
            raise ValueError(f"se must be finite and > 0, got {self.se!r}")
        if not math.isfinite(self.estimate):
            raise ValueError("estimate must be finite")

    def density(self, theta: float) -> float:
        return std_normal_pdf((theta - self.estimate) / self.se) / self.se

    def cdf(self, theta: float) -> float:
        """Mass of the normalised likelihood below ``theta``."""
        return std_normal_cdf((theta - self.estimate) / self.se)

    def mass(self, a: float, b: float) -> float:
        """Mass of the normalised likelihood on ``(a, b)``."""
        return _std_mass((a - self.estimate) / self.se, (b - self.estimate) / self.se)

    def sampling_cdf(self, w: float, mean: float) -> float:
        """Sampling cdf of the estimator at ``w`` when the true value is ``mean``."""
        return std_normal_cdf((w - mean) / self.se)


@dataclass(frozen=True)
class TruncatedNormal:
    mean: float
    sd: float
    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self):
        if not self.sd > 0.0:
            raise ValueError("sd must be > 0")
        if not self.lower < self.upper:
            raise ValueError(f"need lower < upper, got ({self.lower}, {self.upper})")
        mass = _std_mass(self._z(self.lower), self._z(self.upper))
        if not mass > 0.0:
            raise ValueError("parent normal has no mass on the truncation range")
        object.__setattr__(self, "_mass", mass)

    def _z(self, x: float) -> float:
        return (x - self.mean) / self.sd

    def parent_mass(self) -> float:
        return self._mass

    def cdf(self, x: float) -> float:
        if x <= self.lower:
            return 0.0
        if x >= self.upper:
            return 1.0
        return min(1.0, _std_mass(self._z(self.lower), self._z(x)) / self.parent_mass())

    def pdf(self, x: float) -> float:
        if not self.lower < x < self.upper:
            return 0.0
        return std_normal_pdf(self._z(x)) / (self.sd * self.parent_mass())

    def bracket(self) -> tuple[float, float]:
        """Finite bounds enclosing all but a negligible fraction of the mass."""
        lo = max(self.lower, self.mean - _Z_BRACKET * self.sd)
        hi = min(self.upper, self.mean + _Z_BRACKET * self.sd)
        return lo, hi


def trunc_cdf(t: TruncatedNormal, x: float) -> float:
    return t.cdf(x)


@dataclass(frozen=True)
class PosteriorMixture:
    """Three-piece post-data distribution split at the special interval.

    ``inside`` may be ``None`` only for a point interval, where the inside
    weight sits as an atom at ``theta0``. An outer piece may be ``None`` only
    when its weight is zero.
    """

    interval: SpecialInterval
    below: Optional[TruncatedNormal]
    inside: Optional[TruncatedNormal]
    above: Optional[TruncatedNormal]
    weights: tuple[float, float, float]

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        if len(w) != 3 or any(v < 0.0 for v in w):
            raise ValueError(f"weights must be three nonnegative numbers, got {self.weights!r}")
        if abs(sum(w) - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {sum(w)!r}, not 1")
        object.__setattr__(self, "weights", w)
        lo, hi = self.interval.lower(), self.interval.upper()
        for piece, weight, name in zip(self.pieces, w, ("below", "inside", "above")):
            if piece is None and weight > 0.0 and not (name == "inside" and self.interval.is_point):
                raise ValueError(f"{name} piece missing but carries weight {weight}")
        if self.below is not None and self.below.upper > lo:
            raise ValueError("below piece extends past the interval's lower end")
        if self.above is not None and self.above.lower < hi:
            raise ValueError("above piece starts before the interval's upper end")
        if self.inside is not None and (self.inside.lower < lo or self.inside.upper > hi):
            raise ValueError("inside piece leaves the interval")

    @property
    def pieces(self):
        return (self.below, self.inside, self.above)

    def cdf(self, x: float) -> float:
        w_below, w_inside, w_above = self.weights
        total = 0.0
        if w_below and self.below is not None:
            total += w_below * self.below.cdf(x)
        if w_inside:
            if self.inside is None:
                total += w_inside if x >= self.interval.theta0 else 0.0
            else:
                total += w_inside * self.inside.cdf(x)
        if w_above and self.above is not None:
            total += w_above * self.above.cdf(x)
        return min(1.0, total)

    def pdf(self, x: float) -> float:
        """Density of the continuous part (an inside atom is not included)."""
        return sum(
            w * p.pdf(x) for p, w in zip(self.pieces, self.weights) if w and p is not None
        )

    def bracket(self) -> tuple[float, float]:
        los, his = [], []
        for piece, w in zip(self.pieces, self.weights):
            if not w:
                continue
            if piece is None:
                los.append(self.interval.theta0)
                his.append(self.interval.theta0)
            else:
                lo, hi = piece.bracket()
                los.append(lo)
                his.append(hi)
        return min(los), max(his)

    def quantile(self, p: float) -> float:
        return mixture_quantile(self, p)


def mixture_cdf(m: PosteriorMixture, x: float) -> float:
    return m.cdf(x)


def mixture_quantile(m: PosteriorMixture, p: float) -> float:
    """Smallest ``x`` with ``mixture_cdf(m, x) >= p``, found by bisection."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile needs 0 < p < 1, got {p!r}")
    lo, hi = m.bracket()
    # widen until the bracket really straddles p
    span = max(hi - lo, 1.0)
    while m.cdf(lo) >= p:
        lo -= span
        span *= 2
    span = max(hi - lo, 1.0)
    while m.cdf(hi) < p:
        hi += span
        span *= 2
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if m.cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    # bisection only approaches a piece boundary; land on it exactly
    for edge in (m.interval.lower(), m.interval.theta0, m.interval.upper()):
        if lo <= edge < hi and m.cdf(edge) >= p:
            return edge
    return hi


def central_interval(m: PosteriorMixture, level: float = 0.95) -> tuple[float, float]:
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level!r}")
    tail = 0.5 * (1.0 - level)
    return mixture_quantile(m, tail), mixture_quantile(m, 1.0 - tail)


def split_normal(
    interval: SpecialInterval,
    mean: float,
    sd: float,
    weights: tuple[float, float, float],
) -> PosteriorMixture:
    """Build a mixture whose pieces are ``N(mean, sd**2)`` truncated to each region.

    Pieces whose parent mass underflows are dropped; their weight must then be 0.
    """
    lo, hi = interval.lower(), interval.upper()

    def piece(a, b):
        if a >= b:
            return None
        try:
            return TruncatedNormal(mean, sd, a, b)
        except ValueError:
            return None

    return PosteriorMixture(
        interval=interval,
        below=piece(-math.inf, lo),
        inside=piece(lo, hi),
        above=piece(hi, math.inf),
        weights=weights,
    )
