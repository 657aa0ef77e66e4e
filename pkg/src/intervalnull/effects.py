"""Log odds ratios from 2x2 trial tables, with the Woolf variance approximation."""

from __future__ import annotations

import math
from dataclasses import dataclass

from intervalnull.dist import NormalLikelihood, std_normal_quantile


class DegenerateTableError(ValueError):
    """A 2x2 table with an empty cell; the Woolf variance is infinite."""


@dataclass(frozen=True)
class TwoByTwoTable:
    """Patients and events in the treatment (``_t``) and control (``_c``) arms."""

    n_t: int
    e_t: int
    n_c: int
    e_c: int

    def __post_init__(self):
        if not (0 < self.e_t < self.n_t and 0 < self.e_c < self.n_c):
            raise DegenerateTableError(
                f"every cell must be positive: treatment {self.e_t}/{self.n_t}, "
                f"control {self.e_c}/{self.n_c}"
            )

    def cells(self) -> tuple[int, int, int, int]:
        """(events_t, non-events_t, events_c, non-events_c)"""
        return self.e_t, self.n_t - self.e_t, self.e_c, self.n_c - self.e_c

    def swapped(self) -> "TwoByTwoTable":
        return TwoByTwoTable(self.n_c, self.e_c, self.n_t, self.e_t)


def log_odds_ratio(t: TwoByTwoTable) -> float:
    a, b, c, d = t.cells()
    return math.log(a / b) - math.log(c / d)


def woolf_se(t: TwoByTwoTable) -> float:
    return math.sqrt(sum(1.0 / k for k in t.cells()))


def likelihood(t: TwoByTwoTable) -> NormalLikelihood:
    """Normal likelihood for the log odds ratio of ``t``."""
    return NormalLikelihood(log_odds_ratio(t), woolf_se(t))


def wald_ci(lik: NormalLikelihood, level: float = 0.95) -> tuple[float, float]:
    """Two-sided Wald interval built on the log scale, returned on the OR scale."""
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level!r}")
    z = std_normal_quantile(1.0 - 0.5 * (1.0 - level))
    return math.exp(lik.estimate - z * lik.se), math.exp(lik.estimate + z * lik.se)
