"""Binomial-proportion machinery shared by every Monte Carlo pipeline."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.stats import norm

__all__ = ["PersistenceEstimate", "wilson_ci"]


def wilson_ci(successes: int, samples: int, level: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion; stable near 0 and 1."""
    if samples <= 0:
        raise ValueError("samples must be positive")
    if not 0 <= successes <= samples:
        raise ValueError(f"successes {successes} outside 0..{samples}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level!r}")
    z = float(norm.ppf(0.5 + level / 2.0))
    phat = successes / samples
    z2 = z * z
    denom = 1.0 + z2 / samples
    center = (phat + z2 / (2.0 * samples)) / denom
    half = (
        z
        * math.sqrt(phat * (1.0 - phat) / samples + z2 / (4.0 * samples * samples))
        / denom
    )
    # the score interval hits the boundary exactly at 0 or full successes
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == samples else min(1.0, center + half)
    return lo, hi


@dataclass(frozen=True)
class PersistenceEstimate:
    """Monte Carlo proportion estimate with its 95% (by default) Wilson interval.

    Zero-success estimates keep a meaningful upper bound but are not usable on
    the log scale; log-based consumers should check `log_usable` first.
    """

    successes: int
    samples: int
    p_hat: float
    ci_low: float
    ci_high: float

    @classmethod
    def from_counts(
        cls, successes: int, samples: int, level: float = 0.95
    ) -> "PersistenceEstimate":
        lo, hi = wilson_ci(successes, samples, level)
        return cls(successes, samples, successes / samples, lo, hi)

    def log_usable(self, floor: int = 10) -> bool:
        return self.successes >= floor

    @property
    def log_p(self) -> float:
        if self.successes == 0:
            raise ValueError("log of a zero-success estimate")
        return math.log(self.p_hat)

    @property
    def log_p_stderr(self) -> float:
        """Delta-method standard error of log p_hat: sqrt((1-p) / (n p))."""
        if self.successes == 0:
            raise ValueError("stderr of log of a zero-success estimate")
        return math.sqrt((1.0 - self.p_hat) / (self.samples * self.p_hat))

    def overlaps(self, other: "PersistenceEstimate") -> bool:
        """Whether the two confidence intervals intersect."""
        return self.ci_low <= other.ci_high and other.ci_low <= self.ci_high
