"""Signed log-domain scalars and stable log-space reductions.

Magnitudes like (x+1)^(2n+1) overflow double precision long before the
degrees this package targets, so every large-degree quantity is carried as a
sign plus natural-log magnitude, and summations are anchored at the largest
term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, logsumexp

__all__ = ["SignedLogValue", "signed_log_sum", "log_binomial_row", "log_binomial"]

_NEG_INF = float("-inf")


@dataclass(frozen=True)
class SignedLogValue:
    """A real number stored as (sign, ln|value|); sign 0 encodes exact zero."""

    sign: int
    log_abs: float

    def __post_init__(self) -> None:
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")
        if self.sign == 0:
            object.__setattr__(self, "log_abs", _NEG_INF)

    @classmethod
    def from_float(cls, value: float) -> "SignedLogValue":
        if not math.isfinite(value):
            raise ValueError(f"cannot represent non-finite value {value!r}")
        if value == 0.0:
            return cls(0, _NEG_INF)
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    def to_float(self) -> float:
        """sign * exp(log_abs); overflows/underflows like any float would."""
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)

    def scaled(self, log_factor: float) -> "SignedLogValue":
        """Multiply by exp(log_factor) without leaving log space."""
        if self.sign == 0:
            return self
        return SignedLogValue(self.sign, self.log_abs + log_factor)


def signed_log_sum(log_terms, signs) -> SignedLogValue:
    """Sum of signs_i * exp(log_terms_i) as a SignedLogValue.

    Accumulates exp-of-difference against the maximum term, so the result is
    accurate to machine precision relative to the largest summand even when
    the total cancels far below it.  Terms with sign 0 are ignored; exact
    cancellation yields sign 0.
    """
    log_terms = np.asarray(log_terms, dtype=float)
    signs = np.asarray(signs, dtype=float)
    if log_terms.shape != signs.shape:
        raise ValueError("log_terms and signs must have matching shapes")
    if log_terms.size == 0:
        return SignedLogValue(0, _NEG_INF)
    log_abs, sign = logsumexp(log_terms, b=signs, return_sign=True)
    if sign == 0.0 or log_abs == _NEG_INF:
        return SignedLogValue(0, _NEG_INF)
    return SignedLogValue(int(sign), float(log_abs))


@lru_cache(maxsize=16)
def log_binomial_row(n: int) -> np.ndarray:
    """ln C(n, i) for i = 0..n, cached read-only and reused across samples."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    i = np.arange(n + 1, dtype=float)
    row = gammaln(n + 1.0) - gammaln(i + 1.0) - gammaln(n - i + 1.0)
    row.flags.writeable = False
    return row


def log_binomial(n: int, i: int) -> float:
    """ln C(n, i) for a single index pair."""
    if not 0 <= i <= n:
        raise ValueError(f"index {i} outside 0..{n}")
    return float(gammaln(n + 1.0) - gammaln(i + 1.0) - gammaln(n - i + 1.0))
