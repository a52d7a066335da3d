"""Monte Carlo persistence estimates for the weighted random polynomial family.

Per-sample decisions:

* full positive axis: exact.  A vectorized sign scan over the time grid
  rejects samples with a certifiably negative value (threshold far above
  float cancellation noise); everything else goes to the integer chain
  counter, so a True verdict is always exact.
* restricted intervals (low / high / main): statistical with guards.  The
  time-grid step resolves the O(1) correlation scale; grid-positive samples
  are accepted once every cell clears a conditional-dip threshold, suspicious
  cells are refined locally, and rare unresolved samples escalate to the
  exact counter (conservative reject above the exact-degree cutoff, counted
  and reported).

Determinism: a master seed spawns one child stream per worker, the sample
counts per worker are a fixed function of (samples, workers), and results
reduce by summation, so every estimate is reproducible bit-for-bit given
(seed, workers, batch).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .kernel import (
    alpha_shift,
    autocorr_limit_gap,
    main_window_width,
    mn_exact,
    transform_x,
)
from .logscale import log_binomial_row
from .polys import BinomialPolynomial, eval_f
from .roots import DyadicPolynomial, count_roots_in, is_persistent
from .stats import PersistenceEstimate

__all__ = [
    "IntervalSpec",
    "FULL_AXIS",
    "LOW_INTERVAL",
    "HIGH_INTERVAL",
    "MAIN_INTERVAL",
    "estimate_persistence",
    "auto_budget",
    "RatioPoint",
    "ratio_sequence",
    "IntervalReportRow",
    "negligible_interval_report",
    "AutocorrGapRow",
    "autocorr_convergence_report",
]

_KINDS = ("full", "low", "high", "main")

# scan tuning; part of the determinism contract for a given release
_NOISE_REL = 1e-10  # definite-sign threshold relative to the row weight mass
_AMBIG_NORMALIZED = 1e-9  # normalized |value| below this is unresolvable in float
_DIP_GUARD = 12.0  # clearance in units of the conditional in-cell sd
_REFINE_DEPTH = 6
_EXACT_FALLBACK_MAX_DEGREE = 128
_W_CACHE_ELEMENTS = 15_000_000
_DEFAULT_BATCH = 4096


@dataclass(frozen=True)
class IntervalSpec:
    """Evaluation interval: the full positive axis or one of the pieces
    (0, n^-1/6), (n^1/6, inf), (n^-1/6, n^1/6); endpoints are computed from
    n at use time."""

    kind: str

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")

    def x_range(self, n: int) -> tuple[float, float]:
        edge = n ** (-1.0 / 6.0) if n >= 1 else 1.0
        if self.kind == "full":
            return 0.0, math.inf
        if self.kind == "low":
            return 0.0, edge
        if self.kind == "high":
            return 1.0 / edge, math.inf
        return edge, 1.0 / edge

    def t_range(self, n: int) -> tuple[float, float]:
        span = math.pi * math.sqrt(n)
        if self.kind == "full":
            return 0.0, span
        alpha = alpha_shift(n)
        if self.kind == "low":
            return 0.0, alpha
        if self.kind == "high":
            return span - alpha, span
        return alpha, span - alpha


FULL_AXIS = IntervalSpec("full")
LOW_INTERVAL = IntervalSpec("low")
HIGH_INTERVAL = IntervalSpec("high")
MAIN_INTERVAL = IntervalSpec("main")


def _coerce_interval(interval) -> IntervalSpec:
    if isinstance(interval, IntervalSpec):
        return interval
    return IntervalSpec(str(interval))


def _conditional_dip_sd(step: float) -> float:
    """Sd of the in-cell midpoint around its conditional mean for the limiting
    unit kernel e^(-tau^2/4); the clearance thresholds scale from this."""
    r_half = math.exp(-0.25 * (step / 2.0) ** 2)
    r_full = math.exp(-0.25 * step * step)
    var = 1.0 - 2.0 * r_half * r_half / (1.0 + r_full)
    return math.sqrt(max(var, 0.0))


def _clearance(step: float) -> float:
    return _DIP_GUARD * _conditional_dip_sd(step)


class _SignScanner:
    """Precomputed normalized weight rows over a t-grid for one (n, interval).

    classify() maps a batch of coefficient vectors to verdicts
    -1 (certifiably nonpositive somewhere), +1 (positive with clearance,
    restricted intervals only), 0 (needs per-sample work).
    """

    REJECT = -1
    ACCEPT = 1
    ESCALATE = 0

    def __init__(self, n: int, interval: IntervalSpec, step: float = 0.25):
        if n < 1:
            raise ValueError("scanner requires n >= 1")
        if not 0.0 < step <= 0.25:
            raise ValueError("step must lie in (0, 0.25]")
        self.n = n
        self.interval = interval
        self.step = step
        self.unresolved = 0

        span = math.pi * math.sqrt(n)
        t_lo, t_hi = interval.t_range(n)
        self.degenerate = t_hi <= t_lo
        self.left_limit = interval.kind in ("full", "low")  # f(0+) -> a_0
        self.right_limit = interval.kind in ("full", "high")  # sign a_n at inf
        if self.degenerate:
            return

        ts = [t_lo + step * k for k in range(int((t_hi - t_lo) / step + 1e-9) + 1)]
        if t_hi - ts[-1] > 1e-9 * max(1.0, t_hi):
            ts.append(t_hi)
        ts = [t for t in ts if 1e-12 < t < span * (1.0 - 1e-15)]
        self.ts = np.array(ts)
        self.xs = np.array([transform_x(t, n) for t in ts])
        # padded t sequence including the limit pseudo-points, for cell checks;
        # rows and pad entries stay in one-to-one order with classify()'s u_pad
        pad = list(ts)
        if self.left_limit:
            pad = [t_lo] + pad
        if self.right_limit:
            pad = pad + [t_hi]
        self.t_pad = np.array(pad)

        logw = log_binomial_row(n)
        i = np.arange(n + 1, dtype=float)
        rows = len(self.xs)
        self._cache_rows = rows * (n + 1) <= _W_CACHE_ELEMENTS
        self._w = None
        self.row_mass = np.empty(rows)  # sum of weights, noise scale
        self.inv_sd = np.empty(rows)  # 1 / sqrt(M(x)) in normalized units
        blocks = [] if self._cache_rows else None
        block = []
        for j, x in enumerate(self.xs):
            lt = logw + i * math.log(x)
            m = float(lt.max())
            w = np.exp(lt - m)
            self.row_mass[j] = w.sum()
            self.inv_sd[j] = math.exp(m - 0.5 * mn_exact(n, float(x)).log_abs)
            if self._cache_rows:
                block.append(w)
        if self._cache_rows:
            self._w = np.array(block)
        self.tau = _NOISE_REL * self.row_mass
        self.kappa = _clearance(step)

    # -- batched classification --

    def _values(self, a: np.ndarray) -> np.ndarray:
        """Raw grid values W @ a for a batch (n+1, B)."""
        if self._w is not None:
            return self._w @ a
        logw = log_binomial_row(self.n)
        i = np.arange(self.n + 1, dtype=float)
        out = np.empty((len(self.xs), a.shape[1]))
        for j, x in enumerate(self.xs):
            lt = logw + i * math.log(x)
            w = np.exp(lt - lt.max())
            out[j] = w @ a
        return out

    def classify(self, a: np.ndarray) -> tuple[np.ndarray, np.ndarray | None]:
        """Verdicts for a batch of coefficient columns, plus the padded
        normalized value matrix (None when the interval is degenerate)."""
        b = a.shape[1]
        if self.degenerate:
            return np.full(b, self.ACCEPT, dtype=np.int8), None
        v = self._values(a)
        u = v * self.inv_sd[:, None]
        negdef = (v < -self.tau[:, None]).any(axis=0)
        ambig = (np.abs(v) <= self.tau[:, None]).any(axis=0)

        u_parts = [u]
        if self.left_limit:
            left = a[0]
            negdef |= left < 0.0
            ambig |= left == 0.0
            u_parts.insert(0, left[None, :])
        if self.right_limit:
            right = a[-1]
            negdef |= right < 0.0
            ambig |= right == 0.0
            u_parts.append(right[None, :])
        u_pad = np.vstack(u_parts) if len(u_parts) > 1 else u

        verdicts = np.full(b, self.ESCALATE, dtype=np.int8)
        verdicts[negdef] = self.REJECT
        if self.interval.kind != "full":
            cleared = (
                np.minimum(u_pad[:-1], u_pad[1:]) >= self.kappa
            ).all(axis=0)
            verdicts[cleared & ~negdef & ~ambig] = self.ACCEPT
        return verdicts, u_pad

    # -- per-sample resolution for restricted intervals --

    def _u_at(self, p: BinomialPolynomial, t: float) -> float:
        span = math.pi * math.sqrt(self.n)
        if t <= 1e-12:
            return float(p.coefficients[0])
        if t >= span * (1.0 - 1e-15):
            return float(p.coefficients[-1])
        x = transform_x(t, self.n)
        v = eval_f(p, x)
        if v.sign == 0:
            return 0.0
        return v.sign * math.exp(v.log_abs - 0.5 * mn_exact(self.n, x).log_abs)

    def _certify(self, p, t0, t1, u0, u1, depth) -> bool | None:
        if u0 < -_AMBIG_NORMALIZED or u1 < -_AMBIG_NORMALIZED:
            return False
        if abs(u0) <= _AMBIG_NORMALIZED or abs(u1) <= _AMBIG_NORMALIZED:
            return None
        if min(u0, u1) >= _clearance(t1 - t0):
            return True
        if depth <= 0:
            return None
        tm = 0.5 * (t0 + t1)
        um = self._u_at(p, tm)
        left = self._certify(p, t0, tm, u0, um, depth - 1)
        if left is False:
            return False
        right = self._certify(p, tm, t1, um, u1, depth - 1)
        if right is False:
            return False
        if left is None or right is None:
            return None
        return True

    def _exact_positive(self, p: BinomialPolynomial) -> bool:
        dp = DyadicPolynomial.from_binomial(p)
        if dp.is_zero():
            return False
        x_lo, x_hi = self.interval.x_range(self.n)
        lo = None if self.interval.kind == "low" else Fraction(x_lo)
        hi = None if self.interval.kind == "high" else Fraction(x_hi)
        if count_roots_in(dp, lo, hi) != 0:
            return False
        if self.interval.kind == "low":
            probe = Fraction(x_hi) / 2
        elif self.interval.kind == "high":
            probe = Fraction(x_lo) * 2
        else:
            probe = (Fraction(x_lo) + Fraction(x_hi)) / 2
        return dp(probe) > 0

    def resolve(self, coeffs: np.ndarray, u_col: np.ndarray) -> bool:
        """Settle one escalated sample: local refinement of every cell, exact
        fallback when refinement cannot certify either way."""
        p = BinomialPolynomial(self.n, coeffs)
        needs_exact = False
        for k in range(len(self.t_pad) - 1):
            got = self._certify(
                p,
                float(self.t_pad[k]),
                float(self.t_pad[k + 1]),
                float(u_col[k]),
                float(u_col[k + 1]),
                _REFINE_DEPTH,
            )
            if got is False:
                return False
            if got is None:
                needs_exact = True
        if not needs_exact:
            return True
        if self.n <= _EXACT_FALLBACK_MAX_DEGREE:
            return self._exact_positive(p)
        self.unresolved += 1
        return False


def _persistence_worker(task) -> tuple[int, int, int]:
    n, kind, step, child_ss, count, batch = task
    rng = np.random.default_rng(child_ss)
    if count == 0:
        return 0, 0, 0
    if n == 0:
        draws = rng.standard_normal((1, count))
        return int(np.count_nonzero(draws[0] > 0.0)), 0, 0
    interval = IntervalSpec(kind)
    scanner = _SignScanner(n, interval, step)
    successes = 0
    escalated = 0
    remaining = count
    full_axis = kind == "full"
    while remaining > 0:
        b = min(batch, remaining)
        remaining -= b
        a = rng.standard_normal((n + 1, b))
        verdicts, u_pad = scanner.classify(a)
        successes += int(np.count_nonzero(verdicts == _SignScanner.ACCEPT))
        for j in np.flatnonzero(verdicts == _SignScanner.ESCALATE):
            escalated += 1
            if full_axis:
                ok = is_persistent(BinomialPolynomial(n, a[:, j]))
            else:
                ok = scanner.resolve(a[:, j], u_pad[:, j])
            successes += int(ok)
    return successes, escalated, scanner.unresolved


def _partition(total: int, workers: int) -> list[int]:
    base, rem = divmod(total, workers)
    return [base + 1 if w < rem else base for w in range(workers)]


def _derive_seed(seed, *tags: int) -> tuple:
    if isinstance(seed, (tuple, list)):
        return tuple(seed) + tags
    return (int(seed),) + tags


def estimate_persistence(
    n: int,
    interval=FULL_AXIS,
    samples: int = 100_000,
    seed=0,
    workers: int = 1,
    step: float = 0.25,
    level: float = 0.95,
    batch: int = _DEFAULT_BATCH,
) -> PersistenceEstimate:
    """Monte Carlo estimate of P(f > 0 on the interval) with a Wilson interval.

    Full-axis decisions are exact; restricted intervals use the guarded grid
    scan (see module docstring).  Deterministic given
    (seed, workers, batch).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    if workers < 1:
        raise ValueError("workers must be positive")
    interval = _coerce_interval(interval)
    children = np.random.SeedSequence(seed).spawn(workers)
    tasks = [
        (n, interval.kind, step, child, cnt, batch)
        for child, cnt in zip(children, _partition(samples, workers))
    ]
    if workers == 1:
        results = [_persistence_worker(tasks[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_persistence_worker, tasks))
    successes = sum(r[0] for r in results)
    return PersistenceEstimate.from_counts(successes, samples, level)


_PILOT_TAG = 0x9111


def auto_budget(
    n: int,
    interval=FULL_AXIS,
    seed=0,
    pilot_samples: int = 1000,
    target_successes: int = 100,
    floor: int | None = None,
    cap: int = 10_000_000,
    workers: int = 1,
    step: float = 0.25,
    pilot_cap: int = 1_000_000,
) -> int:
    """Sample budget ceil(target / p_rough) from a pilot run.

    When the base pilot sees too few hits to gauge the probability, its size
    escalates by decades (up to pilot_cap) until it does; genuinely rare
    events then simply charge the cap, and callers should still check the
    success floor on the final estimate.
    """
    size = pilot_samples
    stage = 0
    while True:
        pilot = estimate_persistence(
            n,
            interval,
            size,
            seed=_derive_seed(seed, _PILOT_TAG, n, stage),
            workers=workers,
            step=step,
        )
        if pilot.successes >= 20 or size >= pilot_cap:
            break
        size = min(size * 10, pilot_cap)
        stage += 1
    p_rough = max(pilot.successes, 1) / size
    budget = math.ceil(target_successes / p_rough)
    if floor is not None:
        budget = max(budget, floor)
    return min(cap, max(budget, pilot_samples))


@dataclass(frozen=True)
class RatioPoint:
    """One point of the normalized ratio sequence -log p_n / (pi sqrt(n))."""

    n: int
    ratio: float
    ci_low: float
    ci_high: float
    estimate: PersistenceEstimate


def ratio_sequence(
    ns: Sequence[int],
    samples: int | None = None,
    seed=0,
    workers: int = 1,
    success_floor: int = 10,
    target_successes: int = 100,
    floor_samples: int | None = None,
    cap: int = 10_000_000,
    step: float = 0.25,
    pilot_cap: int = 1_000_000,
) -> tuple[list[RatioPoint], list[tuple[int, PersistenceEstimate]]]:
    """Full-axis ratio points over increasing n; `samples=None` auto-budgets
    each n.  Undersampled n (below the success floor) are dropped into the
    second return value instead of producing an unstable log."""
    points: list[RatioPoint] = []
    dropped: list[tuple[int, PersistenceEstimate]] = []
    for n in ns:
        budget = samples or auto_budget(
            n,
            FULL_AXIS,
            seed=seed,
            target_successes=target_successes,
            floor=floor_samples,
            cap=cap,
            workers=workers,
            step=step,
            pilot_cap=pilot_cap,
        )
        est = estimate_persistence(
            n, FULL_AXIS, budget, seed=_derive_seed(seed, n), workers=workers, step=step
        )
        if not est.log_usable(success_floor):
            dropped.append((n, est))
            continue
        denom = math.pi * math.sqrt(n)
        points.append(
            RatioPoint(
                n=n,
                ratio=-est.log_p / denom,
                ci_low=-math.log(est.ci_high) / denom,
                ci_high=-math.log(est.ci_low) / denom if est.ci_low > 0 else math.inf,
                estimate=est,
            )
        )
    return points, dropped


@dataclass(frozen=True)
class IntervalReportRow:
    """Normalized edge-interval contribution -log p / sqrt(n)."""

    n: int
    kind: str
    estimate: PersistenceEstimate
    normalized: float | None


def negligible_interval_report(
    ns: Sequence[int],
    samples: int | None = None,
    seed=0,
    workers: int = 1,
    success_floor: int = 10,
    target_successes: int = 100,
    cap: int = 2_000_000,
    step: float = 0.25,
    pilot_cap: int = 1_000_000,
) -> list[IntervalReportRow]:
    """Low- and high-interval persistence, normalized by sqrt(n).

    The two intervals have equal probability in law (coefficient reversal),
    which the report exposes by estimating both independently.
    """
    rows: list[IntervalReportRow] = []
    for n in ns:
        for kind in ("low", "high"):
            interval = IntervalSpec(kind)
            budget = samples or auto_budget(
                n,
                interval,
                seed=_derive_seed(seed, 1 if kind == "low" else 2),
                target_successes=target_successes,
                cap=cap,
                workers=workers,
                step=step,
                pilot_cap=pilot_cap,
            )
            est = estimate_persistence(
                n,
                interval,
                budget,
                seed=_derive_seed(seed, n, 1 if kind == "low" else 2),
                workers=workers,
                step=step,
            )
            normalized = (
                -est.log_p / math.sqrt(n) if est.log_usable(success_floor) else None
            )
            rows.append(IntervalReportRow(n, kind, est, normalized))
    return rows


@dataclass(frozen=True)
class AutocorrGapRow:
    """sup over window offsets of the autocorrelation limit gap at one lag."""

    n: int
    lag: float
    sup_gap: float


def autocorr_convergence_report(
    ns: Sequence[int],
    lags: Sequence[float] = (0.5, 1.0, 2.0, 3.0),
    offsets: Sequence[float] = (0.05, 0.2, 0.35, 0.5),
) -> list[AutocorrGapRow]:
    """Uniform-convergence diagnostic of the finite-n autocorrelation toward
    the limiting kernel, sampled over window offsets."""
    rows: list[AutocorrGapRow] = []
    for n in ns:
        width = main_window_width(n)
        for lag in lags:
            us = [o * width for o in offsets if o * width + lag <= width]
            if not us:
                continue
            sup_gap = max(autocorr_limit_gap(n, u, u + lag) for u in us)
            rows.append(AutocorrGapRow(n, float(lag), sup_gap))
    return rows
