"""Smooth stationary Gaussian process with squared-exponential correlation.

Two independent samplers: a truncated random-series construction whose
untruncated covariance is exactly exp(-(t-u)^2 / (2 s^2)), and a dense
covariance factorization used as a cross-check.  On top of them: survival
probability estimates P(min over the grid > 0) and the exponential-decay fit
extracting the persistence exponent b from log p(T) ~ -b T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln, pdtrc

from .stats import PersistenceEstimate

__all__ = [
    "GaussianKernel",
    "DEFAULT_KERNEL",
    "HALF_TIME_KERNEL",
    "PathGrid",
    "FactorizationError",
    "SERIES_TAIL_TOL",
    "series_tail_bound",
    "required_truncation",
    "sample_path_series",
    "sample_paths_series",
    "sample_path_factor",
    "sample_paths_factor",
    "cholesky_with_escalation",
    "estimate_survival",
    "ExponentFit",
    "fit_exponent",
    "estimate_exponent",
]

SERIES_TAIL_TOL = 1e-12
MAX_JITTER = 1e-8


@dataclass(frozen=True)
class GaussianKernel:
    """R(t) = exp(-t^2 / (2 s^2)); the scale s = sqrt(2) gives R(t) = e^(-t^2/4).

    R(0) = 1, R is positive and nonincreasing on [0, inf), so it belongs to
    the nonnegative-autocorrelation class the exponent theory requires.
    """

    scale: float

    def __post_init__(self) -> None:
        if not (self.scale > 0.0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be positive and finite, got {self.scale!r}")

    def corr(self, tau):
        tau = np.asarray(tau, dtype=float)
        return np.exp(-(tau * tau) / (2.0 * self.scale * self.scale))


DEFAULT_KERNEL = GaussianKernel(math.sqrt(2.0))  # e^{-t^2/4}
HALF_TIME_KERNEL = GaussianKernel(1.0)  # e^{-t^2/2}, for the time-change check


def grid_times(horizon: float, step: float) -> np.ndarray:
    """Grid 0, step, ..., with floor(horizon/step)+1 points."""
    if not (horizon > 0.0 and step > 0.0):
        raise ValueError("horizon and step must be positive")
    npts = int(math.floor(horizon / step + 1e-9)) + 1
    return step * np.arange(npts)


@dataclass(frozen=True)
class PathGrid:
    """One sampled path on the grid 0, step, ..., floor(horizon/step)*step."""

    horizon: float
    step: float
    values: np.ndarray

    def __post_init__(self) -> None:
        expected = int(math.floor(self.horizon / self.step + 1e-9)) + 1
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.shape != (expected,):
            raise ValueError(
                f"grid of horizon {self.horizon} and step {self.step} needs "
                f"{expected} values, got shape {values.shape}"
            )


class FactorizationError(RuntimeError):
    """Covariance factorization failure; carries the jitter that was tried."""

    def __init__(self, jitter: float, message: str):
        super().__init__(message)
        self.jitter = jitter


def series_tail_bound(kernel: GaussianKernel, horizon: float, truncation: int) -> float:
    """sup over t <= horizon of the truncated-tail variance of the series.

    The tail equals the upper Poisson tail P(X > K) at rate (T/s)^2, which is
    monotone in t, so the supremum sits at t = horizon.
    """
    if truncation < 0:
        raise ValueError("truncation must be nonnegative")
    y = (horizon / kernel.scale) ** 2
    return float(pdtrc(truncation, y))


def required_truncation(
    kernel: GaussianKernel, horizon: float, tol: float = SERIES_TAIL_TOL
) -> int:
    """Smallest K whose tail bound is below tol; K ~ (T/s)^2 + O(T/s)."""
    k = max(0, int((horizon / kernel.scale) ** 2))
    while series_tail_bound(kernel, horizon, k) >= tol:
        k += 1
    return k


def _design_matrix(
    kernel: GaussianKernel, times: np.ndarray, truncation: int
) -> np.ndarray:
    """Phi[j, k] = e^(-t_j^2/(2 s^2)) (t_j/s)^k / sqrt(k!)."""
    u = times / kernel.scale
    k = np.arange(truncation + 1, dtype=float)
    log_u = np.where(u > 0, np.log(np.where(u > 0, u, 1.0)), -np.inf)
    with np.errstate(invalid="ignore"):
        log_phi = (
            k[None, :] * log_u[:, None]
            - 0.5 * gammaln(k + 1.0)[None, :]
            - 0.5 * (u * u)[:, None]
        )
        phi = np.exp(log_phi)
    phi[u == 0.0, :] = 0.0
    phi[u == 0.0, 0] = 1.0
    return phi


def sample_paths_series(
    kernel: GaussianKernel,
    horizon: float,
    step: float,
    truncation: int,
    rng: np.random.Generator,
    n_paths: int,
) -> np.ndarray:
    """(n_paths, grid) matrix of series-construction paths.

    Z(t) = e^(-t^2/(2 s^2)) sum_{k<=K} xi_k (t/s)^k / sqrt(k!) with i.i.d.
    standard normal xi_k; the untruncated series has covariance exactly
    exp(-(t-u)^2/(2 s^2)).  K must satisfy the 1e-12 tail bound.
    """
    tail = series_tail_bound(kernel, horizon, truncation)
    if tail >= SERIES_TAIL_TOL:
        raise ValueError(
            f"truncation {truncation} leaves tail variance {tail:.3e} "
            f">= {SERIES_TAIL_TOL} at horizon {horizon}"
        )
    times = grid_times(horizon, step)
    phi = _design_matrix(kernel, times, truncation)
    xi = rng.standard_normal((truncation + 1, n_paths))
    return (phi @ xi).T


def sample_path_series(
    kernel: GaussianKernel,
    horizon: float,
    step: float,
    truncation: int,
    rng: np.random.Generator,
) -> PathGrid:
    values = sample_paths_series(kernel, horizon, step, truncation, rng, 1)[0]
    return PathGrid(horizon, step, values)


def _cholesky(kernel: GaussianKernel, times: np.ndarray, jitter: float) -> np.ndarray:
    cov = kernel.corr(times[:, None] - times[None, :])
    cov = cov + jitter * np.eye(len(times))
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(
            jitter, f"covariance factorization failed at jitter {jitter:.1e}"
        ) from exc


def cholesky_with_escalation(
    kernel: GaussianKernel,
    times: np.ndarray,
    jitter: float = 1e-12,
    max_jitter: float = MAX_JITTER,
) -> tuple[np.ndarray, float]:
    """Cholesky factor with jitter escalated by decades up to max_jitter."""
    j = jitter
    while True:
        try:
            return _cholesky(kernel, times, j), j
        except FactorizationError:
            if j >= max_jitter:
                raise
            j = min(j * 10.0, max_jitter)


def sample_paths_factor(
    kernel: GaussianKernel,
    horizon: float,
    step: float,
    jitter: float,
    rng: np.random.Generator,
    n_paths: int,
) -> np.ndarray:
    """(n_paths, grid) matrix of factorization-sampler paths.

    Raises FactorizationError (reporting the attempted jitter) when the
    jittered covariance is not numerically positive definite.
    """
    times = grid_times(horizon, step)
    chol = _cholesky(kernel, times, jitter)
    z = rng.standard_normal((len(times), n_paths))
    return (chol @ z).T


def sample_path_factor(
    kernel: GaussianKernel,
    horizon: float,
    step: float,
    jitter: float,
    rng: np.random.Generator,
) -> PathGrid:
    values = sample_paths_factor(kernel, horizon, step, jitter, rng, 1)[0]
    return PathGrid(horizon, step, values)


def estimate_survival(
    kernel: GaussianKernel,
    horizon: float,
    step: float,
    samples: int,
    rng,
    method: str = "series",
    truncation: int | None = None,
    jitter: float = 1e-12,
    block: int = 20_000,
    level: float = 0.95,
) -> PersistenceEstimate:
    """P(min over the grid > 0) with a Wilson interval.

    The step must resolve the unit correlation scale (step <= 0.25) and at
    least 10^3 paths are required.  Discretization is monitored externally by
    halving the step and comparing.
    """
    if step > 0.25 + 1e-12:
        raise ValueError(f"step {step!r} too coarse; need step <= 0.25")
    if samples < 1000:
        raise ValueError("need at least 1000 paths")
    if method not in ("series", "factor"):
        raise ValueError(f"unknown method {method!r}")
    rng = np.random.default_rng(rng)
    times = grid_times(horizon, step)
    if method == "series":
        if truncation is None:
            truncation = required_truncation(kernel, horizon)
        tail = series_tail_bound(kernel, horizon, truncation)
        if tail >= SERIES_TAIL_TOL:
            raise ValueError(
                f"truncation {truncation} leaves tail variance {tail:.3e}"
            )
        phi = _design_matrix(kernel, times, truncation)
        draw_rows = truncation + 1
        factor = phi
    else:
        factor, _ = cholesky_with_escalation(kernel, times, jitter)
        draw_rows = len(times)

    successes = 0
    remaining = samples
    while remaining > 0:
        b = min(block, remaining)
        remaining -= b
        z = rng.standard_normal((draw_rows, b))
        paths = factor @ z  # (grid, b)
        successes += int(np.count_nonzero(paths.min(axis=0) > 0.0))
    return PersistenceEstimate.from_counts(successes, samples, level)


@dataclass(frozen=True)
class ExponentFit:
    """Weighted-least-squares decay rate of log p(T) against T.

    b_hat is minus the fitted slope; stderr comes from the weighted normal
    equations with the supplied per-point variances.
    """

    b_hat: float
    intercept: float
    stderr: float
    points: tuple[tuple[float, float, float], ...]  # (T, log p, stderr of log p)


def fit_exponent(
    points: Sequence[tuple[float, float, float]], t_min: float = 3.0
) -> ExponentFit:
    """Fit log p(T) = intercept - b T by inverse-variance weighted least squares.

    Points with T < t_min are skimmed off as pre-asymptotic; at least 4 usable
    points are required.
    """
    usable = [(float(t), float(lp), float(se)) for t, lp, se in points if t >= t_min]
    if len(usable) < 4:
        raise ValueError(
            f"need at least 4 usable points with T >= {t_min}, got {len(usable)}"
        )
    t = np.array([u[0] for u in usable])
    y = np.array([u[1] for u in usable])
    se = np.array([u[2] for u in usable])
    w = 1.0 / np.square(np.maximum(se, 1e-12))
    # 2x2 weighted normal equations
    s0 = float(np.sum(w))
    s1 = float(np.sum(w * t))
    s2 = float(np.sum(w * t * t))
    r0 = float(np.sum(w * y))
    r1 = float(np.sum(w * t * y))
    det = s0 * s2 - s1 * s1
    if det <= 0:
        raise ValueError("degenerate design; distinct T values are required")
    intercept = (s2 * r0 - s1 * r1) / det
    slope = (s0 * r1 - s1 * r0) / det
    slope_var = s0 / det
    return ExponentFit(-slope, intercept, math.sqrt(slope_var), tuple(usable))


def estimate_exponent(
    kernel: GaussianKernel,
    horizons: Sequence[float],
    step: float,
    samples: int,
    seed,
    method: str = "series",
    t_min: float = 3.0,
    success_floor: int = 10,
    level: float = 0.95,
) -> tuple[ExponentFit, list[tuple[float, PersistenceEstimate]]]:
    """Survival estimates over the horizons (one independent substream each)
    and the exponent fit through the usable ones."""
    ss = np.random.SeedSequence(seed)
    children = ss.spawn(len(horizons))
    estimates: list[tuple[float, PersistenceEstimate]] = []
    points: list[tuple[float, float, float]] = []
    for horizon, child in zip(horizons, children):
        est = estimate_survival(
            kernel,
            horizon,
            step,
            samples,
            np.random.default_rng(child),
            method=method,
            level=level,
        )
        estimates.append((float(horizon), est))
        if est.log_usable(success_floor):
            points.append((float(horizon), est.log_p, est.log_p_stderr))
    fit = fit_exponent(points, t_min=t_min)
    return fit, estimates
