"""Random multi-player two-strategy games: replicator payoffs and the exact
correspondence between internal equilibria and positive polynomial roots.

An internal rest point of the replicator dynamics at population fraction
y in (0, 1) satisfies equal average payoffs; under x = y / (1 - y) that is a
positive root of sum_k (a_k - b_k) C(n-1, k) x^k, which the exact counter
from `roots` decides with no floating error.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .roots import (
    DyadicPolynomial,
    count_positive_roots,
    locate_positive_roots,
    no_positive_roots,
)
from .stats import PersistenceEstimate

__all__ = [
    "GamePayoffs",
    "EquilibriumSet",
    "payoff_A",
    "payoff_B",
    "replicator_rhs",
    "equilibrium_polynomial",
    "internal_equilibria",
    "prob_no_internal_equilibria",
    "sample_records",
]


@dataclass(frozen=True)
class GamePayoffs:
    """Payoff tables of a symmetric game in groups of `players` individuals.

    a[k] (resp. b[k]) is the payoff of an A-strategist (resp. B) whose group
    contains k other A-strategists, k = 0..players-1.
    """

    players: int
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        if self.players < 2:
            raise ValueError("need at least 2 players")
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        for name, arr in (("a", a), ("b", b)):
            if arr.shape != (self.players,):
                raise ValueError(
                    f"payoff table {name} needs length {self.players}, got {arr.shape}"
                )
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"payoff table {name} must be finite")

    @property
    def beta(self) -> np.ndarray:
        """Payoff differences a_k - b_k; the only thing equilibria depend on."""
        return self.a - self.b

    @classmethod
    def from_differences(cls, beta) -> "GamePayoffs":
        beta = np.asarray(beta, dtype=float)
        return cls(len(beta), beta, np.zeros(len(beta)))


def _bernstein(coeffs: np.ndarray, y: float) -> float:
    """De Casteljau evaluation of sum_k c_k C(m,k) y^k (1-y)^(m-k): stable
    convex combinations, exact at y = 0 and y = 1."""
    v = np.array(coeffs, dtype=float)
    while len(v) > 1:
        v = v[:-1] * (1.0 - y) + v[1:] * y
    return float(v[0])


def _check_fraction(y: float) -> None:
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"population fraction must lie in [0, 1], got {y!r}")


def payoff_A(game: GamePayoffs, y: float) -> float:
    """Average payoff of strategy A at A-frequency y."""
    _check_fraction(y)
    return _bernstein(game.a, y)


def payoff_B(game: GamePayoffs, y: float) -> float:
    """Average payoff of strategy B at A-frequency y."""
    _check_fraction(y)
    return _bernstein(game.b, y)


def replicator_rhs(game: GamePayoffs, y: float) -> float:
    """Selection dynamic y' = y (1-y) (payoff_A - payoff_B); exactly zero at
    the boundary rest points y = 0, 1."""
    _check_fraction(y)
    if y == 0.0 or y == 1.0:
        return 0.0
    return y * (1.0 - y) * _bernstein(game.beta, y)


def equilibrium_polynomial(game: GamePayoffs) -> DyadicPolynomial:
    """sum_k (a_k - b_k) C(players-1, k) x^k with exact dyadic coefficients."""
    m = game.players - 1
    beta = game.beta
    return DyadicPolynomial(
        tuple(Fraction(float(beta[k])) * math.comb(m, k) for k in range(m + 1))
    )


@dataclass(frozen=True)
class EquilibriumSet:
    """Distinct internal equilibria in (0, 1), sorted increasing.

    `degenerate` marks the identically-zero payoff difference, where every
    mixture is a rest point and no discrete set exists.
    """

    internal: tuple[float, ...]
    count: int
    degenerate: bool = False


def internal_equilibria(game: GamePayoffs, tol: float = 1e-12) -> EquilibriumSet:
    """Locate the internal equilibria through the positive-root correspondence.

    Roots of the associated polynomial are isolated exactly, bisected to tol
    in the x coordinate, and mapped back by y = x / (1 + x); the count always
    matches the exact variation count.
    """
    q = equilibrium_polynomial(game)
    if q.is_zero():
        return EquilibriumSet((), 0, degenerate=True)
    xs = locate_positive_roots(q, tol)
    ys = tuple(x / (1.0 + x) for x in xs)
    return EquilibriumSet(ys, len(ys), degenerate=False)


def _no_equilibria_worker(task) -> int:
    players, child_ss, count = task
    rng = np.random.default_rng(child_ss)
    m = players - 1
    weights = [math.comb(m, k) for k in range(m + 1)]
    zero_count = 0
    for _ in range(count):
        beta = rng.standard_normal(m + 1)
        q = DyadicPolynomial(
            tuple(Fraction(float(beta[k])) * weights[k] for k in range(m + 1))
        )
        # a degenerate all-zero difference makes every mixture a rest point,
        # so it does not belong to the no-equilibrium event
        zero_count += (not q.is_zero()) and no_positive_roots(q)
    return zero_count


def prob_no_internal_equilibria(
    players: int,
    samples: int,
    seed=0,
    workers: int = 1,
    beta_sampler: Callable[[np.random.Generator, int], np.ndarray] | None = None,
    level: float = 0.95,
) -> PersistenceEstimate:
    """Fraction of random games with no internal equilibrium.

    Payoff differences are i.i.d. standard normal (the built-in model); a
    custom `beta_sampler(rng, size) -> differences` hook is accepted for
    experimentation but none others ship.  Per sample the event is exactly
    {zero positive roots of the associated polynomial}.
    """
    if players < 2:
        raise ValueError("need at least 2 players")
    if samples < 1:
        raise ValueError("samples must be positive")
    children = np.random.SeedSequence(seed).spawn(max(workers, 1))
    counts = _partition_counts(samples, max(workers, 1))
    if beta_sampler is not None:
        # custom sampling runs inline; the hook is not assumed picklable
        rng = np.random.default_rng(children[0])
        zero_count = 0
        for _ in range(samples):
            beta = np.asarray(beta_sampler(rng, players), dtype=float)
            game = GamePayoffs.from_differences(beta)
            q = equilibrium_polynomial(game)
            zero_count += (not q.is_zero()) and count_positive_roots(q).count == 0
        return PersistenceEstimate.from_counts(zero_count, samples, level)
    tasks = [
        (players, child, cnt) for child, cnt in zip(children, counts) if cnt > 0
    ]
    if len(tasks) == 1:
        results = [_no_equilibria_worker(tasks[0])]
    else:
        with ProcessPoolExecutor(max_workers=len(tasks)) as pool:
            results = list(pool.map(_no_equilibria_worker, tasks))
    return PersistenceEstimate.from_counts(sum(results), samples, level)


def sample_records(
    players: int, samples: int, seed=0, tol: float = 1e-12
) -> list[tuple[int, int, tuple[float, ...]]]:
    """Per-game records (sample_id, equilibria count, y-values) for random
    games with standard-normal payoff differences; single deterministic
    stream."""
    if players < 2:
        raise ValueError("need at least 2 players")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    out = []
    for sample_id in range(samples):
        game = GamePayoffs.from_differences(rng.standard_normal(players))
        eq = internal_equilibria(game, tol)
        out.append((sample_id, eq.count, eq.internal))
    return out


def _partition_counts(total: int, workers: int) -> list[int]:
    base, rem = divmod(total, workers)
    return [base + 1 if w < rem else base for w in range(workers)]
