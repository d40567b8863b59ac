"""Core data types shared by the whole package.

Populations are thin wrappers around numpy arrays (decision matrix,
objective matrix, evaluated mask).  All operations treat populations as
immutable values: the backing arrays are marked read-only and every
transformation returns a new Population.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np


class TemofError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(TemofError):
    """Invalid setup: bad bounds, dimensions, budgets, or parameter ranges."""


class UsageError(TemofError):
    """An operation was called on inputs that violate its preconditions."""


class EvaluationError(TemofError):
    """A problem evaluator returned non-finite objective values."""


class UnsupportedError(TemofError):
    """The requested feature is not available for this configuration."""


# ---------------------------------------------------------------------------
# Seeded random streams
# ---------------------------------------------------------------------------

def rng_stream(master_seed: int, run_key: int, purpose: str) -> np.random.Generator:
    """Independent generator for a (master seed, run, purpose) triple.

    The purpose string is hashed with crc32, so every named consumer of
    randomness (initialization, the stage gate, variation, niching, ...)
    gets its own substream.  Reordering or parallelizing runs can never
    change the numbers any single run sees.
    """
    if not isinstance(master_seed, (int, np.integer)):
        raise ConfigurationError(f"master_seed must be an int, got {type(master_seed).__name__}")
    if not isinstance(run_key, (int, np.integer)):
        raise ConfigurationError(f"run_key must be an int, got {type(run_key).__name__}")
    seq = np.random.SeedSequence(
        [int(master_seed) & 0xFFFFFFFFFFFFFFFF, int(run_key) & 0xFFFFFFFFFFFFFFFF,
         zlib.crc32(purpose.encode("utf-8"))]
    )
    return np.random.default_rng(seq)


@dataclass(frozen=True)
class RngKey:
    """Identity of one run for the purpose of deriving random streams."""

    master_seed: int
    run_key: int = 0

    def stream(self, purpose: str) -> np.random.Generator:
        return rng_stream(self.master_seed, self.run_key, purpose)


def as_rng_key(seed: "RngKey | int") -> RngKey:
    if isinstance(seed, RngKey):
        return seed
    return RngKey(int(seed))


# ---------------------------------------------------------------------------
# Problems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProblemSpec:
    """A box-constrained minimization problem with a batch evaluator.

    evaluator maps a (k, n_var) array to a (k, n_obj) array.  An optional
    front_sampler(count) returns `count` points from the true Pareto front.
    """

    name: str
    n_var: int
    n_obj: int
    lower: np.ndarray
    upper: np.ndarray
    evaluator: Callable[[np.ndarray], np.ndarray]
    front_sampler: Callable[[int], np.ndarray] | None = None

    def __post_init__(self) -> None:
        if self.n_var < 1 or self.n_obj < 1:
            raise ConfigurationError(
                f"{self.name}: n_var and n_obj must be >= 1, got {self.n_var}, {self.n_obj}")
        lower = np.asarray(self.lower, dtype=float).reshape(-1)
        upper = np.asarray(self.upper, dtype=float).reshape(-1)
        if lower.shape != (self.n_var,) or upper.shape != (self.n_var,):
            raise ConfigurationError(
                f"{self.name}: bounds must have shape ({self.n_var},), "
                f"got {lower.shape} and {upper.shape}")
        if not np.all(lower < upper):
            bad = int(np.argmax(~(lower < upper)))
            raise ConfigurationError(
                f"{self.name}: lower bound must be strictly below upper bound "
                f"(variable {bad}: {lower[bad]} >= {upper[bad]})")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    def evaluate_batch(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.n_var:
            raise UsageError(
                f"{self.name}: expected decision vectors of length {self.n_var}, "
                f"got shape {x.shape}")
        f = np.asarray(self.evaluator(x), dtype=float)
        if f.shape != (x.shape[0], self.n_obj):
            raise EvaluationError(
                f"{self.name}: evaluator returned shape {f.shape}, "
                f"expected {(x.shape[0], self.n_obj)}")
        bad = ~np.isfinite(f).all(axis=1)
        if bad.any():
            i = int(np.argmax(bad))
            raise EvaluationError(
                f"{self.name}: non-finite objectives {f[i]} for input {x[i]}")
        return f

    def evaluate_one(self, x: np.ndarray) -> np.ndarray:
        return self.evaluate_batch(np.asarray(x, dtype=float)[None, :])[0]

    def true_front(self, count: int) -> np.ndarray:
        if self.front_sampler is None:
            raise UnsupportedError(f"{self.name}: no true-front sampler available")
        if count < 1:
            raise UsageError(f"front sample count must be >= 1, got {count}")
        front = np.asarray(self.front_sampler(count), dtype=float)
        return front


# ---------------------------------------------------------------------------
# Evaluation budget
# ---------------------------------------------------------------------------

@dataclass
class RunBudget:
    """Counts function evaluations against a cap.

    The cap is advisory: charge() never raises, callers check within_budget.
    The main loops test the budget before generating offspring, so the final
    count may exceed max_fes by at most one batch.
    """

    max_fes: int
    fes: int = 0

    def __post_init__(self) -> None:
        if self.max_fes < 1:
            raise ConfigurationError(f"max_fes must be >= 1, got {self.max_fes}")

    def charge(self, count: int) -> None:
        if count < 0:
            raise UsageError(f"cannot charge a negative evaluation count ({count})")
        self.fes += count

    @property
    def within_budget(self) -> bool:
        return self.fes <= self.max_fes


# ---------------------------------------------------------------------------
# Individuals and populations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Individual:
    """Read-only view of one population member."""

    decision: np.ndarray
    objectives: np.ndarray | None

    @property
    def evaluated(self) -> bool:
        return self.objectives is not None


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.flags.writeable = False
    return a


class Population:
    """Fixed-size collection of decision vectors with optional objectives.

    x has shape (n, n_var), f has shape (n, n_obj).  Rows of f whose
    evaluated flag is False hold NaN placeholders.
    """

    __slots__ = ("x", "f", "evaluated")

    def __init__(self, x: np.ndarray, f: np.ndarray | None = None, *,
                 n_obj: int | None = None, evaluated: np.ndarray | None = None):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.ndim != 2:
            raise UsageError(f"decision matrix must be 2-D, got shape {x.shape}")
        n = x.shape[0]
        if f is None:
            if n_obj is None:
                raise UsageError("either objectives or n_obj must be provided")
            f = np.full((n, n_obj), np.nan)
            mask = np.zeros(n, dtype=bool)
        else:
            f = np.atleast_2d(np.asarray(f, dtype=float))
            if f.shape[0] != n:
                raise UsageError(
                    f"objective matrix has {f.shape[0]} rows for {n} individuals")
            mask = np.ones(n, dtype=bool) if evaluated is None \
                else np.asarray(evaluated, dtype=bool).copy()
            if mask.shape != (n,):
                raise UsageError(f"evaluated mask must have shape ({n},)")
        self.x = _readonly(x)
        self.f = _readonly(f)
        mask.flags.writeable = False
        self.evaluated = mask

    @classmethod
    def unevaluated(cls, x: np.ndarray, n_obj: int) -> "Population":
        return cls(x, n_obj=n_obj)

    @property
    def n_var(self) -> int:
        return self.x.shape[1]

    @property
    def n_obj(self) -> int:
        return self.f.shape[1]

    @property
    def all_evaluated(self) -> bool:
        return bool(self.evaluated.all())

    @property
    def objectives(self) -> np.ndarray:
        """Objective matrix; usage error if any member is unevaluated."""
        if not self.all_evaluated:
            raise UsageError("population contains unevaluated members")
        return self.f

    def __len__(self) -> int:
        return self.x.shape[0]

    def __getitem__(self, i: int) -> Individual:
        obj = self.f[i] if self.evaluated[i] else None
        return Individual(self.x[i], obj)

    def __iter__(self) -> Iterator[Individual]:
        return (self[i] for i in range(len(self)))

    def take(self, indices) -> "Population":
        idx = np.asarray(indices, dtype=int)
        return Population(self.x[idx], self.f[idx], evaluated=self.evaluated[idx])

    def __repr__(self) -> str:
        done = int(self.evaluated.sum())
        return f"Population(n={len(self)}, n_var={self.n_var}, evaluated={done}/{len(self)})"


def concat(*populations: Population) -> Population:
    """Stack populations; dimensions must agree."""
    if not populations:
        raise UsageError("concat needs at least one population")
    n_var = populations[0].n_var
    n_obj = populations[0].n_obj
    for p in populations[1:]:
        if p.n_var != n_var or p.n_obj != n_obj:
            raise ConfigurationError(
                f"cannot concat populations with shapes ({n_var},{n_obj}) and "
                f"({p.n_var},{p.n_obj})")
    x = np.vstack([p.x for p in populations])
    f = np.vstack([p.f for p in populations])
    mask = np.concatenate([p.evaluated for p in populations])
    return Population(x, f, evaluated=mask)


def merge_dedupe(a: Population, b: Population) -> Population:
    """Union of two populations with exact duplicate decision vectors dropped.

    Duplicates are detected by bitwise equality of the decision vector; the
    first occurrence wins (all of `a` first, then `b`).
    """
    if a.n_var != b.n_var or a.n_obj != b.n_obj:
        raise ConfigurationError(
            f"cannot merge populations with shapes ({a.n_var},{a.n_obj}) and "
            f"({b.n_var},{b.n_obj})")
    seen: set[bytes] = set()
    keep_a: list[int] = []
    keep_b: list[int] = []
    for i in range(len(a)):
        key = a.x[i].tobytes()
        if key not in seen:
            seen.add(key)
            keep_a.append(i)
    for i in range(len(b)):
        key = b.x[i].tobytes()
        if key not in seen:
            seen.add(key)
            keep_b.append(i)
    x = np.vstack([a.x[keep_a], b.x[keep_b]])
    f = np.vstack([a.f[keep_a], b.f[keep_b]])
    mask = np.concatenate([a.evaluated[keep_a], b.evaluated[keep_b]])
    return Population(x, f, evaluated=mask)


def initialize_population(problem: ProblemSpec, n: int,
                          rng: np.random.Generator, budget: RunBudget) -> Population:
    """Uniform random population within bounds, fully evaluated (charges n FEs)."""
    if n < 1:
        raise ConfigurationError(f"population size must be >= 1, got {n}")
    x = rng.uniform(problem.lower, problem.upper, size=(n, problem.n_var))
    return evaluate_all(Population.unevaluated(x, problem.n_obj), problem, budget)


def evaluate_all(pop: Population, problem: ProblemSpec, budget: RunBudget) -> Population:
    """Evaluate every not-yet-evaluated member, charging the budget once per member."""
    pending = ~pop.evaluated
    k = int(pending.sum())
    if k == 0:
        return pop
    if pop.n_var != problem.n_var or pop.n_obj != problem.n_obj:
        raise UsageError(
            f"population shape ({pop.n_var},{pop.n_obj}) does not match problem "
            f"{problem.name} ({problem.n_var},{problem.n_obj})")
    fx = problem.evaluate_batch(pop.x[pending])
    f = pop.f.copy()
    f[pending] = fx
    budget.charge(k)
    return Population(pop.x, f)
