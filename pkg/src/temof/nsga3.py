"""Reference-point based many-objective selection (NSGA-III style).

Provides Das-Dennis reference directions, adaptive normalization,
association, niching, the two environmental selection variants used by the
framework, and a plain generational runner built from the same parts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (ConfigurationError, Population, ProblemSpec, RngKey, RunBudget,
                   UsageError, as_rng_key, concat, initialize_population)
from .dominance import sort_fronts
from .variation import VariationParams, generate_offspring

MAX_REFERENCE_POINTS = 100_000
INTERCEPT_FLOOR = 1e-12


@dataclass(frozen=True)
class ReferencePointSet:
    """Unit-simplex reference directions, one row per point."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.shape[0] < 1 or pts.shape[1] < 2:
            raise ConfigurationError(f"reference point set has bad shape {pts.shape}")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n_obj(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]


def das_dennis(n_obj: int, divisions: int) -> ReferencePointSet:
    """Simplex-lattice reference points with the given number of divisions.

    Produces C(divisions + n_obj - 1, n_obj - 1) points whose coordinates
    are multiples of 1/divisions summing to one, in lexicographic order of
    the underlying gap composition.
    """
    if n_obj < 2:
        raise ConfigurationError(f"n_obj must be >= 2, got {n_obj}")
    if divisions < 1:
        raise ConfigurationError(f"divisions must be >= 1, got {divisions}")
    count = math.comb(divisions + n_obj - 1, n_obj - 1)
    if count > MAX_REFERENCE_POINTS:
        raise ConfigurationError(
            f"das_dennis(n_obj={n_obj}, divisions={divisions}) would produce "
            f"{count} points (limit {MAX_REFERENCE_POINTS})")
    # positions of n_obj-1 separators among divisions + n_obj - 1 slots
    from itertools import combinations
    sep = np.array(list(combinations(range(1, divisions + n_obj), n_obj - 1)), dtype=int)
    sep = sep.reshape(count, n_obj - 1)
    padded = np.column_stack([np.zeros(count, dtype=int), sep,
                              np.full(count, divisions + n_obj, dtype=int)])
    parts = np.diff(padded, axis=1) - 1
    return ReferencePointSet(parts / divisions)


def choose_divisions(n_obj: int, max_points: int) -> int:
    """Largest division count whose lattice has at most max_points points."""
    if max_points < 1:
        raise ConfigurationError(f"max_points must be >= 1, got {max_points}")
    h = 1
    while math.comb(h + n_obj, n_obj - 1) <= max_points:
        h += 1
    return h


def reference_points_for(n: int, n_obj: int) -> ReferencePointSet:
    """Densest Das-Dennis lattice with at most n points (at least n_obj)."""
    return das_dennis(n_obj, choose_divisions(n_obj, max(n, n_obj)))


class NormalizationState:
    """Running ideal point and the intercepts from the latest normalization."""

    __slots__ = ("ideal", "intercepts")

    def __init__(self) -> None:
        self.ideal: np.ndarray | None = None
        self.intercepts: np.ndarray | None = None


def normalize(objs: np.ndarray, state: NormalizationState) -> tuple[np.ndarray, NormalizationState]:
    """Translate by the running ideal point and scale by hyperplane intercepts.

    Extreme points per axis are picked by the achievement scalarizing
    function with weights 1e-6 everywhere except 1 on the axis.  If the
    intercept system is singular or yields a non-positive intercept, the
    scale falls back to (max - ideal) with a 1e-12 floor.  The running
    ideal only ever decreases.
    """
    f = np.atleast_2d(np.asarray(objs, dtype=float))
    if f.shape[0] == 0:
        raise UsageError("cannot normalize an empty objective set")
    m = f.shape[1]
    ideal = f.min(axis=0)
    if state.ideal is not None:
        ideal = np.minimum(ideal, state.ideal)
    shifted = f - ideal
    weights = np.full((m, m), 1e-6)
    np.fill_diagonal(weights, 1.0)
    # asf[j, i]: scalarized value of point i for axis j
    asf = (shifted[None, :, :] / weights[:, None, :]).max(axis=2)
    extremes = shifted[asf.argmin(axis=1)]
    intercepts = None
    try:
        plane = np.linalg.solve(extremes, np.ones(m))
        with np.errstate(divide="ignore", over="ignore"):
            candidate = 1.0 / plane
        if np.all(np.isfinite(candidate)) and np.all(candidate > 0):
            intercepts = candidate
    except np.linalg.LinAlgError:
        pass
    if intercepts is None:
        intercepts = shifted.max(axis=0)
    intercepts = np.maximum(intercepts, INTERCEPT_FLOOR)
    state.ideal = ideal
    state.intercepts = intercepts
    return shifted / intercepts, state


def associate(normalized: np.ndarray, refs: ReferencePointSet) -> tuple[np.ndarray, np.ndarray]:
    """Closest reference direction per point by perpendicular distance.

    Returns (reference index, distance) arrays; ties go to the lowest index.
    """
    f = np.atleast_2d(np.asarray(normalized, dtype=float))
    if f.shape[1] != refs.n_obj:
        raise UsageError(
            f"points have {f.shape[1]} objectives, reference set has {refs.n_obj}")
    w = refs.points
    unit = w / np.linalg.norm(w, axis=1, keepdims=True)
    proj = f @ unit.T
    residual = f[:, None, :] - proj[:, :, None] * unit[None, :, :]
    dist = np.linalg.norm(residual, axis=2)
    idx = dist.argmin(axis=1)
    return idx, dist[np.arange(f.shape[0]), idx]


def _niche_select(rho: np.ndarray, crit_assoc: np.ndarray, crit_dist: np.ndarray,
                  k: int, rng: np.random.Generator) -> list[int]:
    """Pick k critical-front members by Deb's niching loop.

    rho holds current niche counts per reference point (from the already
    selected members).  Returns indices into the critical front arrays.
    """
    n_refs = rho.shape[0]
    # per reference: critical members ordered by distance, nearest first
    members: list[list[int]] = [[] for _ in range(n_refs)]
    by_dist = np.argsort(crit_dist, kind="stable")
    for i in by_dist:
        members[crit_assoc[i]].append(int(i))
    rho = rho.astype(float).copy()
    picked: list[int] = []
    while len(picked) < k:
        low = rho.min()
        if not np.isfinite(low):
            raise UsageError("niching ran out of candidates before filling the slots")
        ties = np.flatnonzero(rho == low)
        j = int(ties[rng.integers(ties.size)])
        bucket = members[j]
        if not bucket:
            rho[j] = np.inf  # niche exhausted, never revisit
            continue
        if rho[j] == 0:
            i = bucket.pop(0)  # nearest member of an empty niche
        else:
            i = bucket.pop(int(rng.integers(len(bucket))))
        picked.append(i)
        rho[j] += 1.0
    return picked


def environmental_selection(pop: Population, n: int, refs: ReferencePointSet,
                            state: NormalizationState,
                            rng: np.random.Generator) -> Population:
    """Front-wise selection with reference-point niching on the critical front.

    Returns min(n, len(pop)) members; the normalization state is advanced
    in place.
    """
    if n < 1:
        raise UsageError(f"selection size must be >= 1, got {n}")
    objs = pop.objectives
    if len(pop) <= n:
        normalize(objs, state)
        return pop
    fronts = sort_fronts(objs)
    chosen: list[np.ndarray] = []
    total = 0
    critical = None
    for front in fronts:
        if total + front.size <= n:
            chosen.append(front)
            total += front.size
            if total == n:
                break
        else:
            critical = front
            break
    selected = np.concatenate(chosen) if chosen else np.empty(0, dtype=int)
    if total == n or critical is None:
        normalize(objs[selected], state)
        return pop.take(selected)
    considered = np.concatenate([selected, critical])
    normalized, _ = normalize(objs[considered], state)
    assoc, dist = associate(normalized, refs)
    n_sel = selected.size
    rho = np.bincount(assoc[:n_sel], minlength=len(refs)).astype(float)
    picks = _niche_select(rho, assoc[n_sel:], dist[n_sel:], n - n_sel, rng)
    final = np.concatenate([selected, critical[np.sort(np.asarray(picks, dtype=int))]])
    return pop.take(final)


def first_front_selection(pop: Population, n: int, refs: ReferencePointSet,
                          state: NormalizationState,
                          rng: np.random.Generator) -> Population:
    """Keep only the first front, niching it down to n if it is larger.

    May return fewer than n members; the result is always mutually
    non-dominated.
    """
    if n < 1:
        raise UsageError(f"selection size must be >= 1, got {n}")
    objs = pop.objectives
    first = sort_fronts(objs)[0]
    if first.size <= n:
        normalize(objs[first], state)
        return pop.take(first)
    normalized, _ = normalize(objs[first], state)
    assoc, dist = associate(normalized, refs)
    rho = np.zeros(len(refs))
    picks = _niche_select(rho, assoc, dist, n, rng)
    return pop.take(first[np.sort(np.asarray(picks, dtype=int))])


class Nsga3Base:
    """Selection pair plus variation parameters for the framework.

    Bundles the reference set sized to the population, a shared
    normalization state (the running ideal spans both selection variants),
    and the niching RNG stream.
    """

    def __init__(self, problem: ProblemSpec, n: int, rng: np.random.Generator,
                 variation: VariationParams | None = None):
        if n < problem.n_obj:
            raise ConfigurationError(
                f"population size {n} is below n_obj={problem.n_obj}; "
                f"reference directions cannot be built")
        self.problem = problem
        self.n = n
        self.refs = reference_points_for(n, problem.n_obj)
        self.state = NormalizationState()
        self.rng = rng
        self.variation = variation if variation is not None else VariationParams()

    def environmental_selection(self, pop: Population, n: int) -> Population:
        return environmental_selection(pop, n, self.refs, self.state, self.rng)

    def first_front_selection(self, pop: Population, n: int) -> Population:
        return first_front_selection(pop, n, self.refs, self.state, self.rng)


def nsga3_run(problem: ProblemSpec, n: int, max_fes: int, seed: RngKey | int,
              variation: VariationParams | None = None,
              observer=None) -> tuple[Population, int]:
    """Plain generational NSGA-III loop.

    Initializes n members (n FEs), then repeats offspring generation and
    environmental selection while the budget check FEs <= max_fes passes at
    the top of the loop.  Returns (final population, FEs used).
    """
    key = as_rng_key(seed)
    if max_fes < n:
        raise ConfigurationError(f"max_fes={max_fes} is below the population size {n}")
    budget = RunBudget(max_fes)
    pop = initialize_population(problem, n, key.stream("init"), budget)
    base = Nsga3Base(problem, n, key.stream("selection"), variation)
    var_rng = key.stream("variation")
    generation = 0
    while budget.within_budget:
        generation += 1
        off = generate_offspring(pop, n, base.variation, problem, budget, var_rng)
        pop = base.environmental_selection(concat(pop, off), n)
        if observer is not None:
            observer(generation, budget.fes, pop)
    return pop, budget.fes
