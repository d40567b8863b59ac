"""Two-stage co-evolutionary framework (TEMOF) wrapped around a base MOEA.

The framework maintains the base algorithm's population alongside a
first-front archive.  Early on, offspring always come from the population;
once half of the evaluation budget is spent, each generation mates from the
archive with probability p instead.  Every generation the archive is
truncated to the first front of (archive + offspring), and the population
is re-selected from the deduplicated union of both sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import (ConfigurationError, Population, ProblemSpec, RngKey, RunBudget,
                   as_rng_key, concat, initialize_population, merge_dedupe)
from .nsga3 import Nsga3Base
from .variation import VariationParams, generate_offspring


class MatingSource(Enum):
    POPULATION = "population"
    ARCHIVE = "archive"


@dataclass(frozen=True)
class FrameworkConfig:
    """Settings of one framework run.

    n               population (and archive) capacity
    max_fes         evaluation budget; the loop runs while FEs <= max_fes
    p               probability of mating from the archive in the second stage
    stage_fraction  fraction of the budget after which the gate can open
    """

    n: int
    max_fes: int
    p: float = 0.5
    stage_fraction: float = 0.5

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigurationError(f"population size must be >= 1, got {self.n}")
        if self.max_fes < self.n:
            raise ConfigurationError(
                f"max_fes={self.max_fes} cannot be below the population size {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ConfigurationError(f"p must be in [0, 1], got {self.p}")
        if not 0.0 <= self.stage_fraction <= 1.0:
            raise ConfigurationError(
                f"stage_fraction must be in [0, 1], got {self.stage_fraction}")


def stage_gate(fes: int, max_fes: int, p: float, u: float,
               stage_fraction: float = 0.5) -> MatingSource:
    """Decide the mating source for one generation.

    The archive is used only when fes >= stage_fraction * max_fes and the
    uniform draw u falls below p.
    """
    if fes >= stage_fraction * max_fes and u < p:
        return MatingSource.ARCHIVE
    return MatingSource.POPULATION


@dataclass(frozen=True)
class GenerationRecord:
    """One generation's bookkeeping in the run trace."""

    generation: int
    fes_before: int
    source: MatingSource
    fes_after: int


@dataclass
class RunTrace:
    """Per-generation records of a framework run."""

    records: list[GenerationRecord] = field(default_factory=list)

    def append(self, record: GenerationRecord) -> None:
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def archive_generations(self) -> int:
        return sum(1 for r in self.records if r.source is MatingSource.ARCHIVE)


@dataclass
class TemofResult:
    """Final state of a framework run.

    The population is the base algorithm's last selection; the archive is
    the maintained first-front set.  Both are reported because they answer
    different questions (convergence+spread vs pure non-dominated set).
    """

    population: Population
    archive: Population
    trace: RunTrace
    fes: int


def _pad_union(a: Population, b: Population, union: Population, n: int) -> Population:
    """Top the merged union back up to n members.

    Variation can reproduce a parent bit for bit, so dropping exact
    duplicates may leave fewer than n distinct members.  The earliest
    removed copies are appended back, keeping the population size fixed.
    """
    both = concat(a, b)
    seen: set[bytes] = set()
    extras: list[int] = []
    for i in range(len(both)):
        key = both.x[i].tobytes()
        if key in seen:
            extras.append(i)
        else:
            seen.add(key)
    need = n - len(union)
    return concat(union, both.take(np.asarray(extras[:need], dtype=int)))


def temof_run(problem: ProblemSpec, config: FrameworkConfig, seed: RngKey | int,
              *, base_factory=None, variation: VariationParams | None = None,
              observer=None, disable_archive: bool = False) -> TemofResult:
    """Run the two-stage framework on one problem.

    base_factory(problem, n, rng, variation) builds the base algorithm; the
    default is the reference-point base (Nsga3Base).  With
    disable_archive=True the archive is neither maintained nor mated from,
    which reduces the loop to the plain base algorithm; the gate stream is
    still advanced every generation so seeds stay comparable.
    """
    key = as_rng_key(seed)
    factory = base_factory if base_factory is not None else Nsga3Base
    budget = RunBudget(config.max_fes)
    population = initialize_population(problem, config.n, key.stream("init"), budget)
    base = factory(problem, config.n, key.stream("selection"), variation)
    gate_rng = key.stream("gate")
    var_rng = key.stream("variation")
    archive = population
    trace = RunTrace()
    generation = 0
    while budget.within_budget:
        generation += 1
        fes_before = budget.fes
        u = float(gate_rng.random())
        if disable_archive:
            source = MatingSource.POPULATION
        else:
            source = stage_gate(fes_before, config.max_fes, config.p, u,
                                config.stage_fraction)
        parents = archive if source is MatingSource.ARCHIVE else population
        offspring = generate_offspring(parents, config.n, base.variation,
                                       problem, budget, var_rng)
        selected = base.environmental_selection(concat(population, offspring), config.n)
        if disable_archive:
            population = selected
        else:
            archive = base.first_front_selection(concat(archive, offspring), config.n)
            union = merge_dedupe(selected, archive)
            if len(union) < config.n:
                union = _pad_union(selected, archive, union, config.n)
            population = base.environmental_selection(union, config.n)
        trace.append(GenerationRecord(generation, fes_before, source, budget.fes))
        if observer is not None:
            observer(generation, budget.fes, source, population, archive)
    return TemofResult(population, archive, trace, budget.fes)
