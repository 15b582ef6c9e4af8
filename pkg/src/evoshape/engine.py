"""Population engine: selection, crossover, mutation, killing, evolution.

Fitness is supplied from outside (a person grading silhouettes, or an
automated oracle); the engine only applies the generational mechanics.
All randomness flows through an injected numpy Generator so that identical
(population, config, seed) triples yield identical successors.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .codec import Genome
from .errors import ConfigError, InvalidInputError, NoSelectableParentError

FITNESS_MAX = 6.0


@dataclass(frozen=True)
class Individual:
    id: int
    genome: Genome
    fitness: float | None = None
    generation_born: int = 0
    parent_ids: tuple[int, int] | None = None

    def __post_init__(self):
        if self.fitness is not None and not 0.0 <= self.fitness <= FITNESS_MAX:
            raise InvalidInputError(f"fitness {self.fitness} outside [0, 6]")


@dataclass
class Population:
    generation_index: int
    individuals: list[Individual] = field(default_factory=list)

    def __post_init__(self):
        ids = [ind.id for ind in self.individuals]
        if len(set(ids)) != len(ids):
            raise InvalidInputError("duplicate individual ids in population")

    def __len__(self) -> int:
        return len(self.individuals)

    def by_id(self, individual_id: int) -> Individual:
        for ind in self.individuals:
            if ind.id == individual_id:
                return ind
        raise InvalidInputError(f"no individual with id {individual_id}")

    def best(self) -> Individual:
        graded = [ind for ind in self.individuals if ind.fitness is not None]
        if not graded:
            raise InvalidInputError("population has no graded individuals")
        return max(graded, key=lambda ind: ind.fitness)


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 100
    turnover_rate: float = 0.7
    mutation_probability: float = 0.05
    mutation_factor_range: tuple[float, float] = (0.5, 2.0)
    mutation_sign_flip: bool = True
    rng_seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ConfigError("population_size must be >= 2")
        if not 0.0 < self.turnover_rate <= 1.0:
            raise ConfigError("turnover_rate must lie in (0, 1]")
        if not 0.0 <= self.mutation_probability <= 1.0:
            raise ConfigError("mutation_probability must lie in [0, 1]")
        lo, hi = self.mutation_factor_range
        if lo <= 0 or hi < lo:
            raise ConfigError("mutation_factor_range must be positive with lo <= hi")
        if self.survivor_count < 1:
            raise ConfigError(
                "turnover leaves no survivors; lower turnover_rate or grow the population"
            )

    @property
    def survivor_count(self) -> int:
        return int(round(self.population_size * (1.0 - self.turnover_rate)))


def _effective_fitness(ind: Individual) -> float:
    # outside evolve, ungraded individuals count as 0: unselectable, killable
    return ind.fitness if ind.fitness is not None else 0.0


def _weighted_pick(weights: np.ndarray, rng: np.random.Generator) -> int:
    total = weights.sum()
    cum = np.cumsum(weights)
    return int(np.searchsorted(cum, rng.uniform(0.0, total), side="right"))


def select_parent(population: Population, rng: np.random.Generator) -> Individual:
    """Fitness-proportional draw with replacement; zero fitness never selected."""
    weights = np.array([_effective_fitness(ind) for ind in population.individuals])
    if weights.sum() <= 0.0:
        raise NoSelectableParentError("no individual with positive fitness")
    return population.individuals[_weighted_pick(weights, rng)]


def crossover(parent1: Genome, parent2: Genome, w: float) -> Genome:
    """Componentwise weighted average (w : 100 - w) of all coefficients."""
    if parent1.harmonic_count != parent2.harmonic_count:
        raise InvalidInputError("parents must share harmonic_count")
    if not 0.0 <= w <= 100.0:
        raise InvalidInputError(f"crossover weight {w} outside [0, 100]")
    coeffs = (w * parent1.coeffs + (100.0 - w) * parent2.coeffs) / 100.0
    return Genome(parent1.harmonic_count, coeffs)


def _mutation_multipliers(h: int, config: GaConfig, rng: np.random.Generator) -> np.ndarray:
    # fixed-shape draws keep the rng stream independent of outcomes
    flags = rng.random(h) < config.mutation_probability
    lo, hi = config.mutation_factor_range
    factors = rng.uniform(lo, hi, h)
    if config.mutation_sign_flip:
        factors = np.where(rng.random(h) < 0.5, -factors, factors)
    return np.where(flags, factors, 1.0)


def mutate(genome: Genome, config: GaConfig, rng: np.random.Generator) -> Genome:
    """Scale whole gene pairs by a random factor; the fundamental a_0 never moves."""
    h = genome.harmonic_count
    per_gene = _mutation_multipliers(h, config, rng)
    mult = np.ones(2 * h + 1)
    mult[h + 1:] = per_gene
    mult[h - 1::-1] = per_gene
    return Genome(h, genome.coeffs * mult)


def kill(population: Population, survivor_count: int, rng: np.random.Generator) -> Population:
    """Remove fitness-0 individuals first, then inverse-roulette kills.

    Weights (7 - f_i) are renormalized after every removal. If dropping all
    zero-fitness individuals would overshoot, a uniformly random subset of
    them is removed instead to land exactly on survivor_count.
    """
    n = len(population)
    if survivor_count > n:
        raise InvalidInputError(f"survivor_count {survivor_count} exceeds population {n}")
    zero_idx = [k for k, ind in enumerate(population.individuals)
                if _effective_fitness(ind) == 0.0]
    alive = [k for k in range(n) if k not in set(zero_idx)]

    if len(alive) >= survivor_count:
        while len(alive) > survivor_count:
            weights = np.array([7.0 - _effective_fitness(population.individuals[k])
                                for k in alive])
            alive.pop(_weighted_pick(weights, rng))
    else:
        spare = survivor_count - len(alive)
        kept = rng.choice(len(zero_idx), size=spare, replace=False)
        alive = sorted(alive + [zero_idx[k] for k in kept])

    survivors = [population.individuals[k] for k in alive]
    return Population(population.generation_index, survivors)


def evolve(population: Population, config: GaConfig, rng: np.random.Generator) -> Population:
    """One generational step: children from the full graded parent pool, then kill.

    Ungraded parents are resolved to fitness 1 (weakly alive) before anything
    else. Parents are drawn from the pre-kill population, so an individual
    can reproduce and still die. Children start ungraded with
    generation_born = parent generation + 1.
    """
    resolved = [ind if ind.fitness is not None else replace(ind, fitness=1.0)
                for ind in population.individuals]
    weights = np.array([ind.fitness for ind in resolved])
    if weights.sum() <= 0.0:
        raise NoSelectableParentError("no individual with positive fitness")

    pool = Population(population.generation_index, resolved)
    survivor_count = min(config.survivor_count, len(pool))
    child_count = config.population_size - survivor_count
    next_id = max(ind.id for ind in resolved) + 1
    next_gen = population.generation_index + 1

    children = []
    for k in range(child_count):
        p1 = resolved[_weighted_pick(weights, rng)]
        p2 = resolved[_weighted_pick(weights, rng)]
        w = rng.uniform(0.0, 100.0)
        genome = mutate(crossover(p1.genome, p2.genome, w), config, rng)
        children.append(Individual(
            id=next_id + k, genome=genome, fitness=None,
            generation_born=next_gen, parent_ids=(p1.id, p2.id),
        ))

    survivors = kill(pool, survivor_count, rng).individuals
    return Population(next_gen, survivors + children)
