"""Automated experiments on top of the engine and similarity index.

Covers target-convergence runs graded by an automated similarity fitness,
population-convergence metrics, similarity matrices, best-versus-initial
cross tables, the (precision, point count) design-of-experiments sweep, and
pairwise-comparison records.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .codec import Genome, decode, encode, normalize, reconstruction_error
from .curves import ClosedCurve, densify
from .engine import FITNESS_MAX, GaConfig, Individual, Population, evolve
from .errors import InvalidInputError, InvalidSetupError
from .similarity import (
    SimilarityParams,
    distance_matrix,
    distances_to,
    genome_distance,
)

DECODE_SAMPLES_DEFAULT = 1500


@dataclass(frozen=True)
class GenerationStats:
    """Aggregates recorded for one completed generation."""

    generation_index: int
    mean_fitness: float
    best_fitness: float
    best_id: int
    average_similarity: float


@dataclass(frozen=True)
class ConvergenceTrace:
    entries: tuple[GenerationStats, ...]

    def best_fitness_series(self) -> np.ndarray:
        return np.array([e.best_fitness for e in self.entries])

    def average_similarity_series(self) -> np.ndarray:
        return np.array([e.average_similarity for e in self.entries])


@dataclass(frozen=True)
class PairwiseComparison:
    """Preference verdict between two silhouettes on the seven-step scale."""

    left_id: int
    right_id: int
    verdict: int  # -3 (left much better) .. 3 (right much better)

    def __post_init__(self):
        if not isinstance(self.verdict, int) or isinstance(self.verdict, bool):
            raise InvalidInputError("verdict must be an integer")
        if not -3 <= self.verdict <= 3:
            raise InvalidInputError(f"verdict {self.verdict} outside -3..3")


@dataclass(frozen=True)
class BestVsInitial:
    """Cross table of similarity percentages, one row per best individual."""

    table: np.ndarray  # shape (len(best), len(initial))
    argmax: tuple[int, ...]  # per-row index of the most similar initial


@dataclass(frozen=True)
class DoeGrid:
    precisions: tuple[int, ...]
    point_counts: tuple[int, ...]
    errors: np.ndarray  # shape (len(precisions), len(point_counts))


def sim_fitness(candidate: Genome, target: Genome,
                params: SimilarityParams) -> float:
    """Continuous automated fitness: 6 * SimInd / 100."""
    d = genome_distance(candidate, target, params)
    return FITNESS_MAX * (100.0 / (1.0 + d)) / 100.0


def _grade_against_target(population: Population, target: Genome,
                          params: SimilarityParams) -> Population:
    distances = distances_to([ind.genome for ind in population.individuals],
                             target, params)
    fitness = FITNESS_MAX / (1.0 + distances)
    graded = [replace(ind, fitness=float(f))
              for ind, f in zip(population.individuals, fitness)]
    return Population(population.generation_index, graded)


def similarity_matrix(genomes: list[Genome],
                      params: SimilarityParams) -> np.ndarray:
    """Symmetric percentage matrix with an exact 100 diagonal."""
    if len(genomes) < 2:
        raise InvalidInputError("similarity matrix needs at least two genomes")
    d = distance_matrix(genomes, params)
    d = 0.5 * (d + d.T)  # exact symmetry despite float noise
    sim = 100.0 / (1.0 + d)
    np.fill_diagonal(sim, 100.0)
    return sim


def average_population_similarity(population: Population,
                                  params: SimilarityParams) -> float:
    if len(population) < 2:
        raise InvalidInputError("average similarity needs at least two individuals")
    sim = similarity_matrix([ind.genome for ind in population.individuals],
                            params)
    off = sim[~np.eye(len(sim), dtype=bool)]
    return float(off.mean())


def population_stats(population: Population,
                     params: SimilarityParams) -> GenerationStats:
    """Aggregate one graded population into a trace entry."""
    fitness = np.array([ind.fitness for ind in population.individuals])
    best = population.best()
    return GenerationStats(
        generation_index=population.generation_index,
        mean_fitness=float(fitness.mean()),
        best_fitness=float(best.fitness),
        best_id=best.id,
        average_similarity=average_population_similarity(population, params),
    )


def run_target_convergence(target: Genome, initial: list[Genome],
                           config: GaConfig, params: SimilarityParams,
                           generations: int) -> tuple[ConvergenceTrace, Individual]:
    """Evolve toward a target under automated similarity grading.

    The target must be novel: no initial genome may normalize to the same
    coefficients. Every generation (the initial one included) is fully
    graded before the next evolution step; the trace records one entry per
    graded generation and the final best individual is returned with it.
    """
    if generations < 0:
        raise InvalidInputError("generations must be nonnegative")
    if len(initial) < 2:
        raise InvalidInputError("initial population needs at least two genomes")
    target_n = normalize(target)
    genomes = [normalize(g) for g in initial]
    for g in genomes:
        if g.harmonic_count == target_n.harmonic_count and np.allclose(
                g.coeffs, target_n.coeffs, atol=1e-9):
            raise InvalidSetupError("target must not appear in the initial population")

    rng = np.random.default_rng(config.rng_seed)
    population = Population(0, [
        Individual(id=k, genome=g) for k, g in enumerate(genomes)
    ])
    population = _grade_against_target(population, target_n, params)
    entries = [population_stats(population, params)]
    for _ in range(generations):
        population = evolve(population, config, rng)
        population = _grade_against_target(population, target_n, params)
        entries.append(population_stats(population, params))
    return ConvergenceTrace(tuple(entries)), population.best()


def best_vs_initial(best: list[Genome], initial: list[Genome],
                    params: SimilarityParams) -> BestVsInitial:
    """Similarity of each best individual against every initial genome."""
    if not best or not initial:
        raise InvalidInputError("best and initial lists must be nonempty")
    table = np.empty((len(best), len(initial)))
    for i, g in enumerate(best):
        for j, h in enumerate(initial):
            table[i, j] = 100.0 / (1.0 + genome_distance(g, h, params))
    return BestVsInitial(table=table,
                         argmax=tuple(int(k) for k in table.argmax(axis=1)))


def doe_sweep(curve: ClosedCurve, precisions: list[int],
              point_counts: list[int]) -> DoeGrid:
    """Reconstruction-error grid over decode precision and densify count.

    For each point count N the curve is densified to N and encoded once at
    the largest requested precision; each cell decodes at its own precision
    and measures the error against a single dense reference resampling of
    the curve, so cells differ only in what the codec kept.
    """
    if not precisions or not point_counts:
        raise InvalidInputError("sweep needs at least one precision and one point count")
    h = max(precisions)
    reference = densify(curve, max(DECODE_SAMPLES_DEFAULT, *point_counts))
    errors = np.empty((len(precisions), len(point_counts)))
    for j, n in enumerate(point_counts):
        genome = encode(densify(curve, n), h)
        for i, p in enumerate(precisions):
            rebuilt = decode(genome, precision=p,
                             sample_count=DECODE_SAMPLES_DEFAULT)
            errors[i, j] = reconstruction_error(reference, rebuilt)
    return DoeGrid(precisions=tuple(precisions),
                   point_counts=tuple(point_counts), errors=errors)
