from __future__ import annotations

import numpy as np
import pytest

from conftest import circle_points, random_genome
from evoshape.codec import Genome, encode, normalize
from evoshape.corpus import reference_params, sample_corpus
from evoshape.curves import ClosedCurve
from evoshape.engine import GaConfig, Individual, Population
from evoshape.errors import InvalidInputError, InvalidSetupError
from evoshape.harness import (
    DECODE_SAMPLES_DEFAULT,
    BestVsInitial,
    ConvergenceTrace,
    DoeGrid,
    GenerationStats,
    PairwiseComparison,
    average_population_similarity,
    best_vs_initial,
    doe_sweep,
    run_target_convergence,
    sim_fitness,
    similarity_matrix,
)
from evoshape.similarity import CoefficientBounds, SimilarityParams


@pytest.fixture(scope="module")
def corpus():
    return sample_corpus(seed=0)


@pytest.fixture(scope="module")
def corpus_genomes(corpus):
    return [normalize(encode(c, 70)) for c in corpus]


@pytest.fixture(scope="module")
def corpus_params(corpus_genomes):
    return reference_params(corpus_genomes)


def unit_params(a: float = 1.0, b: float = 0.0) -> SimilarityParams:
    n = 21
    bounds = CoefficientBounds(10, np.zeros(n), np.ones(n), np.zeros(n), np.ones(n))
    return SimilarityParams(model="exponential", a=a, b=b, gene_span=10, bounds=bounds)


def flat_genome(u2: float = 0.0) -> Genome:
    c = np.zeros(21, dtype=complex)
    c[10 + 1] = 1.0
    c[10 + 2] = u2
    return Genome(10, c)


def ga_config(seed: int, mutation: float = 0.3,
              population: int = 100) -> GaConfig:
    return GaConfig(population_size=population, turnover_rate=0.7,
                    mutation_probability=mutation,
                    mutation_factor_range=(0.5, 2.0),
                    mutation_sign_flip=True, rng_seed=seed)


# --- sim_fitness ---

def test_sim_fitness_identical_is_six():
    g = flat_genome()
    assert sim_fitness(g, g, unit_params()) == pytest.approx(6.0, abs=1e-12)


def test_sim_fitness_half_similarity_is_three():
    # unit width step in gene 2 with alpha(2) = 1 gives D = 1, SimInd = 50%
    f = sim_fitness(flat_genome(1.0), flat_genome(0.0), unit_params(a=1.0))
    assert f == pytest.approx(3.0, abs=1e-12)


def test_sim_fitness_44_percent_maps_to_2_64():
    # D = 56/44 makes SimInd exactly 44%
    f = sim_fitness(flat_genome(1.0), flat_genome(0.0), unit_params(a=56.0 / 44.0))
    assert f == pytest.approx(2.64, abs=1e-9)


# --- similarity_matrix / average_population_similarity ---

def test_similarity_matrix_symmetric_unit_diagonal(corpus_genomes, corpus_params):
    sims = similarity_matrix(corpus_genomes[:8], corpus_params)
    np.testing.assert_array_equal(sims, sims.T)
    np.testing.assert_array_equal(np.diag(sims), np.full(8, 100.0))
    assert np.all(sims > 0.0) and np.all(sims <= 100.0)


def test_similarity_matrix_identical_pair(corpus_genomes, corpus_params):
    g = corpus_genomes[0]
    sims = similarity_matrix([g, g], corpus_params)
    assert sims[0, 1] == pytest.approx(100.0, abs=1e-9)


def test_similarity_matrix_needs_two(corpus_genomes, corpus_params):
    with pytest.raises(InvalidInputError):
        similarity_matrix(corpus_genomes[:1], corpus_params)


def test_average_population_similarity_identical_is_100(corpus_genomes, corpus_params):
    pop = Population(0, [Individual(id=k, genome=corpus_genomes[0])
                         for k in range(3)])
    assert average_population_similarity(pop, corpus_params) == pytest.approx(100.0)


def test_average_population_similarity_two_equals_pairwise(corpus_genomes, corpus_params):
    pop = Population(0, [Individual(id=0, genome=corpus_genomes[0]),
                         Individual(id=1, genome=corpus_genomes[1])])
    expected = similarity_matrix(corpus_genomes[:2], corpus_params)[0, 1]
    assert average_population_similarity(pop, corpus_params) == pytest.approx(expected)


def test_average_population_similarity_needs_two(corpus_genomes, corpus_params):
    pop = Population(0, [Individual(id=0, genome=corpus_genomes[0])])
    with pytest.raises(InvalidInputError):
        average_population_similarity(pop, corpus_params)


# --- PairwiseComparison ---

def test_pairwise_comparison_accepts_full_scale():
    for verdict in range(-3, 4):
        rec = PairwiseComparison(left_id=1, right_id=2, verdict=verdict)
        assert rec.verdict == verdict


def test_pairwise_comparison_rejects_bad_verdicts():
    for bad in (-4, 4, 1.5, "2", True):
        with pytest.raises(InvalidInputError):
            PairwiseComparison(left_id=1, right_id=2, verdict=bad)


# --- run_target_convergence ---

def test_target_in_initial_population_is_rejected(corpus_genomes, corpus_params):
    scaled = Genome(70, np.asarray(corpus_genomes[0].coeffs) * 2.5)
    with pytest.raises(InvalidSetupError):
        run_target_convergence(scaled, corpus_genomes, ga_config(1),
                               corpus_params, generations=1)


def test_zero_generations_traces_initial_only(corpus_genomes, corpus_params):
    trace, best = run_target_convergence(corpus_genomes[0], corpus_genomes[1:],
                                         ga_config(1), corpus_params,
                                         generations=0)
    assert isinstance(trace, ConvergenceTrace)
    assert len(trace.entries) == 1
    assert trace.entries[0].generation_index == 0
    assert best.fitness is not None


def test_negative_generations_rejected(corpus_genomes, corpus_params):
    with pytest.raises(InvalidInputError):
        run_target_convergence(corpus_genomes[0], corpus_genomes[1:],
                               ga_config(1), corpus_params, generations=-1)


def test_trace_shape_and_ranges(corpus_genomes, corpus_params):
    trace, best = run_target_convergence(corpus_genomes[0], corpus_genomes[1:],
                                         ga_config(3), corpus_params,
                                         generations=4)
    assert len(trace.entries) == 5
    for k, entry in enumerate(trace.entries):
        assert isinstance(entry, GenerationStats)
        assert entry.generation_index == k
        assert 0.0 <= entry.mean_fitness <= entry.best_fitness <= 6.0
        assert 0.0 < entry.average_similarity <= 100.0
    assert best.fitness == trace.entries[-1].best_fitness


def test_run_is_deterministic_per_seed(corpus_genomes, corpus_params):
    runs = [run_target_convergence(corpus_genomes[0], corpus_genomes[1:],
                                   ga_config(9), corpus_params, generations=3)
            for _ in range(2)]
    (trace_a, best_a), (trace_b, best_b) = runs
    assert trace_a == trace_b
    assert best_a.id == best_b.id
    np.testing.assert_array_equal(np.asarray(best_a.genome.coeffs),
                                  np.asarray(best_b.genome.coeffs))


def test_windowed_best_fitness_mostly_non_decreasing(corpus_genomes, corpus_params):
    # killing is inverse-roulette, so the best can die; over 3-generation
    # windows the running best must still move forward almost always
    ok = total = 0
    for seed in range(101, 111):
        trace, _ = run_target_convergence(corpus_genomes[0], corpus_genomes[1:],
                                          ga_config(seed), corpus_params,
                                          generations=10)
        b = trace.best_fitness_series()
        windowed = np.array([b[i:i + 3].max() for i in range(len(b) - 2)])
        ok += int(np.sum(np.diff(windowed) >= -1e-12))
        total += len(windowed) - 1
    assert ok / total >= 0.9


# --- best_vs_initial ---

def test_best_vs_initial_identical_member(corpus_genomes, corpus_params):
    table = best_vs_initial([corpus_genomes[3]], corpus_genomes[:6], corpus_params)
    assert isinstance(table, BestVsInitial)
    assert table.table.shape == (1, 6)
    assert table.table[0, 3] == pytest.approx(100.0, abs=1e-9)
    assert table.argmax == (3,)


def test_best_vs_initial_far_genome_scores_near_zero():
    params = unit_params(a=50.0)
    far = flat_genome(u2=40.0)
    table = best_vs_initial([far], [flat_genome(0.0), flat_genome(0.2)], params)
    assert np.all(table.table[0] < 1.0)


def test_best_vs_initial_rejects_empty(corpus_genomes, corpus_params):
    with pytest.raises(InvalidInputError):
        best_vs_initial([], corpus_genomes, corpus_params)
    with pytest.raises(InvalidInputError):
        best_vs_initial(corpus_genomes, [], corpus_params)


def test_best_vs_initial_argmax_finds_perturbation_source():
    # target built as a small perturbation of member k: after a convergence
    # run the best individual's closest initial must be k itself
    curves = sample_corpus(count=6, seed=0)
    genomes = [normalize(encode(c, 70)) for c in curves]
    params = reference_params(genomes)
    k = 2
    rng = np.random.default_rng(5)
    c = np.array(genomes[k].coeffs)
    for m in (1, 2, 3):
        c[70 + m] *= 1.0 + 0.002 * rng.standard_normal()
        c[70 - m] *= 1.0 + 0.002 * rng.standard_normal()
    target = normalize(Genome(70, c))
    trace, best = run_target_convergence(
        target, genomes, ga_config(7, mutation=0.05, population=60),
        params, generations=8)
    table = best_vs_initial([best.genome], genomes, params)
    assert table.argmax[0] == k


# --- doe_sweep ---

def test_doe_single_cell(corpus):
    grid = doe_sweep(corpus[0], [10], [300])
    assert isinstance(grid, DoeGrid)
    assert grid.precisions == (10,)
    assert grid.point_counts == (300,)
    assert grid.errors.shape == (1, 1)
    assert grid.errors[0, 0] >= 0.0


def test_doe_grid_shape(corpus):
    grid = doe_sweep(corpus[0], [5, 20, 70], [200, 400])
    assert grid.errors.shape == (3, 2)
    assert grid.precisions == (5, 20, 70)
    assert grid.point_counts == (200, 400)


def test_doe_rejects_empty_axes(corpus):
    with pytest.raises(InvalidInputError):
        doe_sweep(corpus[0], [], [200])
    with pytest.raises(InvalidInputError):
        doe_sweep(corpus[0], [10], [])


def test_doe_orderings_on_one_silhouette(corpus):
    grid = doe_sweep(corpus[0], [5, 70], [200, 1500])
    e5_1500 = grid.errors[0, 1]
    e70_200 = grid.errors[1, 0]
    e70_1500 = grid.errors[1, 1]
    assert e70_1500 < e70_200
    assert e70_1500 < e5_1500


def test_doe_error_stabilizes_with_point_count(corpus):
    # at low precision the error must not grow as the sampling refines
    for curve in corpus:
        n = len(curve)
        grid = doe_sweep(curve, [5, 10, 20], [2 * n, 4 * n, 8 * n])
        increases = np.diff(grid.errors, axis=1)
        assert increases.max() <= 1e-6


def test_doe_error_non_increasing_in_precision(corpus):
    for curve in corpus[:6]:
        grid = doe_sweep(curve, [5, 10, 20, 40, 70], [1500])
        increases = np.diff(grid.errors[:, 0])
        assert increases.max() <= 1e-6


def test_doe_circle_error_floor_is_tiny():
    # a circle is a single harmonic; with a knot count dividing the sample
    # count the reference and decode grids line up, leaving only the
    # interpolant's own deviation
    curve = ClosedCurve(circle_points(250), params=np.arange(250) / 250)
    grid = doe_sweep(curve, [5], [DECODE_SAMPLES_DEFAULT])
    assert grid.errors[0, 0] < 1e-6
