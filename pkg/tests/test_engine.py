from __future__ import annotations

import numpy as np
import pytest

from conftest import random_genome
from evoshape.codec import Genome
from evoshape.engine import (
    GaConfig,
    Individual,
    Population,
    crossover,
    evolve,
    kill,
    mutate,
    select_parent,
)
from evoshape.errors import ConfigError, InvalidInputError, NoSelectableParentError


def make_population(fitnesses, rng=None, generation=0):
    rng = rng or np.random.default_rng(0)
    inds = [
        Individual(id=k, genome=random_genome(rng, harmonic_count=6,
                                              active_genes=4),
                   fitness=f, generation_born=generation)
        for k, f in enumerate(fitnesses)
    ]
    return Population(generation_index=generation, individuals=inds)


class TestSelectParent:
    def test_single_graded_always_wins(self):
        pop = make_population([6.0, 0.0, 0.0, None])
        rng = np.random.default_rng(1)
        for _ in range(500):
            assert select_parent(pop, rng).id == 0

    def test_proportional_frequencies(self):
        pop = make_population([1.0, 2.0, 3.0])
        rng = np.random.default_rng(2)
        counts = np.zeros(3)
        draws = 100_000
        for _ in range(draws):
            counts[select_parent(pop, rng).id] += 1
        freqs = counts / draws
        np.testing.assert_allclose(freqs, [1 / 6, 2 / 6, 3 / 6], atol=0.02)

    def test_all_zero_or_ungraded_rejected(self):
        rng = np.random.default_rng(3)
        with pytest.raises(NoSelectableParentError):
            select_parent(make_population([0.0, 0.0, None]), rng)


class TestCrossover:
    def test_endpoint_weights_return_each_parent(self):
        rng = np.random.default_rng(4)
        g1 = random_genome(rng, harmonic_count=8)
        g2 = random_genome(rng, harmonic_count=8)
        np.testing.assert_allclose(crossover(g1, g2, 100.0).coeffs, g1.coeffs)
        np.testing.assert_allclose(crossover(g1, g2, 0.0).coeffs, g2.coeffs)

    def test_midpoint_blend(self):
        h = 4
        c1 = np.zeros(2 * h + 1, dtype=complex)
        c2 = np.zeros(2 * h + 1, dtype=complex)
        c1[h + 1] = 1.0
        c2[h + 1] = 1.0j
        child = crossover(Genome(h, c1), Genome(h, c2), 50.0)
        assert child.coefficient(1) == pytest.approx(0.5 + 0.5j)

    def test_blend_is_elementwise_affine(self):
        rng = np.random.default_rng(5)
        g1 = random_genome(rng, harmonic_count=8)
        g2 = random_genome(rng, harmonic_count=8)
        child = crossover(g1, g2, 30.0)
        np.testing.assert_allclose(
            child.coeffs, 0.3 * g1.coeffs + 0.7 * g2.coeffs, atol=1e-15)

    def test_rejects_mismatched_sizes_and_bad_weight(self):
        rng = np.random.default_rng(6)
        g1 = random_genome(rng, harmonic_count=8)
        g2 = random_genome(rng, harmonic_count=6)
        with pytest.raises(InvalidInputError):
            crossover(g1, g2, 50.0)
        g3 = random_genome(rng, harmonic_count=8)
        with pytest.raises(InvalidInputError):
            crossover(g1, g3, 101.0)


def mutation_config(probability, factor_range=(0.5, 2.0), sign_flip=True):
    return GaConfig(population_size=10, turnover_rate=0.5,
                    mutation_probability=probability,
                    mutation_factor_range=factor_range,
                    mutation_sign_flip=sign_flip, rng_seed=0)


class TestMutate:
    def test_zero_probability_is_identity(self):
        rng = np.random.default_rng(7)
        g = random_genome(rng, harmonic_count=8)
        out = mutate(g, mutation_config(0.0), rng)
        np.testing.assert_array_equal(out.coeffs, g.coeffs)

    def test_fundamental_never_mutates(self):
        rng = np.random.default_rng(8)
        coeffs = np.array(random_genome(rng, harmonic_count=8).coeffs)
        coeffs[8] = 0.7 - 0.2j  # nonzero a_0 so a change would show
        g = Genome(8, coeffs)
        cfg = mutation_config(1.0)
        for _ in range(200):
            out = mutate(g, cfg, rng)
            assert out.coefficient(0) == g.coefficient(0)

    def test_gene_pair_shares_one_factor(self):
        rng = np.random.default_rng(9)
        g = random_genome(rng, harmonic_count=8, active_genes=8)
        out = mutate(g, mutation_config(1.0), rng)
        for m in range(1, 9):
            f_pos = out.coefficient(m) / g.coefficient(m)
            f_neg = out.coefficient(-m) / g.coefficient(-m)
            assert f_pos == pytest.approx(f_neg, rel=1e-12)
            assert f_pos.imag == pytest.approx(0.0, abs=1e-12)

    def test_factor_distribution_and_sign_rate(self):
        # factor magnitude ~ U[0.5, 2.0], negated half the time
        rng = np.random.default_rng(10)
        h = 2
        coeffs = np.zeros(2 * h + 1, dtype=complex)
        coeffs[h + 1] = 1.0
        coeffs[h + 2] = 1.0
        g = Genome(h, coeffs)
        cfg = mutation_config(1.0)
        factors = np.empty(100_000)
        for k in range(100_000):
            out = mutate(g, cfg, rng)
            factors[k] = out.coefficient(2).real
        signs_negative = np.mean(factors < 0)
        assert abs(signs_negative - 0.5) < 0.01
        mags = np.sort(np.abs(factors))
        # one-sample Kolmogorov-Smirnov against U[0.5, 2.0]
        cdf = (mags - 0.5) / 1.5
        empirical = np.arange(1, mags.size + 1) / mags.size
        ks = np.max(np.maximum(np.abs(empirical - cdf),
                               np.abs(empirical - 1 / mags.size - cdf)))
        assert ks < 0.01

    def test_sign_flip_disabled_keeps_factors_positive(self):
        rng = np.random.default_rng(11)
        g = random_genome(rng, harmonic_count=6, active_genes=6)
        cfg = mutation_config(1.0, sign_flip=False)
        for _ in range(200):
            out = mutate(g, cfg, rng)
            for m in range(2, 7):
                assert (out.coefficient(m) / g.coefficient(m)).real > 0


class TestKill:
    def test_zero_fitness_removed_first(self):
        pop = make_population([0.0, 0.0, 5.0])
        for seed in range(200):
            survivors = kill(pop, 1, np.random.default_rng(seed))
            assert [i.id for i in survivors.individuals] == [2]

    def test_inverse_roulette_frequencies(self):
        # fitness 1 vs fitness 6: kill odds 6:1
        runs = 100_000
        killed_low = 0
        rng = np.random.default_rng(13)
        pop = make_population([1.0, 6.0])
        for _ in range(runs):
            survivors = kill(pop, 1, rng)
            if survivors.individuals[0].id == 1:
                killed_low += 1
        assert abs(killed_low / runs - 6 / 7) < 0.01

    def test_symmetric_fitness_kills_uniformly(self):
        runs = 50_000
        rng = np.random.default_rng(14)
        pop = make_population([3.0, 3.0, 3.0, 3.0])
        surviving = np.zeros(4)
        for _ in range(runs):
            for ind in kill(pop, 2, rng).individuals:
                surviving[ind.id] += 1
        np.testing.assert_allclose(surviving / runs, 0.5, atol=0.02)

    def test_overshoot_keeps_uniform_zero_subset(self):
        pop = make_population([0.0, 0.0, 0.0, 5.0])
        rng = np.random.default_rng(15)
        kept = np.zeros(4)
        runs = 30_000
        for _ in range(runs):
            survivors = kill(pop, 3, rng)
            assert len(survivors.individuals) == 3
            ids = {i.id for i in survivors.individuals}
            assert 3 in ids
            for k in ids - {3}:
                kept[k] += 1
        np.testing.assert_allclose(kept[:3] / runs, 2 / 3, atol=0.02)

    def test_survivors_keep_original_order_and_fitness(self):
        pop = make_population([2.0, 4.0, 1.0, 6.0, 3.0])
        survivors = kill(pop, 3, np.random.default_rng(16))
        ids = [i.id for i in survivors.individuals]
        assert ids == sorted(ids)
        for ind in survivors.individuals:
            assert ind.fitness == pop.by_id(ind.id).fitness

    def test_rejects_impossible_survivor_count(self):
        pop = make_population([1.0, 2.0])
        with pytest.raises(InvalidInputError):
            kill(pop, 3, np.random.default_rng(17))


class TestEvolve:
    def config(self, **kw):
        base = dict(population_size=20, turnover_rate=0.7,
                    mutation_probability=0.05,
                    mutation_factor_range=(0.5, 2.0),
                    mutation_sign_flip=True, rng_seed=0)
        base.update(kw)
        return GaConfig(**base)

    def test_counts_and_generations(self):
        rng = np.random.default_rng(20)
        pop = make_population(list(np.linspace(1, 6, 20)), rng=rng)
        nxt = evolve(pop, self.config(), np.random.default_rng(21))
        assert nxt.generation_index == 1
        assert len(nxt.individuals) == 20
        old = [i for i in nxt.individuals if i.generation_born == 0]
        new = [i for i in nxt.individuals if i.generation_born == 1]
        assert len(old) == 6  # round(20 * 0.3)
        assert len(new) == 14
        for child in new:
            assert child.fitness is None
            assert child.parent_ids is not None

    def test_child_ids_continue_from_max(self):
        rng = np.random.default_rng(22)
        pop = make_population([3.0] * 10, rng=rng)
        nxt = evolve(pop, self.config(population_size=10), np.random.default_rng(3))
        child_ids = sorted(i.id for i in nxt.individuals
                           if i.generation_born == 1)
        assert child_ids == list(range(10, 17))

    def test_single_dominant_parent_breeds_all_children(self):
        rng = np.random.default_rng(23)
        inds = [Individual(id=k, genome=random_genome(rng, harmonic_count=6),
                           fitness=(6.0 if k == 4 else 0.0))
                for k in range(10)]
        pop = Population(generation_index=0, individuals=inds)
        cfg = self.config(population_size=10, mutation_probability=0.0)
        nxt = evolve(pop, cfg, np.random.default_rng(24))
        for child in nxt.individuals:
            if child.generation_born == 1:
                assert child.parent_ids == (4, 4)
                np.testing.assert_allclose(child.genome.coeffs,
                                           pop.by_id(4).genome.coeffs)

    def test_parents_drawn_from_pre_kill_pool(self):
        # parents can be individuals that do not survive the cull
        rng = np.random.default_rng(25)
        pop = make_population(list(np.linspace(1, 6, 20)), rng=rng)
        seen_dead_parent = False
        for seed in range(40):
            nxt = evolve(pop, self.config(), np.random.default_rng(seed))
            survivors = {i.id for i in nxt.individuals
                         if i.generation_born == 0}
            for child in nxt.individuals:
                if child.generation_born == 1:
                    assert all(any(i.id == p for i in pop.individuals)
                               for p in child.parent_ids)
                    if any(p not in survivors for p in child.parent_ids):
                        seen_dead_parent = True
        assert seen_dead_parent

    def test_ungraded_individuals_get_default_fitness(self):
        rng = np.random.default_rng(26)
        inds = [Individual(id=k, genome=random_genome(rng, harmonic_count=6),
                           fitness=None)
                for k in range(10)]
        pop = Population(generation_index=0, individuals=inds)
        nxt = evolve(pop, self.config(population_size=10),
                     np.random.default_rng(27))
        for ind in nxt.individuals:
            if ind.generation_born == 0:
                assert ind.fitness == 1.0

    def test_all_zero_population_rejected(self):
        pop = make_population([0.0] * 10)
        with pytest.raises(NoSelectableParentError):
            evolve(pop, self.config(population_size=10),
                   np.random.default_rng(28))

    def test_deterministic_under_fixed_seed(self):
        rng = np.random.default_rng(29)
        pop = make_population(list(np.linspace(1, 6, 20)), rng=rng)
        a = evolve(pop, self.config(), np.random.default_rng(77))
        b = evolve(pop, self.config(), np.random.default_rng(77))
        assert [i.id for i in a.individuals] == [i.id for i in b.individuals]
        for x, y in zip(a.individuals, b.individuals):
            np.testing.assert_array_equal(x.genome.coeffs, y.genome.coeffs)
            assert x.fitness == y.fitness
            assert x.parent_ids == y.parent_ids

    def test_small_population_keeps_at_least_one_survivor(self):
        cfg = GaConfig(population_size=2, turnover_rate=0.7,
                       mutation_probability=0.1,
                       mutation_factor_range=(0.5, 2.0),
                       mutation_sign_flip=True, rng_seed=0)
        assert cfg.survivor_count == 1
        pop = make_population([2.0, 5.0])
        nxt = evolve(pop, cfg, np.random.default_rng(30))
        assert len(nxt.individuals) == 2


class TestConfigAndTypes:
    def test_fitness_bounds_enforced(self):
        g = random_genome(np.random.default_rng(31), harmonic_count=6)
        with pytest.raises(InvalidInputError):
            Individual(id=0, genome=g, fitness=6.5)
        with pytest.raises(InvalidInputError):
            Individual(id=0, genome=g, fitness=-1.0)

    def test_population_rejects_duplicate_ids(self):
        g = random_genome(np.random.default_rng(32), harmonic_count=6)
        with pytest.raises(InvalidInputError):
            Population(generation_index=0, individuals=[
                Individual(id=1, genome=g), Individual(id=1, genome=g)])

    def test_best_prefers_graded(self):
        pop = make_population([1.0, None, 4.0, 2.0])
        assert pop.best().id == 2

    def test_config_validation(self):
        ok = dict(population_size=10, turnover_rate=0.5,
                  mutation_probability=0.1, mutation_factor_range=(0.5, 2.0),
                  mutation_sign_flip=True, rng_seed=0)
        GaConfig(**ok)
        for field, bad in [("population_size", 1), ("turnover_rate", 1.5),
                           ("mutation_probability", -0.1),
                           ("mutation_factor_range", (2.0, 0.5)),
                           ("mutation_factor_range", (0.0, 2.0))]:
            kw = dict(ok)
            kw[field] = bad
            with pytest.raises(ConfigError):
                GaConfig(**kw)
        # turnover so high that nobody would survive
        kw = dict(ok)
        kw["turnover_rate"] = 0.99
        with pytest.raises(ConfigError):
            GaConfig(**kw)
