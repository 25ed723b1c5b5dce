#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lbnn/ga.hpp"
#include "test_support.hpp"

using namespace lbnn;

TEST_CASE("roulette frequencies track fitness shares")
{
    const std::vector<double> fit{0.5, 0.25, 0.125, 0.125, 1.0};
    const RouletteSelector sel(fit);
    const double total = 2.0;
    Engine rng(11);
    const int draws = 200000;
    std::vector<int> counts(fit.size());
    for (int i = 0; i < draws; ++i)
        ++counts[sel.draw(rng)];
    double chi2 = 0.0;
    for (std::size_t i = 0; i < fit.size(); ++i) {
        const double p = fit[i] / total;
        CHECK(sel.probability(i) == doctest::Approx(p));
        const double expected = draws * p;
        chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
    }
    // 4 degrees of freedom, p = 0.001.
    CHECK(chi2 < 18.47);
}

TEST_CASE("roulette edge cases")
{
    const std::vector<double> two{1.0, 1.0 / 33.0};
    CHECK(RouletteSelector(two).probability(0) == doctest::Approx(33.0 / 34.0));

    const std::vector<double> one{0.2};
    const RouletteSelector single(one);
    Engine rng(1);
    for (int i = 0; i < 100; ++i)
        CHECK(single.draw(rng) == 0);

    const std::vector<double> bad{0.5, 0.0};
    CHECK_THROWS_AS(RouletteSelector{bad}, Error);
    CHECK_THROWS_AS(RouletteSelector{std::vector<double>{}}, Error);
}

TEST_CASE("crossover splices at the cutpoint")
{
    const Genome a = Genome::zeros(2);
    Genome b = a;
    for (std::size_t i = 0; i < b.size(); ++i)
        b.set(i, true);
    const auto [c1, c2] = crossover(a, b, 2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(c1[i] == (i >= 2));
        CHECK(c2[i] == (i < 2));
    }

    std::mt19937_64 gen(4);
    const Genome x = random_genome(5, gen());
    const Genome y = random_genome(5, gen());
    const auto [lo1, lo2] = crossover(x, y, 1);
    CHECK(lo1[0] == x[0]);
    for (std::size_t i = 1; i < x.size(); ++i)
        CHECK(lo1[i] == y[i]);
    const auto [hi1, hi2] = crossover(x, y, x.size() - 1);
    CHECK(hi1[x.size() - 1] == y[x.size() - 1]);
    CHECK(hi2[0] == y[0]);
    CHECK(crossover(x, y, 0) == std::pair{y, x});
    CHECK(crossover(x, y, x.size()) == std::pair{x, y});
    CHECK_THROWS_AS(crossover(x, y, x.size() + 1), Error);
    CHECK_THROWS_AS(crossover(x, Genome::zeros(4), 3), Error);
}

TEST_CASE("mutation rates")
{
    Engine rng(2);
    const Genome g = random_genome(5, 8);
    CHECK(mutate(g, 0.0, rng) == g);
    const Genome all = mutate(g, 1.0, rng);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(all[i] != g[i]);

    const int trials = 20000;
    long flips = 0;
    for (int t = 0; t < trials; ++t) {
        const Genome m = mutate(g, 0.01, rng);
        for (std::size_t i = 0; i < g.size(); ++i)
            flips += m[i] != g[i];
    }
    CHECK(std::abs(static_cast<double>(flips) / trials - 0.79) < 0.05);
}

TEST_CASE("learnable penalty")
{
    NetworkSpec s = NetworkSpec::empty(3, 1);
    s.set_cell(0, 1, WeightCell::learnable());
    s.set_cell(1, 2, WeightCell::learnable());
    EvalReport perfect;
    perfect.env_count = 1;
    CHECK(penalized_fitness(perfect, s, 0.001) == doctest::Approx(1.0 / 1.002));
    CHECK(penalized_fitness(perfect, s, 0.0) == 1.0);
    double last = 2.0;
    for (int k = 0; k <= 6; ++k) {
        NetworkSpec t = NetworkSpec::empty(3, 1);
        for (int c = 0; c < k; ++c)
            t.set_cell(c / 3, c % 3, WeightCell::learnable());
        const double v = penalized_fitness(perfect, t, 0.01);
        CHECK(v < last);
        last = v;
    }
}

TEST_CASE("elite indices break ties by index")
{
    const std::vector<double> fit{0.5, 0.9, 0.9, 0.1, 0.9};
    CHECK(elite_indices(fit, 2) == std::vector<std::size_t>{1, 2});
    CHECK(elite_indices(fit, 4) == std::vector<std::size_t>{1, 2, 4, 0});
    CHECK(elite_indices(fit, 0).empty());
}

TEST_CASE("next generation sizes, elites and closure")
{
    for (int pop : {4, 64, 8192}) {
        GaConfig cfg;
        cfg.population_size = pop;
        Engine init(static_cast<Seed>(pop));
        std::vector<Genome> genomes;
        std::vector<double> fit;
        for (int i = 0; i < pop; ++i) {
            genomes.push_back(random_genome(cfg.n_nodes, init));
            fit.push_back(1.0 / (1 + i % 7));
        }
        fit[static_cast<std::size_t>(pop - 1)] = 2.0;
        Engine sel(1), mut(2);
        const auto next = next_generation(genomes, fit, cfg, sel, mut);
        CHECK(next.size() == static_cast<std::size_t>(pop));
        CHECK(next[0] == genomes[static_cast<std::size_t>(pop - 1)]);
        CHECK(next[1] == genomes[0]);
        for (const auto& g : next)
            CHECK(g.size() == genome_length(cfg.n_nodes));
    }

    GaConfig cfg;
    cfg.population_size = 30;
    cfg.mutation_rate = 0.0;
    const Genome g = random_genome(cfg.n_nodes, 3);
    const std::vector<Genome> same(30, g);
    const std::vector<double> fit(30, 0.5);
    Engine sel(5), mut(6);
    for (const auto& child : next_generation(same, fit, cfg, sel, mut))
        CHECK(child == g);
}

TEST_CASE("parallel population evaluation equals the serial reference")
{
    Engine rng(12);
    std::vector<Genome> genomes;
    for (int i = 0; i < 300; ++i)
        genomes.push_back(random_genome(4, rng));
    std::vector<Environment> envs;
    for (int i = 0; i < 5; ++i)
        envs.push_back(sample_environment(rng));
    const auto serial = evaluate_population_serial(genomes, envs, 0.002);
    for (int workers : {1, 2, 4})
        CHECK(evaluate_population(genomes, envs, 0.002, workers) == serial);
}

TEST_CASE("evolution is deterministic across worker counts")
{
    GaConfig cfg;
    cfg.population_size = 64;
    cfg.n_nodes = 4;
    cfg.max_generations = 6;
    cfg.master_seed = 21;
    cfg.workers = 1;
    const RunLog a = run_evolution(cfg);
    cfg.workers = 4;
    const RunLog b = run_evolution(cfg);
    REQUIRE(a.generations.size() == b.generations.size());
    for (std::size_t i = 0; i < a.generations.size(); ++i) {
        CHECK(a.generations[i].max_fitness == b.generations[i].max_fitness);
        CHECK(a.generations[i].avg_fitness == b.generations[i].avg_fitness);
        CHECK(a.generations[i].env_independent_fitness == b.generations[i].env_independent_fitness);
        CHECK(a.generations[i].best_genome == b.generations[i].best_genome);
    }
    CHECK(a.termination == b.termination);

    cfg.master_seed = 22;
    const RunLog c = run_evolution(cfg);
    CHECK(c.generations.front().best_genome != a.generations.front().best_genome);
}

TEST_CASE("evolution log is consistent")
{
    GaConfig cfg;
    cfg.population_size = 32;
    cfg.n_nodes = 3;
    cfg.max_generations = 8;
    cfg.env_independent_every = 3;
    int seen = 0;
    const RunLog log = run_evolution(cfg, [&](const GenerationStats& g) {
        CHECK(g.generation == seen);
        ++seen;
    });
    CHECK(static_cast<int>(log.generations.size()) == seen);
    CHECK(seen <= cfg.max_generations);
    for (const auto& g : log.generations) {
        CHECK(g.avg_fitness <= g.max_fitness);
        CHECK(g.max_fitness <= 1.0);
        CHECK(g.rule_of_best == decode(g.best_genome).rule());
        if (g.generation % 3 == 0)
            CHECK(g.env_independent_fitness.has_value());
    }
}

TEST_CASE("stagnation ends a run that cannot improve")
{
    // No hidden nodes and a tiny population: the limit is reached long
    // before the generation cap.
    GaConfig cfg;
    cfg.population_size = 8;
    cfg.n_nodes = 2;
    cfg.max_generations = 500;
    cfg.stagnation_limit = 5;
    cfg.mutation_rate = 0.0;
    const RunLog log = run_evolution(cfg);
    CHECK(log.termination != Termination::Capped);
    CHECK(log.generations.size() < 500);
}

TEST_CASE("config validation names the field")
{
    const auto message = [](GaConfig c) {
        try {
            c.validate();
        } catch (const Error& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    GaConfig c;
    CHECK(message(c).empty());
    c.mutation_rate = 1.5;
    CHECK(message(c).find("mutation_rate") != std::string::npos);
    c = {};
    c.population_size = 1;
    CHECK(message(c).find("population_size") != std::string::npos);
    c = {};
    c.elite_count = c.population_size + 1;
    CHECK(message(c).find("elite_count") != std::string::npos);
    c = {};
    c.n_nodes = 1;
    CHECK(message(c).find("n_nodes") != std::string::npos);
    c = {};
    c.learnable_penalty_lambda = -1;
    CHECK(message(c).find("learnable_penalty_lambda") != std::string::npos);
}
