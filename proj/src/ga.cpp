#include "lbnn/ga.hpp"

#include <algorithm>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lbnn {

void GaConfig::validate() const
{
    auto fail = [](const std::string& field, const std::string& why) {
        throw Error("invalid config value for " + field + ": " + why);
    };
    if (population_size < 2 || population_size % 2 != 0)
        fail("population_size", "must be even and >= 2");
    if (elite_count < 0 || population_size < 2 * elite_count)
        fail("elite_count", "must be >= 0 and at most population_size / 2");
    if (n_nodes < 2)
        fail("n_nodes", "must be >= 2");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
        fail("mutation_rate", "must be in [0, 1]");
    if (envs_per_generation < 1)
        fail("envs_per_generation", "must be >= 1");
    if (max_generations < 1)
        fail("max_generations", "must be >= 1");
    if (stagnation_limit < 1)
        fail("stagnation_limit", "must be >= 1");
    if (!(learnable_penalty_lambda >= 0.0))
        fail("learnable_penalty_lambda", "must be >= 0");
    if (env_independent_every < 1)
        fail("env_independent_every", "must be >= 1");
    if (workers < 0)
        fail("workers", "must be >= 0");
}

std::string to_string(Termination t)
{
    switch (t) {
    case Termination::Perfect: return "perfect";
    case Termination::Stagnated: return "stagnated";
    case Termination::Capped: return "capped";
    }
    return "unknown";
}

RouletteSelector::RouletteSelector(std::span<const double> fitnesses)
{
    if (fitnesses.empty())
        throw Error("cannot select from an empty population");
    cumulative_.reserve(fitnesses.size());
    double total = 0.0;
    for (double f : fitnesses) {
        if (!(f > 0.0))
            throw Error("selection requires strictly positive fitness");
        total += f;
        cumulative_.push_back(total);
    }
}

std::size_t RouletteSelector::draw(Engine& rng) const
{
    const double r = draw_unit(rng) * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    return std::min(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
}

double RouletteSelector::probability(std::size_t i) const
{
    const double lo = i == 0 ? 0.0 : cumulative_[i - 1];
    return (cumulative_.at(i) - lo) / cumulative_.back();
}

std::pair<Genome, Genome> select_pair(std::span<const Genome> genomes, std::span<const double> fitnesses,
                                      Engine& rng)
{
    if (genomes.empty())
        throw Error("cannot select from an empty population");
    if (genomes.size() != fitnesses.size())
        throw Error("genome and fitness counts differ");
    const RouletteSelector sel(fitnesses);
    const auto a = sel.draw(rng);
    const auto b = sel.draw(rng);
    return {genomes[a], genomes[b]};
}

std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, std::size_t cutpoint)
{
    if (a.size() != b.size() || a.n() != b.n())
        throw Error("crossover parents differ in length");
    if (cutpoint > a.size())
        throw Error("crossover cutpoint beyond genome length");
    std::vector<std::uint8_t> c1 = a.bits();
    std::vector<std::uint8_t> c2 = b.bits();
    std::copy(b.bits().begin() + static_cast<std::ptrdiff_t>(cutpoint), b.bits().end(),
              c1.begin() + static_cast<std::ptrdiff_t>(cutpoint));
    std::copy(a.bits().begin() + static_cast<std::ptrdiff_t>(cutpoint), a.bits().end(),
              c2.begin() + static_cast<std::ptrdiff_t>(cutpoint));
    return {Genome(a.n(), std::move(c1)), Genome(a.n(), std::move(c2))};
}

Genome mutate(Genome g, double rate, Engine& rng)
{
    if (!(rate >= 0.0 && rate <= 1.0))
        throw Error("mutation rate must be in [0, 1]");
    for (std::size_t i = 0; i < g.size(); ++i)
        if (draw_unit(rng) < rate)
            g.flip(i);
    return g;
}

double penalized_fitness(const EvalReport& report, const NetworkSpec& spec, double lambda)
{
    if (!(lambda >= 0.0))
        throw Error("penalty lambda must be >= 0");
    const double f = report.fitness().value();
    if (lambda == 0.0)
        return f;
    return f / (1.0 + lambda * spec.learnable_count());
}

double genome_fitness(const Genome& g, std::span<const Environment> envs, double lambda)
{
    const NetworkSpec spec = decode(g);
    return penalized_fitness(evaluate(spec, envs), spec, lambda);
}

std::vector<double> evaluate_population_serial(std::span<const Genome> genomes,
                                               std::span<const Environment> envs, double lambda)
{
    std::vector<double> out;
    out.reserve(genomes.size());
    for (const Genome& g : genomes)
        out.push_back(genome_fitness(g, envs, lambda));
    return out;
}

std::vector<double> evaluate_population(std::span<const Genome> genomes, std::span<const Environment> envs,
                                        double lambda, int workers)
{
    std::vector<double> out(genomes.size());
    const auto count = static_cast<std::ptrdiff_t>(genomes.size());
#ifdef _OPENMP
    const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 32) num_threads(threads)
#else
    (void)workers;
#endif
    for (std::ptrdiff_t i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = genome_fitness(genomes[static_cast<std::size_t>(i)], envs, lambda);
    return out;
}

std::vector<std::size_t> elite_indices(std::span<const double> fitnesses, std::size_t k)
{
    std::vector<std::size_t> idx(fitnesses.size());
    std::iota(idx.begin(), idx.end(), 0);
    k = std::min(k, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (fitnesses[a] != fitnesses[b])
                              return fitnesses[a] > fitnesses[b];
                          return a < b;
                      });
    idx.resize(k);
    return idx;
}

std::vector<Genome> next_generation(std::span<const Genome> genomes, std::span<const double> fitnesses,
                                    const GaConfig& config, Engine& select_rng, Engine& mutate_rng)
{
    if (genomes.size() != static_cast<std::size_t>(config.population_size))
        throw Error("population size does not match config");
    if (fitnesses.size() != genomes.size())
        throw Error("genome and fitness counts differ");

    std::vector<Genome> next;
    next.reserve(genomes.size());
    for (std::size_t i : elite_indices(fitnesses, static_cast<std::size_t>(config.elite_count)))
        next.push_back(genomes[i]);

    const RouletteSelector sel(fitnesses);
    const std::size_t length = genomes.front().size();
    while (next.size() < genomes.size()) {
        const Genome& a = genomes[sel.draw(select_rng)];
        const Genome& b = genomes[sel.draw(select_rng)];
        const std::size_t cut = 1 + draw_below(select_rng, length - 1);
        auto [c1, c2] = crossover(a, b, cut);
        next.push_back(mutate(std::move(c1), config.mutation_rate, mutate_rng));
        if (next.size() < genomes.size())
            next.push_back(mutate(std::move(c2), config.mutation_rate, mutate_rng));
    }
    return next;
}

RunLog run_evolution(const GaConfig& config, const GenerationCallback& on_generation)
{
    config.validate();
    RunLog log;
    log.config = config;

    Engine population_rng = make_stream(config.master_seed, streams::population);
    Engine env_rng = make_stream(config.master_seed, streams::environments);
    Engine select_rng = make_stream(config.master_seed, streams::selection);
    Engine mutate_rng = make_stream(config.master_seed, streams::mutation);

    std::vector<Genome> population;
    population.reserve(static_cast<std::size_t>(config.population_size));
    for (int i = 0; i < config.population_size; ++i)
        population.push_back(random_genome(config.n_nodes, population_rng));

    double best_max = -1.0;
    double best_env_independent = -1.0;
    int since_improvement = 0;

    for (int gen = 0; gen < config.max_generations; ++gen) {
        std::vector<Environment> envs;
        for (int e = 0; e < config.envs_per_generation; ++e)
            envs.push_back(sample_environment(env_rng));

        const auto fitness =
            evaluate_population(population, envs, config.learnable_penalty_lambda, config.workers);

        GenerationStats stats;
        stats.generation = gen;
        stats.best_index = elite_indices(fitness, 1).front();
        stats.max_fitness = fitness[stats.best_index];
        stats.avg_fitness = std::accumulate(fitness.begin(), fitness.end(), 0.0) / static_cast<double>(fitness.size());
        stats.best_genome = population[stats.best_index];
        const NetworkSpec best = decode(stats.best_genome);
        stats.rule_of_best = best.rule();

        bool improved = false;
        if (stats.max_fitness > best_max) {
            best_max = stats.max_fitness;
            improved = true;
        }
        bool perfect = false;
        if (gen % config.env_independent_every == 0) {
            const EvalReport report = env_independent_fitness(best);
            stats.env_independent_fitness = report.fitness().value();
            stats.env_independent_errors = report.errors;
            perfect = report.perfect();
            if (*stats.env_independent_fitness > best_env_independent) {
                best_env_independent = *stats.env_independent_fitness;
                improved = true;
            }
        }
        since_improvement = improved ? 0 : since_improvement + 1;

        log.generations.push_back(stats);
        if (on_generation)
            on_generation(stats);

        if (perfect) {
            log.termination = Termination::Perfect;
            return log;
        }
        if (since_improvement >= config.stagnation_limit) {
            log.termination = Termination::Stagnated;
            return log;
        }
        if (gen + 1 < config.max_generations)
            population = next_generation(population, fitness, config, select_rng, mutate_rng);
    }
    log.termination = Termination::Capped;
    return log;
}

} // namespace lbnn
