#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lbnn/genome.hpp"
#include "lbnn/rng.hpp"
#include "lbnn/task.hpp"

namespace lbnn {

struct GaConfig {
    int population_size = 8192;
    int n_nodes = 5;
    double mutation_rate = 0.01;
    int elite_count = 2;
    int envs_per_generation = 5;
    int max_generations = 200;
    int stagnation_limit = 50;
    Seed master_seed = 1;
    double learnable_penalty_lambda = 0.0;
    // Retest the best genome over all environments every k generations.
    int env_independent_every = 1;
    // 0: OpenMP default.
    int workers = 0;

    // Throws lbnn::Error naming the offending field.
    void validate() const;
};

enum class Termination { Perfect, Stagnated, Capped };
std::string to_string(Termination t);

struct GenerationStats {
    int generation = 0;
    double max_fitness = 0.0;
    double avg_fitness = 0.0;
    // Unset on generations skipped by env_independent_every.
    std::optional<double> env_independent_fitness;
    std::uint64_t env_independent_errors = 0;
    std::size_t best_index = 0;
    Genome best_genome;
    LearningRule rule_of_best;
};

struct RunLog {
    GaConfig config;
    std::vector<GenerationStats> generations;
    Termination termination = Termination::Capped;
};

// Fitness-proportional draws with replacement. Fitnesses must be > 0.
class RouletteSelector {
public:
    explicit RouletteSelector(std::span<const double> fitnesses);
    std::size_t draw(Engine& rng) const;
    double probability(std::size_t i) const;
    std::size_t size() const noexcept { return cumulative_.size(); }

private:
    std::vector<double> cumulative_;
};

std::pair<Genome, Genome> select_pair(std::span<const Genome> genomes, std::span<const double> fitnesses,
                                      Engine& rng);

// child1 = a[0, cut) + b[cut, L), child2 = b[0, cut) + a[cut, L).
std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, std::size_t cutpoint);

Genome mutate(Genome g, double rate, Engine& rng);

// fitness / (1 + lambda * learnable count).
double penalized_fitness(const EvalReport& report, const NetworkSpec& spec, double lambda);

// Fitness of one genome under the shared environments.
double genome_fitness(const Genome& g, std::span<const Environment> envs, double lambda);

// Evaluates every genome. Results are written per index, so the output is
// identical for any worker count.
std::vector<double> evaluate_population(std::span<const Genome> genomes, std::span<const Environment> envs,
                                        double lambda, int workers = 0);

// Single-threaded reference for evaluate_population.
std::vector<double> evaluate_population_serial(std::span<const Genome> genomes,
                                               std::span<const Environment> envs, double lambda);

// Indices of the k best genomes, ties broken by lower index.
std::vector<std::size_t> elite_indices(std::span<const double> fitnesses, std::size_t k);

// Elites first, then mutated crossover offspring. Cutpoints and parents
// come from select_rng, bit flips from mutate_rng.
std::vector<Genome> next_generation(std::span<const Genome> genomes, std::span<const double> fitnesses,
                                    const GaConfig& config, Engine& select_rng, Engine& mutate_rng);

using GenerationCallback = std::function<void(const GenerationStats&)>;

RunLog run_evolution(const GaConfig& config, const GenerationCallback& on_generation = {});

// Named RNG streams derived from the master seed.
namespace streams {
inline constexpr const char* population = "population";
inline constexpr const char* environments = "environments";
inline constexpr const char* selection = "selection";
inline constexpr const char* mutation = "mutation";
} // namespace streams

} // namespace lbnn
