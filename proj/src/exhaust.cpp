#include "lbnn/exhaust.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lbnn/io.hpp"
#include "lbnn/task.hpp"

namespace lbnn {

namespace {

Genome genome_of(int n, std::uint64_t code)
{
    std::vector<std::uint8_t> bits(genome_length(n));
    for (std::size_t k = 0; k < bits.size(); ++k)
        bits[k] = (code >> k) & 1u;
    return Genome(n, std::move(bits));
}

std::uint64_t code_of(const Genome& g)
{
    std::uint64_t code = 0;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g[k])
            code |= std::uint64_t{1} << k;
    return code;
}

int thread_count(int workers)
{
#ifdef _OPENMP
    return workers > 0 ? workers : omp_get_max_threads();
#else
    (void)workers;
    return 1;
#endif
}

} // namespace

ExhaustReport exhaustive_search(int n, int workers)
{
    const std::size_t bits = genome_length(n);
    if (bits > static_cast<std::size_t>(max_exhaust_bits))
        throw Error("n=" + std::to_string(n) + " needs 2^" + std::to_string(bits) +
                    " genomes; exhaustive search is limited to 2^" + std::to_string(max_exhaust_bits));
    const std::uint64_t total = std::uint64_t{1} << bits;
    const int threads = thread_count(workers);

    std::vector<std::uint64_t> canonical(total);
    const auto signed_total = static_cast<std::ptrdiff_t>(total);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::ptrdiff_t c = 0; c < signed_total; ++c)
        canonical[static_cast<std::size_t>(c)] = code_of(encode(decode(genome_of(n, static_cast<std::uint64_t>(c)))));
    std::sort(canonical.begin(), canonical.end());
    canonical.erase(std::unique(canonical.begin(), canonical.end()), canonical.end());

    const Environment prefilter_env = enumerate_all_environments(1).front();
    const auto seeds = default_init_seeds();
    const auto count = static_cast<std::ptrdiff_t>(canonical.size());
    std::vector<std::uint64_t> errors(canonical.size());
    std::vector<std::uint8_t> survived(canonical.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const NetworkSpec spec = decode(genome_of(n, canonical[static_cast<std::size_t>(i)]));
        survived[static_cast<std::size_t>(i)] = evaluate(spec, std::span(&prefilter_env, 1)).perfect();
        errors[static_cast<std::size_t>(i)] = env_independent_fitness(spec, seeds).errors;
    }

    ExhaustReport r;
    r.n = n;
    r.genomes_enumerated = total;
    r.distinct_phenotypes = canonical.size();
    std::size_t best = 0;
    for (std::size_t i = 0; i < canonical.size(); ++i) {
        r.prefilter_survivors += survived[i];
        r.perfect_count += errors[i] == 0;
        if (errors[i] < errors[best])
            best = i;
    }
    r.best_errors = errors[best];
    r.best_fitness = fitness_of(r.best_errors).value();
    r.witness = genome_of(n, canonical[best]);
    r.hebb_witness = decode(r.witness).rule() == hebb_rule();
    return r;
}

nlohmann::json to_json(const ExhaustReport& r)
{
    return nlohmann::json{{"n", r.n},
                          {"genomes_enumerated", r.genomes_enumerated},
                          {"distinct_phenotypes", r.distinct_phenotypes},
                          {"prefilter_survivors", r.prefilter_survivors},
                          {"perfect_count", r.perfect_count},
                          {"any_perfect", r.perfect_count > 0},
                          {"best_errors", r.best_errors},
                          {"best_fitness", r.best_fitness},
                          {"witness_genome", r.witness.to_string()},
                          {"witness_rule", decode(r.witness).rule().to_string()},
                          {"witness_network", io::to_json(decode(r.witness))}};
}

} // namespace lbnn
