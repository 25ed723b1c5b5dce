#pragma once

#include <cstdint>

#include <json.hpp>

#include "lbnn/genome.hpp"

namespace lbnn {

struct ExhaustReport {
    int n = 0;
    std::uint64_t genomes_enumerated = 0;
    // Genomes collapse onto canonical encodings (don't-care bits zeroed).
    std::uint64_t distinct_phenotypes = 0;
    // Phenotypes with zero errors on the single prefilter environment.
    std::uint64_t prefilter_survivors = 0;
    std::uint64_t perfect_count = 0;
    std::uint64_t best_errors = 0;
    double best_fitness = 0.0;
    // Smallest canonical genome achieving best_errors.
    Genome witness;
    bool hebb_witness = false;
};

inline constexpr int max_exhaust_bits = 24;

// Scores every genome of an n-node network over all environments.
// Throws if 2^(3n^2+4) exceeds 2^max_exhaust_bits.
ExhaustReport exhaustive_search(int n, int workers = 0);

nlohmann::json to_json(const ExhaustReport& r);

} // namespace lbnn
