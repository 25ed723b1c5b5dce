#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lbnn/atlas.hpp"
#include "lbnn/ga.hpp"
#include "lbnn/genome.hpp"
#include "lbnn/network.hpp"
#include "lbnn/task.hpp"

namespace lbnn::io {

using nlohmann::json;

// {"n", "m", "rule": [4 spins], "weights": [[value, kind], ...]} with
// weights row-major (row = source, column = destination).
json to_json(const NetworkSpec& spec);
NetworkSpec network_from_json(const json& j);

json to_json(const EvalReport& report);
EvalReport report_from_json(const json& j);

json to_json(const GaConfig& config);
json to_json(const AttractorAtlas& atlas);

// Loads a network from either NetworkSpec JSON or a genome text file
// (first genome), chosen by content. Errors name the file and position.
NetworkSpec load_network(const std::filesystem::path& path, int m = 1);
NetworkSpec parse_network(const std::string& text, const std::string& source_name, int m = 1);

// fitness.csv: generation,max_fitness,avg_fitness,env_independent_fitness
struct FitnessRow {
    int generation = 0;
    double max_fitness = 0.0;
    double avg_fitness = 0.0;
    std::optional<double> env_independent_fitness;
    friend bool operator==(const FitnessRow&, const FitnessRow&) = default;
};
void write_fitness_csv(std::ostream& out, std::span<const FitnessRow> rows);
std::vector<FitnessRow> read_fitness_csv(std::istream& in);
std::vector<FitnessRow> fitness_rows(const RunLog& log);

// One row per environment: orderings, cycles, seed, errors.
void write_environment_csv(std::ostream& out, std::span<const Environment> envs,
                           std::span<const std::uint64_t> errors);

// Shortest text that parses back to the same double.
std::string format_double(double v);

json run_summary(const RunLog& log);

// Writes fitness.csv, best_genomes.txt and summary.json into dir.
void write_run_artifacts(const std::filesystem::path& dir, const RunLog& log);

// Writes atlas.json, report.txt and transitions.dot into dir.
void write_atlas_artifacts(const std::filesystem::path& dir, const AttractorAtlas& atlas);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

} // namespace lbnn::io
