#include "lbnn/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "lbnn/atlas.hpp"
#include "lbnn/exhaust.hpp"
#include "lbnn/ga.hpp"
#include "lbnn/io.hpp"
#include "lbnn/task.hpp"

namespace lbnn::cli {

namespace fs = std::filesystem;
using io::json;

std::vector<std::string> config_arguments(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open config file " + path.string());
    std::vector<std::string> args;
    std::string line;
    int line_no = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            return std::string{};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(path.string() + " line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw Error(path.string() + " line " + std::to_string(line_no) + ": empty key");
        args.push_back("--" + key + "=" + value);
    }
    return args;
}

namespace {

struct EvolveArgs {
    GaConfig ga;
    int hidden = 3;
    fs::path out = "run";
    bool quiet = false;
};

struct AnalyzeArgs {
    fs::path network;
    fs::path out = "analysis";
    int m = 1;
    int cap = default_state_cap_bits;
    std::uint64_t sample = 0;
    Seed seed = 1;
    int workers = 0;
};

struct ScoreArgs {
    fs::path network;
    int envs = 0;
    Seed seed = 1;
    int m = 1;
    std::optional<fs::path> out;
    std::optional<fs::path> env_csv;
};

struct ExhaustArgs {
    int nodes = 2;
    int workers = 0;
    std::optional<fs::path> out;
};

void ensure_directory(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw Error("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
}

int cmd_evolve(EvolveArgs a, std::ostream& out, std::ostream& err)
{
    if (a.hidden < 0)
        throw Error("invalid config value for hidden: must be >= 0");
    a.ga.n_nodes = a.hidden + 2;
    if (a.ga.n_nodes > Kernel::max_nodes)
        throw Error("invalid config value for hidden: at most " + std::to_string(Kernel::max_nodes - 2));
    a.ga.validate();
    ensure_directory(a.out);

    const RunLog log = run_evolution(a.ga, [&](const GenerationStats& g) {
        if (a.quiet)
            return;
        err << "gen " << g.generation << " max " << io::format_double(g.max_fitness) << " avg "
            << io::format_double(g.avg_fitness);
        if (g.env_independent_fitness)
            err << " env-indep " << io::format_double(*g.env_independent_fitness);
        err << " rule " << g.rule_of_best.to_string() << '\n';
    });
    io::write_run_artifacts(a.out, log);
    out << "termination: " << to_string(log.termination) << " after " << log.generations.size()
        << " generation(s); artifacts in " << a.out.string() << '\n';
    switch (log.termination) {
    case Termination::Perfect: return exit_ok;
    case Termination::Stagnated: return exit_stagnated;
    case Termination::Capped: return exit_capped;
    }
    return exit_ok;
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out)
{
    const NetworkSpec spec = io::load_network(a.network, a.m);
    const StateSpace space(spec);
    const int free_bits = space.width() - spec.m();
    if (free_bits > a.cap) {
        if (a.sample == 0)
            throw Error("state space of 2^" + std::to_string(free_bits) + " states exceeds --cap " +
                        std::to_string(a.cap) + "; pass --sample N for a partial analysis");
        ensure_directory(a.out);
        json j{{"network", io::to_json(spec)}, {"complete", false}, {"samples", a.sample}};
        for (Spin x : {Spin::Minus, Spin::Plus}) {
            const auto sampled = sample_orbits(space, space.kernel().clamp_input(x), a.sample, a.seed);
            json orbits = json::array();
            for (const auto& o : sampled.orbits) {
                json states = json::array();
                for (StateIndex s : o.states)
                    states.push_back(space.format(s));
                orbits.push_back(json{{"states", states}, {"period", o.period()}});
            }
            j["free"][std::string(1, glyph_of(x))] = json{{"orbits", orbits}};
        }
        io::write_file(a.out / "atlas.json", j.dump(2) + "\n");
        out << "partial (sampled) analysis written to " << (a.out / "atlas.json").string() << '\n';
        return exit_ok;
    }
    const AttractorAtlas atlas = classify_functions(spec, a.cap, a.workers);
    ensure_directory(a.out);
    io::write_atlas_artifacts(a.out, atlas);
    out << format_report(atlas);
    return exit_ok;
}

int cmd_score(const ScoreArgs& a, std::ostream& out)
{
    const NetworkSpec spec = io::load_network(a.network, a.m);
    std::vector<Environment> envs;
    EvalReport report;
    if (a.envs > 0) {
        Engine rng = make_stream(a.seed, "score");
        for (int i = 0; i < a.envs; ++i)
            envs.push_back(sample_environment(rng));
        report = evaluate(spec, envs, {1, a.env_csv.has_value()});
    } else if (a.env_csv) {
        envs = enumerate_all_environments();
        report = evaluate(spec, envs, {1, true});
    } else {
        report = env_independent_fitness(spec);
    }
    if (a.env_csv) {
        std::ostringstream csv;
        io::write_environment_csv(csv, envs, report.per_environment_errors);
        io::write_file(*a.env_csv, csv.str());
    }
    json j = io::to_json(report);
    j.erase("per_environment_errors");
    const std::string text = j.dump(2) + "\n";
    if (a.out)
        io::write_file(*a.out, text);
    out << text;
    return exit_ok;
}

int cmd_exhaust(const ExhaustArgs& a, std::ostream& out)
{
    const ExhaustReport r = exhaustive_search(a.nodes, a.workers);
    const std::string text = to_json(r).dump(2) + "\n";
    if (a.out)
        io::write_file(*a.out, text);
    out << text;
    return exit_ok;
}

// Replaces "--config FILE" with the file's settings, placed right after
// the subcommand so later command-line flags override them.
std::vector<std::string> expand_config(std::vector<std::string> args)
{
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::optional<std::string> path;
        std::size_t erase_count = 1;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            erase_count = 2;
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        }
        if (!path)
            continue;
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                   args.begin() + static_cast<std::ptrdiff_t>(i + erase_count));
        const auto extra = config_arguments(*path);
        const std::size_t at = args.empty() ? 0 : 1;
        args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
        return args;
    }
    return args;
}

} // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Evolve and analyse local binary neural networks", "lbnn"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    EvolveArgs ev;
    auto* evolve = app.add_subcommand("evolve", "Run the genetic algorithm");
    evolve->add_option("--seed", ev.ga.master_seed, "Master seed (falls back to LBNN_SEED)")
        ->envname("LBNN_SEED")
        ->capture_default_str();
    evolve->add_option("--population", ev.ga.population_size, "Population size")->capture_default_str();
    evolve->add_option("--hidden", ev.hidden, "Hidden node count")->capture_default_str();
    evolve->add_option("--generations", ev.ga.max_generations, "Generation cap")->capture_default_str();
    evolve->add_option("--mutation-rate", ev.ga.mutation_rate, "Per-bit flip probability")->capture_default_str();
    evolve->add_option("--elite", ev.ga.elite_count, "Genomes copied unchanged")->capture_default_str();
    evolve->add_option("--envs-per-gen", ev.ga.envs_per_generation, "Environments per generation")
        ->capture_default_str();
    evolve->add_option("--penalty-lambda", ev.ga.learnable_penalty_lambda, "Learnable-weight penalty")
        ->capture_default_str();
    evolve->add_option("--stagnation", ev.ga.stagnation_limit, "Generations without improvement before stopping")
        ->capture_default_str();
    evolve->add_option("--retest-every", ev.ga.env_independent_every,
                       "Retest the best genome over all environments every k generations")
        ->capture_default_str();
    evolve->add_option("--workers", ev.ga.workers, "Evaluation threads (0: all)")->capture_default_str();
    evolve->add_option("--out", ev.out, "Output directory")->capture_default_str();
    evolve->add_flag("--quiet", ev.quiet, "No per-generation progress");
    evolve->add_option("--config", "Flat key = value config file");

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Fixed points, basins and represented functions");
    analyze->add_option("network", an.network, "NetworkSpec JSON or genome file")->required();
    analyze->add_option("--out", an.out, "Output directory")->capture_default_str();
    analyze->add_option("--inputs", an.m, "Input node count for genome files")->capture_default_str();
    analyze->add_option("--cap", an.cap, "Largest enumerated state space, in bits")->capture_default_str();
    analyze->add_option("--sample", an.sample, "Sampled starts when over the cap");
    analyze->add_option("--seed", an.seed, "Seed for sampling")->envname("LBNN_SEED");
    analyze->add_option("--workers", an.workers, "Threads (0: all)");
    analyze->add_option("--config", "Flat key = value config file");

    ScoreArgs sc;
    auto* score = app.add_subcommand("score", "Environment-independent fitness");
    score->add_option("network", sc.network, "NetworkSpec JSON or genome file")->required();
    score->add_option("--envs", sc.envs, "Score on k sampled environments instead of all 7680");
    score->add_option("--seed", sc.seed, "Seed for sampled environments")->envname("LBNN_SEED");
    score->add_option("--inputs", sc.m, "Input node count for genome files");
    score->add_option("--out", sc.out, "Also write the report here");
    score->add_option("--env-csv", sc.env_csv, "Write per-environment errors as CSV");
    score->add_option("--config", "Flat key = value config file");

    ExhaustArgs ex;
    auto* exhaust = app.add_subcommand("exhaust", "Score every genome of a tiny network");
    exhaust->add_option("--nodes", ex.nodes, "Total node count")->capture_default_str();
    exhaust->add_option("--workers", ex.workers, "Threads (0: all)");
    exhaust->add_option("--out", ex.out, "Also write the report here");
    exhaust->add_option("--config", "Flat key = value config file");

    try {
        auto args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    } catch (const std::exception& e) {
        err << "lbnn: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        if (*evolve)
            return cmd_evolve(ev, out, err);
        if (*analyze)
            return cmd_analyze(an, out);
        if (*score)
            return cmd_score(sc, out);
        if (*exhaust)
            return cmd_exhaust(ex, out);
    } catch (const std::exception& e) {
        err << "lbnn: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}

} // namespace lbnn::cli
