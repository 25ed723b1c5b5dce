#include "lbnn/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace lbnn::io {

namespace {

int spin_value(const json& v, const std::string& where)
{
    if (!v.is_number_integer())
        throw Error(where + ": expected an integer");
    const int x = v.get<int>();
    if (x != 1 && x != -1)
        throw Error(where + ": expected +1 or -1, got " + std::to_string(x));
    return x;
}

std::string kind_name(WeightKind k)
{
    switch (k) {
    case WeightKind::Absent: return "absent";
    case WeightKind::Fixed: return "fixed";
    case WeightKind::Learnable: return "learnable";
    }
    return "absent";
}

json orbit_analysis_json(const StateSpace& space, const OrbitAnalysis& a, bool with_members)
{
    json orbits = json::array();
    std::vector<std::vector<StateIndex>> members;
    if (with_members && a.complete) {
        members.resize(a.orbits.size());
        for (std::uint64_t c = 0; c < a.basins.state_count(); ++c) {
            const StateIndex s = a.basins.state_at(c);
            members[a.basins.orbit_of(s)].push_back(s);
        }
    }
    for (std::size_t i = 0; i < a.orbits.size(); ++i) {
        const Orbit& o = a.orbits[i];
        json states = json::array();
        for (StateIndex s : o.states)
            states.push_back(space.format(s));
        json entry{{"states", states}, {"period", o.period()}};
        const auto out = o.constant_output(space);
        entry["output"] = out ? json(value_of(*out)) : json(nullptr);
        if (a.complete) {
            entry["basin_size"] = a.basin_sizes[i];
            entry["max_transient"] = a.max_transient[i];
        }
        if (!members.empty()) {
            json basin = json::array();
            for (StateIndex s : members[i])
                basin.push_back(space.format(s));
            entry["basin"] = basin;
        }
        orbits.push_back(entry);
    }
    return json{{"complete", a.complete}, {"state_count", a.complete ? a.basins.state_count() : 0},
                {"orbits", orbits}};
}

} // namespace

json to_json(const NetworkSpec& spec)
{
    json rule = json::array();
    for (Spin s : spec.rule().table)
        rule.push_back(value_of(s));
    json weights = json::array();
    for (const auto& c : spec.weights())
        weights.push_back(json::array({c.value(), kind_name(c.kind)}));
    return json{{"n", spec.n()}, {"m", spec.m()}, {"rule", rule}, {"weights", weights}};
}

NetworkSpec network_from_json(const json& j)
{
    if (!j.is_object())
        throw Error("network document must be a JSON object");
    for (const char* key : {"n", "rule", "weights"})
        if (!j.contains(key))
            throw Error(std::string("network document is missing \"") + key + "\"");
    if (!j["n"].is_number_integer())
        throw Error("\"n\" must be an integer");
    const int n = j["n"].get<int>();
    const int m = j.contains("m") ? j["m"].get<int>() : 1;
    if (n < 2 || n > 64)
        throw Error("\"n\" must be in [2, 64]");

    const json& rule_j = j["rule"];
    if (!rule_j.is_array() || rule_j.size() != 4)
        throw Error("\"rule\" must be an array of 4 spins");
    LearningRule rule;
    for (std::size_t k = 0; k < 4; ++k)
        rule.table[k] = spin_of(spin_value(rule_j[k], "rule[" + std::to_string(k) + "]") > 0);

    const json& w = j["weights"];
    const auto cells = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    if (!w.is_array() || w.size() != cells)
        throw Error("\"weights\" must be an array of n*n = " + std::to_string(cells) + " [value, kind] pairs");
    std::vector<WeightCell> weights(cells);
    for (std::size_t k = 0; k < cells; ++k) {
        const std::string where = "weights[" + std::to_string(k) + "]";
        const json& cell = w[k];
        if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number_integer() || !cell[1].is_string())
            throw Error(where + ": expected [value, kind]");
        const int value = cell[0].get<int>();
        const std::string kind = cell[1].get<std::string>();
        if (kind == "absent") {
            if (value != 0)
                throw Error(where + ": absent cells must have value 0");
            weights[k] = WeightCell::absent();
        } else if (kind == "fixed") {
            weights[k] = WeightCell::fixed(spin_of(spin_value(cell[0], where) > 0));
        } else if (kind == "learnable") {
            spin_value(cell[0], where);
            weights[k] = WeightCell::learnable();
        } else {
            throw Error(where + ": unknown kind \"" + kind + "\"");
        }
    }
    return NetworkSpec(n, m, std::move(weights), rule);
}

json to_json(const EvalReport& report)
{
    json j{{"errors", report.errors},
           {"fitness", report.fitness().value()},
           {"fitness_numerator", report.fitness().numerator},
           {"fitness_denominator", report.fitness().denominator},
           {"per_function_errors", report.per_function_errors},
           {"env_count", report.env_count},
           {"perfect", report.perfect()}};
    if (!report.per_environment_errors.empty())
        j["per_environment_errors"] = report.per_environment_errors;
    return j;
}

EvalReport report_from_json(const json& j)
{
    EvalReport r;
    r.errors = j.at("errors").get<std::uint64_t>();
    r.per_function_errors = j.at("per_function_errors").get<std::array<std::uint64_t, 4>>();
    r.env_count = j.at("env_count").get<std::uint64_t>();
    if (j.contains("per_environment_errors"))
        r.per_environment_errors = j["per_environment_errors"].get<std::vector<std::uint64_t>>();
    return r;
}

json to_json(const GaConfig& c)
{
    return json{{"population_size", c.population_size},
                {"n_nodes", c.n_nodes},
                {"mutation_rate", c.mutation_rate},
                {"elite_count", c.elite_count},
                {"envs_per_generation", c.envs_per_generation},
                {"max_generations", c.max_generations},
                {"stagnation_limit", c.stagnation_limit},
                {"master_seed", c.master_seed},
                {"learnable_penalty_lambda", c.learnable_penalty_lambda},
                {"env_independent_every", c.env_independent_every}};
}

json to_json(const AttractorAtlas& atlas)
{
    const auto& space = atlas.space;
    const bool members = space.width() <= 12;
    json free{{"0", orbit_analysis_json(space, atlas.free[0], members)},
              {"1", orbit_analysis_json(space, atlas.free[1], members)}};
    json clamped;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            clamped[std::to_string(x) + std::to_string(y)] =
                orbit_analysis_json(space, atlas.clamped[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)],
                                    false);

    json pairings = json::array();
    for (const auto& p : atlas.pairings) {
        json e{{"input_plus", space.format(atlas.free[1].orbits[p.plus_orbit].head())},
               {"input_minus", space.format(atlas.free[0].orbits[p.minus_orbit].head())},
               {"plus_orbit", p.plus_orbit},
               {"minus_orbit", p.minus_orbit}};
        e["function"] = p.function ? json(name_of(*p.function)) : json(nullptr);
        pairings.push_back(e);
    }
    json unpaired = json::array();
    for (const auto& u : atlas.unpaired) {
        json e{{"input", value_of(u.input)}, {"orbit", u.orbit}};
        e["target"] = u.target ? json(*u.target) : json(nullptr);
        unpaired.push_back(e);
    }
    json releases = json::array();
    for (const auto& r : atlas.releases)
        releases.push_back(json{{"input", value_of(r.input)},
                                {"output", value_of(r.output)},
                                {"clamped_state", space.format(atlas.clamped_for(r.input, r.output).orbits[r.clamped_orbit].head())},
                                {"released_to", space.format(atlas.free_for(r.input).orbits[r.free_orbit].head())}});
    json functions;
    const auto counts = atlas.function_counts();
    for (BoolFn f : all_functions)
        functions[name_of(f)] = counts[static_cast<std::size_t>(index_of(f))];

    return json{{"network", to_json(space.spec())},
                {"state_width", space.width()},
                {"state_layout", "input,output,hidden...,learnable..."},
                {"free", free},
                {"clamped", clamped},
                {"pairings", pairings},
                {"unpaired", unpaired},
                {"releases", releases},
                {"functions", functions},
                {"covers_all_functions_once", atlas.covers_all_functions_once()},
                {"periodic_points", atlas.periodic_point_count()}};
}

NetworkSpec parse_network(const std::string& text, const std::string& source_name, int m)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        throw Error(source_name + ": empty network file");
    if (text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw Error(source_name + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
        }
        try {
            // An evolve summary.json carries the best network under "best".
            if (j.is_object() && j.contains("best") && j["best"].contains("network"))
                return network_from_json(j["best"]["network"]);
            return network_from_json(j);
        } catch (const std::exception& e) {
            throw Error(source_name + ": " + e.what());
        }
    }
    std::istringstream in(text);
    try {
        const GenomeFile file = read_genome_file(in);
        return decode(file.genomes.front(), m);
    } catch (const Error& e) {
        throw Error(source_name + ": " + e.what());
    }
}

NetworkSpec load_network(const std::filesystem::path& path, int m)
{
    return parse_network(read_file(path), path.string(), m);
}

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_fitness_csv(std::ostream& out, std::span<const FitnessRow> rows)
{
    out << "generation,max_fitness,avg_fitness,env_independent_fitness\n";
    for (const auto& r : rows) {
        out << r.generation << ',' << format_double(r.max_fitness) << ',' << format_double(r.avg_fitness) << ',';
        if (r.env_independent_fitness)
            out << format_double(*r.env_independent_fitness);
        out << '\n';
    }
}

std::vector<FitnessRow> read_fitness_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != "generation,max_fitness,avg_fitness,env_independent_fitness")
        throw Error("fitness.csv: missing or wrong header");
    std::vector<FitnessRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::vector<std::string> fields;
        std::size_t pos = 0;
        for (;;) {
            const auto comma = line.find(',', pos);
            fields.push_back(line.substr(pos, comma - pos));
            if (comma == std::string::npos)
                break;
            pos = comma + 1;
        }
        if (fields.size() != 4)
            throw Error("fitness.csv line " + std::to_string(line_no) + ": expected 4 columns");
        auto num = [&](const std::string& s) {
            double v = 0.0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc() || res.ptr != s.data() + s.size())
                throw Error("fitness.csv line " + std::to_string(line_no) + ": bad number \"" + s + "\"");
            return v;
        };
        FitnessRow r;
        r.generation = static_cast<int>(num(fields[0]));
        r.max_fitness = num(fields[1]);
        r.avg_fitness = num(fields[2]);
        if (!fields[3].empty())
            r.env_independent_fitness = num(fields[3]);
        rows.push_back(r);
    }
    return rows;
}

std::vector<FitnessRow> fitness_rows(const RunLog& log)
{
    std::vector<FitnessRow> rows;
    for (const auto& g : log.generations)
        rows.push_back({g.generation, g.max_fitness, g.avg_fitness, g.env_independent_fitness});
    return rows;
}

void write_environment_csv(std::ostream& out, std::span<const Environment> envs,
                           std::span<const std::uint64_t> errors)
{
    out << "function_order,train_order,test_order,learn_cycles,init_seed,errors\n";
    for (std::size_t i = 0; i < envs.size(); ++i) {
        const Environment& e = envs[i];
        for (BoolFn f : e.function_order)
            out << name_of(f);
        out << ',' << (e.train_order == PairOrder::PlusFirst ? "+-" : "-+") << ','
            << (e.test_order == PairOrder::PlusFirst ? "+-" : "-+") << ',' << e.learn_cycles << ','
            << e.init_seed << ',';
        if (i < errors.size())
            out << errors[i];
        out << '\n';
    }
}

json run_summary(const RunLog& log)
{
    json j{{"termination", to_string(log.termination)},
           {"generations", log.generations.size()},
           {"config", to_json(log.config)}};
    if (log.generations.empty())
        return j;

    // The final generation's best genome on a perfect run; otherwise the
    // earliest generation with the highest environment-independent score.
    const GenerationStats* best = &log.generations.back();
    if (log.termination != Termination::Perfect) {
        for (const auto& g : log.generations)
            if (g.env_independent_fitness &&
                (!best->env_independent_fitness || *g.env_independent_fitness > *best->env_independent_fitness ||
                 (*g.env_independent_fitness == *best->env_independent_fitness && g.generation < best->generation)))
                best = &g;
    }
    const NetworkSpec spec = decode(best->best_genome);
    json b{{"generation", best->generation},
           {"genome", best->best_genome.to_string()},
           {"max_fitness", best->max_fitness},
           {"rule", spec.rule().to_string()},
           {"rule_is_hebb", spec.rule() == hebb_rule()},
           {"learnable_count", spec.learnable_count()},
           {"network", to_json(spec)}};
    b["env_independent_fitness"] = best->env_independent_fitness ? json(*best->env_independent_fitness) : json(nullptr);
    b["env_independent_errors"] = best->env_independent_errors;
    j["best"] = b;
    return j;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write " + path.string());
    out << content;
    if (!out)
        throw Error("failed writing " + path.string());
}

void write_run_artifacts(const std::filesystem::path& dir, const RunLog& log)
{
    std::ostringstream csv;
    const auto rows = fitness_rows(log);
    write_fitness_csv(csv, rows);
    write_file(dir / "fitness.csv", csv.str());

    GenomeFile genomes{log.config.n_nodes, {}};
    for (const auto& g : log.generations)
        genomes.genomes.push_back(g.best_genome);
    std::ostringstream gf;
    write_genome_file(gf, genomes);
    write_file(dir / "best_genomes.txt", gf.str());

    write_file(dir / "summary.json", run_summary(log).dump(2) + "\n");
}

void write_atlas_artifacts(const std::filesystem::path& dir, const AttractorAtlas& atlas)
{
    write_file(dir / "atlas.json", to_json(atlas).dump(2) + "\n");
    write_file(dir / "report.txt", format_report(atlas));
    write_file(dir / "transitions.dot", export_transition_diagram(atlas));
}

} // namespace lbnn::io
