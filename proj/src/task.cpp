#include "lbnn/task.hpp"

#include <algorithm>

namespace lbnn {

std::string name_of(BoolFn f) { return "f" + std::to_string(index_of(f)); }

void Environment::validate() const
{
    if (learn_cycles < min_learn_cycles || learn_cycles > max_learn_cycles)
        throw Error("learn_cycles must be in [4, 8], got " + std::to_string(learn_cycles));
    auto sorted = function_order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != all_functions)
        throw Error("function_order must be a permutation of f0..f3");
}

NetworkState train_function(const NetworkSpec& spec, NetworkState state, BoolFn f, const Environment& env,
                            int epochs)
{
    check_state(spec, state);
    return train_on(ReferenceSim(spec), std::move(state), f, env, epochs);
}

int test_function(const NetworkSpec& spec, NetworkState state, BoolFn f, const Environment& env)
{
    check_state(spec, state);
    return test_on(ReferenceSim(spec), std::move(state), f, env);
}

EvalReport evaluate_reference(const NetworkSpec& spec, std::span<const Environment> envs, const EvalOptions& opts)
{
    if (envs.empty())
        throw Error("evaluate needs at least one environment");
    return evaluate_with(ReferenceSim(spec), envs, opts);
}

EvalReport evaluate(const NetworkSpec& spec, std::span<const Environment> envs, const EvalOptions& opts)
{
    if (envs.empty())
        throw Error("evaluate needs at least one environment");
    if (spec.n() <= Kernel::max_nodes)
        return evaluate_with(PackedSim(spec), envs, opts);
    return evaluate_with(ReferenceSim(spec), envs, opts);
}

std::vector<Seed> default_init_seeds(int count)
{
    std::vector<Seed> seeds;
    for (int i = 0; i < count; ++i)
        seeds.push_back(derive_seed(default_init_seed_base, static_cast<std::uint64_t>(i)));
    return seeds;
}

const std::vector<std::array<BoolFn, 4>>& function_orders()
{
    static const auto orders = [] {
        std::vector<std::array<BoolFn, 4>> out;
        auto p = all_functions;
        do {
            out.push_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
        return out;
    }();
    return orders;
}

std::vector<Environment> enumerate_all_environments(std::span<const Seed> init_seeds)
{
    std::vector<Environment> out;
    out.reserve(init_seeds.size() * 24 * 2 * 2 * 5);
    for (Seed seed : init_seeds)
        for (const auto& order : function_orders())
            for (auto train : {PairOrder::MinusFirst, PairOrder::PlusFirst})
                for (auto test : {PairOrder::MinusFirst, PairOrder::PlusFirst})
                    for (int cycles = min_learn_cycles; cycles <= max_learn_cycles; ++cycles)
                        out.push_back(Environment{order, train, test, cycles, seed});
    return out;
}

std::vector<Environment> enumerate_all_environments(int init_seed_count)
{
    const auto seeds = default_init_seeds(init_seed_count);
    return enumerate_all_environments(seeds);
}

namespace {

template <class Sim>
EvalReport factored_env_independent(const Sim& sim, std::span<const Seed> init_seeds)
{
    const auto orders = static_cast<std::uint64_t>(function_orders().size());
    EvalReport report;
    for (Seed seed : init_seeds) {
        for (BoolFn f : all_functions) {
            const auto start = sim.random_state(function_seed(seed, f));
            for (auto train : {PairOrder::MinusFirst, PairOrder::PlusFirst}) {
                for (int cycles = min_learn_cycles; cycles <= max_learn_cycles; ++cycles) {
                    Environment env{all_functions, train, PairOrder::MinusFirst, cycles, seed};
                    const auto trained = train_on(sim, start, f, env);
                    for (auto test : {PairOrder::MinusFirst, PairOrder::PlusFirst}) {
                        env.test_order = test;
                        const auto e = static_cast<std::uint64_t>(test_on(sim, trained, f, env)) * orders;
                        report.per_function_errors[static_cast<std::size_t>(index_of(f))] += e;
                        report.errors += e;
                    }
                }
            }
        }
    }
    report.env_count = init_seeds.size() * orders * 2 * 2 * 5;
    return report;
}

} // namespace

EvalReport env_independent_fitness(const NetworkSpec& spec, std::span<const Seed> init_seeds)
{
    if (spec.n() <= Kernel::max_nodes)
        return factored_env_independent(PackedSim(spec), init_seeds);
    return factored_env_independent(ReferenceSim(spec), init_seeds);
}

EvalReport env_independent_fitness(const NetworkSpec& spec)
{
    static const auto seeds = default_init_seeds();
    return env_independent_fitness(spec, seeds);
}

Environment sample_environment(Engine& rng)
{
    Environment env;
    env.function_order = function_orders()[draw_below(rng, function_orders().size())];
    env.train_order = draw_bit(rng) ? PairOrder::PlusFirst : PairOrder::MinusFirst;
    env.test_order = draw_bit(rng) ? PairOrder::PlusFirst : PairOrder::MinusFirst;
    env.learn_cycles = min_learn_cycles + static_cast<int>(draw_below(rng, max_learn_cycles - min_learn_cycles + 1));
    env.init_seed = rng();
    return env;
}

std::string to_string(const Environment& env)
{
    std::string s;
    for (BoolFn f : env.function_order)
        s += static_cast<char>('0' + index_of(f));
    s += env.train_order == PairOrder::PlusFirst ? " train+-" : " train-+";
    s += env.test_order == PairOrder::PlusFirst ? " test+-" : " test-+";
    s += " cycles=" + std::to_string(env.learn_cycles);
    return s;
}

} // namespace lbnn
