#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lbnn/kernel.hpp"
#include "lbnn/network.hpp"
#include "lbnn/rng.hpp"

namespace lbnn {

// The four boolean functions of one variable.
enum class BoolFn : std::uint8_t { F0 = 0, F1 = 1, F2 = 2, F3 = 3 };

inline constexpr std::array<BoolFn, 4> all_functions{BoolFn::F0, BoolFn::F1, BoolFn::F2, BoolFn::F3};

constexpr Spin apply(BoolFn f, Spin x) noexcept
{
    switch (f) {
    case BoolFn::F0: return Spin::Minus;
    case BoolFn::F1: return x;
    case BoolFn::F2: return -x;
    case BoolFn::F3: return Spin::Plus;
    }
    return Spin::Minus;
}

constexpr int index_of(BoolFn f) noexcept { return static_cast<int>(f); }
std::string name_of(BoolFn f);

// The function with the given outputs at x = +1 and x = -1.
constexpr BoolFn function_from_outputs(Spin at_plus, Spin at_minus) noexcept
{
    if (at_plus == Spin::Plus)
        return at_minus == Spin::Plus ? BoolFn::F3 : BoolFn::F1;
    return at_minus == Spin::Plus ? BoolFn::F2 : BoolFn::F0;
}

// Order in which the two inputs are presented.
enum class PairOrder : std::uint8_t { MinusFirst = 0, PlusFirst = 1 };

constexpr std::array<Spin, 2> inputs_of(PairOrder o) noexcept
{
    return o == PairOrder::MinusFirst ? std::array{Spin::Minus, Spin::Plus} : std::array{Spin::Plus, Spin::Minus};
}

inline constexpr int min_learn_cycles = 4;
inline constexpr int max_learn_cycles = 8;
inline constexpr int test_settle_steps = 4;
inline constexpr int test_record_steps = 4;
inline constexpr int max_errors_per_function = 2 * test_record_steps;
inline constexpr int max_errors_per_environment = 4 * max_errors_per_function;

struct Environment {
    std::array<BoolFn, 4> function_order = all_functions;
    PairOrder train_order = PairOrder::MinusFirst;
    PairOrder test_order = PairOrder::MinusFirst;
    int learn_cycles = min_learn_cycles;
    Seed init_seed = 0;

    void validate() const;
    friend bool operator==(const Environment&, const Environment&) = default;
};

// Seed for the state initialised before training on `f`.
constexpr Seed function_seed(Seed init_seed, BoolFn f) noexcept
{
    return derive_seed(init_seed, 0x1000 + static_cast<std::uint64_t>(index_of(f)));
}

struct Fitness {
    std::uint64_t numerator = 1;
    std::uint64_t denominator = 1;

    double value() const noexcept { return static_cast<double>(numerator) / static_cast<double>(denominator); }
    friend constexpr bool operator==(const Fitness&, const Fitness&) = default;
};

// 1 / (1 + N).
constexpr Fitness fitness_of(std::uint64_t errors) noexcept { return Fitness{1, 1 + errors}; }

struct EvalReport {
    std::uint64_t errors = 0;
    std::array<std::uint64_t, 4> per_function_errors{};
    std::uint64_t env_count = 0;
    // Filled only when requested.
    std::vector<std::uint64_t> per_environment_errors;

    Fitness fitness() const noexcept { return fitness_of(errors); }
    bool perfect() const noexcept { return errors == 0; }
};

struct EvalOptions {
    int epochs = 1;
    bool record_per_environment = false;
};

// ---------------------------------------------------------------------
// Protocol, generic over the simulator. A simulator exposes State,
// Clamp, step, output, random_state, clamp_input, clamp_input_output.

template <class Sim>
typename Sim::State train_on(const Sim& sim, typename Sim::State state, BoolFn f, const Environment& env,
                             int epochs = 1)
{
    for (int e = 0; e < epochs; ++e) {
        for (Spin x : inputs_of(env.train_order)) {
            const auto clamp = sim.clamp_input_output(x, apply(f, x));
            for (int c = 0; c < env.learn_cycles; ++c)
                state = sim.step(state, clamp);
        }
    }
    return state;
}

template <class Sim>
int test_on(const Sim& sim, typename Sim::State state, BoolFn f, const Environment& env)
{
    int errors = 0;
    for (Spin x : inputs_of(env.test_order)) {
        const auto clamp = sim.clamp_input(x);
        for (int c = 0; c < test_settle_steps; ++c)
            state = sim.step(state, clamp);
        const Spin want = apply(f, x);
        for (int c = 0; c < test_record_steps; ++c) {
            state = sim.step(state, clamp);
            errors += sim.output(state) != want;
        }
    }
    return errors;
}

template <class Sim>
int errors_for_function(const Sim& sim, BoolFn f, const Environment& env, int epochs = 1)
{
    auto state = sim.random_state(function_seed(env.init_seed, f));
    state = train_on(sim, state, f, env, epochs);
    return test_on(sim, state, f, env);
}

template <class Sim>
EvalReport evaluate_with(const Sim& sim, std::span<const Environment> envs, const EvalOptions& opts = {})
{
    EvalReport report;
    report.env_count = envs.size();
    if (opts.record_per_environment)
        report.per_environment_errors.reserve(envs.size());
    for (const Environment& env : envs) {
        std::uint64_t env_errors = 0;
        for (BoolFn f : env.function_order) {
            const auto e = static_cast<std::uint64_t>(errors_for_function(sim, f, env, opts.epochs));
            report.per_function_errors[static_cast<std::size_t>(index_of(f))] += e;
            env_errors += e;
        }
        report.errors += env_errors;
        if (opts.record_per_environment)
            report.per_environment_errors.push_back(env_errors);
    }
    return report;
}

// Adapter that drives the protocol with the reference lbnn::step.
class ReferenceSim {
public:
    using State = NetworkState;
    using Clamp = ClampSet;

    explicit ReferenceSim(const NetworkSpec& spec) : spec_(&spec) {}

    State step(const State& s, const Clamp& c) const { return lbnn::step(*spec_, s, c); }
    Spin output(const State& s) const { return s.activations[static_cast<std::size_t>(spec_->output_node())]; }
    State random_state(Seed seed) const { return lbnn::random_state(*spec_, seed); }
    Clamp clamp_input(Spin x) const { return ClampSet::input(*spec_, x); }
    Clamp clamp_input_output(Spin x, Spin y) const { return ClampSet::input_output(*spec_, x, y); }

private:
    const NetworkSpec* spec_;
};

// Adapter over the packed kernel.
class PackedSim {
public:
    using State = PackedState;
    using Clamp = PackedClamp;

    explicit PackedSim(const NetworkSpec& spec) : kernel_(spec) {}

    State step(State s, Clamp c) const noexcept { return kernel_.step(s, c); }
    Spin output(State s) const noexcept { return kernel_.output(s); }
    State random_state(Seed seed) const noexcept { return kernel_.random_state(seed); }
    Clamp clamp_input(Spin x) const noexcept { return kernel_.clamp_input(x); }
    Clamp clamp_input_output(Spin x, Spin y) const noexcept { return kernel_.clamp_input_output(x, y); }

private:
    Kernel kernel_;
};

// ---------------------------------------------------------------------
// Public operations on NetworkSpec/NetworkState, using the reference step.

NetworkState train_function(const NetworkSpec& spec, NetworkState state, BoolFn f, const Environment& env,
                            int epochs = 1);
int test_function(const NetworkSpec& spec, NetworkState state, BoolFn f, const Environment& env);

// Uses the packed kernel when the network fits, the reference otherwise.
EvalReport evaluate(const NetworkSpec& spec, std::span<const Environment> envs, const EvalOptions& opts = {});
EvalReport evaluate_reference(const NetworkSpec& spec, std::span<const Environment> envs,
                              const EvalOptions& opts = {});

inline constexpr int default_init_seed_count = 16;
inline constexpr Seed default_init_seed_base = 0x1b0a5eedULL;

std::vector<Seed> default_init_seeds(int count = default_init_seed_count);

// All 24 permutations in lexicographic order.
const std::vector<std::array<BoolFn, 4>>& function_orders();

// Seeds x orders x train order x test order x cycles, outermost first.
std::vector<Environment> enumerate_all_environments(std::span<const Seed> init_seeds);
std::vector<Environment> enumerate_all_environments(int init_seed_count = default_init_seed_count);

// Score over the full enumeration. Per-function initial states depend
// only on (init seed, function), so each function's errors are independent
// of presentation order; this computes each distinct case once and
// weights it by the 24 orders.
EvalReport env_independent_fitness(const NetworkSpec& spec, std::span<const Seed> init_seeds);
EvalReport env_independent_fitness(const NetworkSpec& spec);

// A uniformly random environment.
Environment sample_environment(Engine& rng);

std::string to_string(const Environment& env);

} // namespace lbnn
