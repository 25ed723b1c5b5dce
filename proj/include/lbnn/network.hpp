#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lbnn/rng.hpp"

namespace lbnn {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Spin : std::int8_t { Minus = -1, Plus = 1 };

constexpr int value_of(Spin s) noexcept { return static_cast<int>(s); }
constexpr bool bit_of(Spin s) noexcept { return s == Spin::Plus; }
constexpr Spin spin_of(bool bit) noexcept { return bit ? Spin::Plus : Spin::Minus; }
constexpr Spin operator-(Spin s) noexcept { return s == Spin::Plus ? Spin::Minus : Spin::Plus; }
constexpr Spin operator*(Spin a, Spin b) noexcept { return spin_of(a == b); }

// '1' for +1 and '0' for -1.
constexpr char glyph_of(Spin s) noexcept { return s == Spin::Plus ? '1' : '0'; }

// theta: +1 iff x > 0.
constexpr Spin sign_threshold(long long x) noexcept { return spin_of(x > 0); }

// Four-entry truth table over (a_i, a_j), index 2*bit(a_i) + bit(a_j).
struct LearningRule {
    std::array<Spin, 4> table{Spin::Minus, Spin::Minus, Spin::Minus, Spin::Minus};

    static constexpr int index_of(Spin a_i, Spin a_j) noexcept
    {
        return 2 * static_cast<int>(bit_of(a_i)) + static_cast<int>(bit_of(a_j));
    }
    constexpr Spin operator()(Spin a_i, Spin a_j) const noexcept
    {
        return table[static_cast<std::size_t>(index_of(a_i, a_j))];
    }
    friend constexpr bool operator==(const LearningRule&, const LearningRule&) = default;

    // e.g. "1001" for Hebb.
    std::string to_string() const;
};

constexpr Spin apply_rule(const LearningRule& rule, Spin a_i, Spin a_j) noexcept
{
    return rule(a_i, a_j);
}

// f(a, b) = a * b.
constexpr LearningRule hebb_rule() noexcept
{
    return LearningRule{{Spin::Plus, Spin::Minus, Spin::Minus, Spin::Plus}};
}

enum class WeightKind : std::uint8_t { Absent, Fixed, Learnable };

// Learnable cells carry a nominal +1 here; their live value is state.
struct WeightCell {
    WeightKind kind = WeightKind::Absent;
    Spin sign = Spin::Plus;

    static constexpr WeightCell absent() noexcept { return {}; }
    static constexpr WeightCell fixed(Spin s) noexcept { return {WeightKind::Fixed, s}; }
    static constexpr WeightCell learnable() noexcept { return {WeightKind::Learnable, Spin::Plus}; }

    constexpr int value() const noexcept
    {
        return kind == WeightKind::Absent ? 0 : value_of(sign);
    }
    friend constexpr bool operator==(const WeightCell&, const WeightCell&) = default;
};

struct CellIndex {
    int source;
    int dest;
    friend constexpr bool operator==(const CellIndex&, const CellIndex&) = default;
};

// Nodes [0, m) are inputs, node m is the output, the rest are hidden.
class NetworkSpec {
public:
    NetworkSpec() = default;
    NetworkSpec(int n, int m, std::vector<WeightCell> weights, LearningRule rule);

    // All cells Absent.
    static NetworkSpec empty(int n, int m, LearningRule rule = {});

    int n() const noexcept { return n_; }
    int m() const noexcept { return m_; }
    int output_node() const noexcept { return m_; }
    bool is_input(int i) const noexcept { return i < m_; }
    bool is_output(int i) const noexcept { return i == m_; }
    bool is_hidden(int i) const noexcept { return i > m_; }
    int hidden_count() const noexcept { return n_ - m_ - 1; }

    const LearningRule& rule() const noexcept { return rule_; }
    void set_rule(LearningRule r) noexcept { rule_ = r; }

    // Row = source, column = destination.
    const WeightCell& cell(int source, int dest) const { return weights_.at(index(source, dest)); }
    void set_cell(int source, int dest, WeightCell c) { weights_.at(index(source, dest)) = normalized(c); }
    const std::vector<WeightCell>& weights() const noexcept { return weights_; }

    // Row-major order; this order indexes NetworkState::learnable.
    std::vector<CellIndex> learnable_cells() const;
    int learnable_count() const noexcept;

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;

private:
    std::size_t index(int source, int dest) const;
    static WeightCell normalized(WeightCell c) noexcept;

    int n_ = 0;
    int m_ = 0;
    std::vector<WeightCell> weights_;
    LearningRule rule_{};
};

struct NetworkState {
    std::vector<Spin> activations;
    std::vector<Spin> learnable;
    friend bool operator==(const NetworkState&, const NetworkState&) = default;
};

// Optional clamp per node; only input and output nodes may be clamped.
class ClampSet {
public:
    ClampSet() = default;
    explicit ClampSet(int n) : values_(static_cast<std::size_t>(n)) {}

    static ClampSet none(const NetworkSpec& spec) { return ClampSet(spec.n()); }
    static ClampSet input(const NetworkSpec& spec, Spin x);
    static ClampSet input_output(const NetworkSpec& spec, Spin x, Spin y);

    int size() const noexcept { return static_cast<int>(values_.size()); }
    const std::optional<Spin>& operator[](int i) const { return values_.at(static_cast<std::size_t>(i)); }
    void clamp(int i, Spin s) { values_.at(static_cast<std::size_t>(i)) = s; }
    void release(int i) { values_.at(static_cast<std::size_t>(i)).reset(); }

    // Throws unless every clamp sits on an input/output node of spec.
    void validate(const NetworkSpec& spec) const;

    friend bool operator==(const ClampSet&, const ClampSet&) = default;

private:
    std::vector<std::optional<Spin>> values_;
};

// Inputs/outputs start at -1; hidden activations and learnable values are
// drawn from a generator seeded with `seed`, hidden nodes first, then
// learnable cells in row-major order.
NetworkState random_state(const NetworkSpec& spec, Seed seed);

// All activations -1, learnable values -1.
NetworkState rest_state(const NetworkSpec& spec);

// Overwrites clamped activations with the clamp values.
void apply_clamps(NetworkState& state, const ClampSet& clamps);

// One synchronous update. Clamp values are the time-t activations of
// clamped nodes; every read (activations and learnable weights) is from
// time t. This is the reference implementation; kernel.hpp has the fast one.
NetworkState step(const NetworkSpec& spec, const NetworkState& state, const ClampSet& clamps);

void check_state(const NetworkSpec& spec, const NetworkState& state);

// Generator for per-state initial draws. SplitMix64: cheap to seed, which
// matters because every (environment, function) evaluation seeds one.
class StateRng {
public:
    explicit StateRng(Seed seed) noexcept : s_(seed) {}
    std::uint64_t next() noexcept
    {
        s_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = s_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    Spin spin() noexcept { return spin_of((next() >> 63) != 0); }

private:
    std::uint64_t s_;
};

} // namespace lbnn
