#include "lbnn/network.hpp"

#include <string>

namespace lbnn {

std::string LearningRule::to_string() const
{
    std::string s;
    for (Spin v : table)
        s.push_back(glyph_of(v));
    return s;
}

NetworkSpec::NetworkSpec(int n, int m, std::vector<WeightCell> weights, LearningRule rule)
    : n_(n), m_(m), weights_(std::move(weights)), rule_(rule)
{
    if (m < 1 || n < m + 1)
        throw Error("network needs n >= m + 1 and m >= 1 (n=" + std::to_string(n) +
                    ", m=" + std::to_string(m) + ")");
    if (weights_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
        throw Error("weight matrix must have n*n cells");
    for (auto& c : weights_)
        c = normalized(c);
}

NetworkSpec NetworkSpec::empty(int n, int m, LearningRule rule)
{
    if (n < 0)
        throw Error("negative node count");
    return NetworkSpec(n, m, std::vector<WeightCell>(static_cast<std::size_t>(n * n)), rule);
}

std::size_t NetworkSpec::index(int source, int dest) const
{
    if (source < 0 || source >= n_ || dest < 0 || dest >= n_)
        throw Error("cell index out of range");
    return static_cast<std::size_t>(source * n_ + dest);
}

WeightCell NetworkSpec::normalized(WeightCell c) noexcept
{
    if (c.kind != WeightKind::Fixed)
        c.sign = Spin::Plus;
    return c;
}

std::vector<CellIndex> NetworkSpec::learnable_cells() const
{
    std::vector<CellIndex> out;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (weights_[static_cast<std::size_t>(i * n_ + j)].kind == WeightKind::Learnable)
                out.push_back({i, j});
    return out;
}

int NetworkSpec::learnable_count() const noexcept
{
    int count = 0;
    for (const auto& c : weights_)
        count += c.kind == WeightKind::Learnable;
    return count;
}

ClampSet ClampSet::input(const NetworkSpec& spec, Spin x)
{
    ClampSet c(spec.n());
    for (int i = 0; i < spec.m(); ++i)
        c.clamp(i, x);
    return c;
}

ClampSet ClampSet::input_output(const NetworkSpec& spec, Spin x, Spin y)
{
    ClampSet c = input(spec, x);
    c.clamp(spec.output_node(), y);
    return c;
}

void ClampSet::validate(const NetworkSpec& spec) const
{
    if (size() != spec.n())
        throw Error("clamp set size does not match node count");
    for (int i = 0; i < size(); ++i)
        if (values_[static_cast<std::size_t>(i)] && spec.is_hidden(i))
            throw Error("hidden node " + std::to_string(i) + " cannot be clamped");
}

void check_state(const NetworkSpec& spec, const NetworkState& state)
{
    if (state.activations.size() != static_cast<std::size_t>(spec.n()))
        throw Error("state has " + std::to_string(state.activations.size()) +
                    " activations, network has " + std::to_string(spec.n()) + " nodes");
    if (state.learnable.size() != static_cast<std::size_t>(spec.learnable_count()))
        throw Error("state has " + std::to_string(state.learnable.size()) +
                    " learnable values, network has " + std::to_string(spec.learnable_count()));
}

NetworkState rest_state(const NetworkSpec& spec)
{
    return NetworkState{
        std::vector<Spin>(static_cast<std::size_t>(spec.n()), Spin::Minus),
        std::vector<Spin>(static_cast<std::size_t>(spec.learnable_count()), Spin::Minus)};
}

NetworkState random_state(const NetworkSpec& spec, Seed seed)
{
    NetworkState state = rest_state(spec);
    StateRng rng(seed);
    for (int i = spec.m() + 1; i < spec.n(); ++i)
        state.activations[static_cast<std::size_t>(i)] = rng.spin();
    for (auto& w : state.learnable)
        w = rng.spin();
    return state;
}

void apply_clamps(NetworkState& state, const ClampSet& clamps)
{
    for (int i = 0; i < clamps.size(); ++i)
        if (clamps[i])
            state.activations.at(static_cast<std::size_t>(i)) = *clamps[i];
}

NetworkState step(const NetworkSpec& spec, const NetworkState& state, const ClampSet& clamps)
{
    check_state(spec, state);
    clamps.validate(spec);
    const int n = spec.n();

    NetworkState now = state;
    apply_clamps(now, clamps);

    // Current weight values, with learnable cells read from the state.
    std::vector<int> w(static_cast<std::size_t>(n * n));
    const auto cells = spec.learnable_cells();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            w[static_cast<std::size_t>(i * n + j)] = spec.cell(i, j).value();
    for (std::size_t k = 0; k < cells.size(); ++k)
        w[static_cast<std::size_t>(cells[k].source * n + cells[k].dest)] = value_of(now.learnable[k]);

    NetworkState next = now;
    for (int i = 0; i < n; ++i) {
        if (clamps[i])
            continue;
        long long sum = 0;
        for (int j = 0; j < n; ++j)
            sum += value_of(now.activations[static_cast<std::size_t>(j)]) *
                   w[static_cast<std::size_t>(j * n + i)];
        next.activations[static_cast<std::size_t>(i)] = sign_threshold(sum);
    }
    for (std::size_t k = 0; k < cells.size(); ++k)
        next.learnable[k] = spec.rule()(now.activations[static_cast<std::size_t>(cells[k].source)],
                                        now.activations[static_cast<std::size_t>(cells[k].dest)]);
    return next;
}

} // namespace lbnn
