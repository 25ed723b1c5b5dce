#include "lbnn/kernel.hpp"

#include <string>

namespace lbnn {

Kernel::Kernel(const NetworkSpec& spec) : n_(spec.n()), m_(spec.m())
{
    if (n_ > max_nodes)
        throw Error("packed kernel supports at most " + std::to_string(max_nodes) + " nodes, got " +
                    std::to_string(n_));
    const auto cells = spec.learnable_cells();
    learnable_ = static_cast<int>(cells.size());
    learn_mask_ = learnable_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << learnable_) - 1;

    for (int j = 0; j < n_; ++j) {
        for (int i = 0; i < n_; ++i) {
            const WeightCell& c = spec.cell(j, i);
            if (c.kind != WeightKind::Fixed)
                continue;
            if (c.sign == Spin::Plus)
                fixed_pos_[i] |= 1u << j;
            else
                fixed_neg_[i] |= 1u << j;
        }
    }
    for (int l = 0; l < learnable_; ++l) {
        const auto [src, dst] = cells[static_cast<std::size_t>(l)];
        learn_into_[dst] |= std::uint64_t{1} << l;
        src_of_[src] |= std::uint64_t{1} << l;
        dst_of_[dst] |= std::uint64_t{1} << l;
    }
    for (int i = 0; i < n_; ++i)
        bias_[i] = -std::popcount(fixed_pos_[i]) + std::popcount(fixed_neg_[i]) - std::popcount(learn_into_[i]);
    for (int k = 0; k < 4; ++k)
        rule_[k] = spec.rule().table[k] == Spin::Plus ? ~std::uint64_t{0} : 0;
}

PackedClamp Kernel::clamp_input(Spin x) const noexcept
{
    const std::uint32_t mask = (1u << m_) - 1;
    return {mask, bit_of(x) ? mask : 0u};
}

PackedClamp Kernel::clamp_input_output(Spin x, Spin y) const noexcept
{
    PackedClamp c = clamp_input(x);
    c.mask |= 1u << m_;
    if (bit_of(y))
        c.values |= 1u << m_;
    return c;
}

PackedClamp Kernel::pack(const ClampSet& clamps) const
{
    if (clamps.size() != n_)
        throw Error("clamp set size does not match node count");
    PackedClamp c;
    for (int i = 0; i < n_; ++i) {
        if (!clamps[i])
            continue;
        if (i > m_)
            throw Error("hidden node " + std::to_string(i) + " cannot be clamped");
        c.mask |= 1u << i;
        if (bit_of(*clamps[i]))
            c.values |= 1u << i;
    }
    return c;
}

PackedState Kernel::pack(const NetworkState& state) const
{
    if (state.activations.size() != static_cast<std::size_t>(n_) ||
        state.learnable.size() != static_cast<std::size_t>(learnable_))
        throw Error("state does not match network dimensions");
    PackedState s;
    for (int i = 0; i < n_; ++i)
        if (bit_of(state.activations[static_cast<std::size_t>(i)]))
            s.act |= 1u << i;
    for (int l = 0; l < learnable_; ++l)
        if (bit_of(state.learnable[static_cast<std::size_t>(l)]))
            s.learn |= std::uint64_t{1} << l;
    return s;
}

NetworkState Kernel::unpack(PackedState s) const
{
    NetworkState state;
    state.activations.resize(static_cast<std::size_t>(n_));
    state.learnable.resize(static_cast<std::size_t>(learnable_));
    for (int i = 0; i < n_; ++i)
        state.activations[static_cast<std::size_t>(i)] = spin_of((s.act >> i) & 1u);
    for (int l = 0; l < learnable_; ++l)
        state.learnable[static_cast<std::size_t>(l)] = spin_of((s.learn >> l) & 1u);
    return state;
}

PackedState Kernel::random_state(Seed seed) const noexcept
{
    PackedState s;
    StateRng rng(seed);
    for (int i = m_ + 1; i < n_; ++i)
        if (bit_of(rng.spin()))
            s.act |= 1u << i;
    for (int l = 0; l < learnable_; ++l)
        if (bit_of(rng.spin()))
            s.learn |= std::uint64_t{1} << l;
    return s;
}

} // namespace lbnn
