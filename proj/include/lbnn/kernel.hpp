#pragma once

#include <array>
#include <bit>
#include <cstdint>

#include "lbnn/network.hpp"

namespace lbnn {

// Bit-packed network state: activation bit j is node j, learnable bit l is
// the l-th learnable cell in row-major order. Bit 1 means +1.
struct PackedState {
    std::uint32_t act = 0;
    std::uint64_t learn = 0;
    friend constexpr bool operator==(const PackedState&, const PackedState&) = default;
};

struct PackedClamp {
    std::uint32_t mask = 0;
    std::uint32_t values = 0;
};

// Popcount form of the synchronous update for networks of up to 8 nodes.
// Must agree bit-for-bit with lbnn::step on every input.
class Kernel {
public:
    static constexpr int max_nodes = 8;

    explicit Kernel(const NetworkSpec& spec);

    int n() const noexcept { return n_; }
    int m() const noexcept { return m_; }
    int learnable_count() const noexcept { return learnable_; }
    int output_node() const noexcept { return m_; }

    PackedState step(PackedState s, PackedClamp c) const noexcept
    {
        const std::uint32_t a = (s.act & ~c.mask) | (c.values & c.mask);

        std::uint64_t src_bits = 0;
        std::uint64_t dst_bits = 0;
        for (int j = 0; j < n_; ++j) {
            if ((a >> j) & 1u) {
                src_bits |= src_of_[j];
                dst_bits |= dst_of_[j];
            }
        }
        const std::uint64_t agree = ~(src_bits ^ s.learn);

        std::uint32_t next = 0;
        for (int i = 0; i < n_; ++i) {
            const int sum = 2 * std::popcount(fixed_pos_[i] & a) - 2 * std::popcount(fixed_neg_[i] & a) +
                            2 * std::popcount(agree & learn_into_[i]) + bias_[i];
            next |= static_cast<std::uint32_t>(sum > 0) << i;
        }
        next = (next & ~c.mask) | (c.values & c.mask);

        const std::uint64_t ns = ~src_bits;
        const std::uint64_t nd = ~dst_bits;
        const std::uint64_t learn = ((ns & nd & rule_[0]) | (ns & dst_bits & rule_[1]) |
                                     (src_bits & nd & rule_[2]) | (src_bits & dst_bits & rule_[3])) &
                                    learn_mask_;
        return PackedState{next, learn};
    }

    Spin output(PackedState s) const noexcept { return spin_of((s.act >> m_) & 1u); }

    PackedClamp clamp_input(Spin x) const noexcept;
    PackedClamp clamp_input_output(Spin x, Spin y) const noexcept;
    PackedClamp pack(const ClampSet& clamps) const;

    PackedState pack(const NetworkState& state) const;
    NetworkState unpack(PackedState s) const;

    // Same draws as lbnn::random_state.
    PackedState random_state(Seed seed) const noexcept;

private:
    int n_ = 0;
    int m_ = 0;
    int learnable_ = 0;
    std::uint64_t learn_mask_ = 0;
    std::array<std::uint32_t, max_nodes> fixed_pos_{};
    std::array<std::uint32_t, max_nodes> fixed_neg_{};
    std::array<std::uint64_t, max_nodes> learn_into_{};
    std::array<int, max_nodes> bias_{};
    std::array<std::uint64_t, max_nodes> src_of_{};
    std::array<std::uint64_t, max_nodes> dst_of_{};
    std::array<std::uint64_t, 4> rule_{};
};

} // namespace lbnn
