#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lbnn/kernel.hpp"
#include "lbnn/network.hpp"
#include "lbnn/task.hpp"

namespace lbnn {

// Packed state over (inputs, output, hidden, learnable cells). Bit p of
// the index is component p; activations occupy bits [0, n), learnable
// cells bits [n, n + L). Bit 1 means +1.
using StateIndex = std::uint64_t;

class StateSpace {
public:
    explicit StateSpace(const NetworkSpec& spec);

    const NetworkSpec& spec() const noexcept { return spec_; }
    const Kernel& kernel() const noexcept { return kernel_; }
    int n() const noexcept { return spec_.n(); }
    int width() const noexcept { return width_; }

    StateIndex pack(const NetworkState& s) const;
    NetworkState unpack(StateIndex s) const;
    StateIndex pack(PackedState s) const noexcept
    {
        return static_cast<StateIndex>(s.act) | (s.learn << spec_.n());
    }
    PackedState packed(StateIndex s) const noexcept
    {
        const auto act_mask = (std::uint64_t{1} << spec_.n()) - 1;
        return PackedState{static_cast<std::uint32_t>(s & act_mask), s >> spec_.n()};
    }

    // "0" for -1, "1" for +1, component order.
    std::string format(StateIndex s) const;
    StateIndex parse(const std::string& text) const;

    // Next state. Throws if clamped bits of s disagree with the clamps.
    StateIndex transition(StateIndex s, PackedClamp c) const;
    StateIndex transition(StateIndex s, const ClampSet& clamps) const;

    StateIndex transition_unchecked(StateIndex s, PackedClamp c) const noexcept
    {
        return pack(kernel_.step(packed(s), c));
    }

    Spin output(StateIndex s) const noexcept { return spin_of((s >> spec_.m()) & 1u); }
    Spin input(StateIndex s) const noexcept { return spin_of(s & 1u); }
    StateIndex with_clamps(StateIndex s, PackedClamp c) const noexcept
    {
        return (s & ~static_cast<StateIndex>(c.mask)) | static_cast<StateIndex>(c.values & c.mask);
    }

private:
    NetworkSpec spec_;
    Kernel kernel_;
    int width_ = 0;
};

struct Orbit {
    // Starts at the smallest member; states[i] maps to states[(i+1) % period].
    std::vector<StateIndex> states;
    int period() const noexcept { return static_cast<int>(states.size()); }
    StateIndex head() const { return states.front(); }
    // The output value if it is the same at every member.
    std::optional<Spin> constant_output(const StateSpace& space) const;
};

// Every state consistent with a clamp set, in ascending order, with the
// orbit it reaches and its distance to that orbit.
class BasinMap {
public:
    BasinMap() = default;
    BasinMap(PackedClamp clamp, int width);

    std::uint64_t state_count() const noexcept { return std::uint64_t{1} << free_bits_; }
    StateIndex state_at(std::uint64_t compact) const noexcept;
    // Position of s in the enumeration; s must agree with the clamp.
    std::uint64_t compact_of(StateIndex s) const noexcept;
    bool consistent(StateIndex s) const noexcept
    {
        return (s & clamp_mask_) == clamp_values_;
    }

    std::uint32_t orbit_of(StateIndex s) const { return orbit_.at(compact_of(s)); }
    std::uint32_t transient_of(StateIndex s) const { return transient_.at(compact_of(s)); }

    std::vector<std::uint32_t>& orbit_ids() noexcept { return orbit_; }
    std::vector<std::uint32_t>& transients() noexcept { return transient_; }
    const std::vector<std::uint32_t>& orbit_ids() const noexcept { return orbit_; }
    const std::vector<std::uint32_t>& transients() const noexcept { return transient_; }

private:
    StateIndex clamp_mask_ = 0;
    StateIndex clamp_values_ = 0;
    std::vector<int> free_positions_;
    int free_bits_ = 0;
    std::vector<std::uint32_t> orbit_;
    std::vector<std::uint32_t> transient_;
};

struct OrbitAnalysis {
    PackedClamp clamp;
    std::vector<Orbit> orbits;
    BasinMap basins;
    std::vector<std::uint64_t> basin_sizes;
    std::vector<std::uint32_t> max_transient;
    // False when produced by sampling.
    bool complete = true;

    // Index of the orbit containing s, if s is periodic.
    std::optional<std::uint32_t> orbit_containing(StateIndex s) const;
};

inline constexpr int default_state_cap_bits = 24;

// Exhaustive orbit and basin enumeration under fixed clamps. Throws if the
// number of free state bits exceeds cap_bits.
OrbitAnalysis find_orbits(const StateSpace& space, PackedClamp clamp, int cap_bits = default_state_cap_bits,
                          int workers = 0);
OrbitAnalysis find_orbits(const StateSpace& space, const ClampSet& clamps,
                          int cap_bits = default_state_cap_bits, int workers = 0);

// Orbits reached from `samples` random starts; basins are not populated
// and `complete` is false.
OrbitAnalysis sample_orbits(const StateSpace& space, PackedClamp clamp, std::uint64_t samples, Seed seed);

// Single-threaded reference: labels states by iterating the reference
// lbnn::step from every start until a state repeats.
std::vector<std::vector<StateIndex>> reference_orbit_of_each_state(const StateSpace& space,
                                                                   const ClampSet& clamps);

struct Pairing {
    std::uint32_t plus_orbit = 0;   // orbit under input +1
    std::uint32_t minus_orbit = 0;  // orbit under input -1
    std::optional<BoolFn> function; // set when both sides have a constant output
};

// An orbit whose flipped-input image leads somewhere that does not lead back.
struct OneWayLink {
    Spin input = Spin::Plus;
    std::uint32_t orbit = 0;
    // Empty when members of the orbit flip into different attractors.
    std::optional<std::uint32_t> target;
};

// Where the network goes when the output clamp is released.
struct ClampedRelease {
    Spin input = Spin::Plus;
    Spin output = Spin::Plus;
    std::uint32_t clamped_orbit = 0;
    std::uint32_t free_orbit = 0;
};

enum class Perturbation : std::uint8_t { FreeMinus, FreePlus, ClampMM, ClampMP, ClampPM, ClampPP };
inline constexpr std::array<Perturbation, 6> all_perturbations{
    Perturbation::FreeMinus, Perturbation::FreePlus, Perturbation::ClampMM,
    Perturbation::ClampMP,   Perturbation::ClampPM,  Perturbation::ClampPP};
// "0"/"1" for a free output, "xy" for input x and output y.
std::string code_of(Perturbation p);

struct AttractorAtlas {
    StateSpace space;
    // Indexed by bit(input): [0] is input -1, [1] is input +1.
    std::array<OrbitAnalysis, 2> free;
    // [bit(input)][bit(output)].
    std::array<std::array<OrbitAnalysis, 2>, 2> clamped;
    std::vector<Pairing> pairings;
    std::vector<OneWayLink> unpaired;
    std::vector<ClampedRelease> releases;

    const OrbitAnalysis& free_for(Spin x) const { return free[bit_of(x)]; }
    const OrbitAnalysis& clamped_for(Spin x, Spin y) const { return clamped[bit_of(x)][bit_of(y)]; }

    // Periodic point reached after applying p to periodic state s.
    StateIndex perturb(StateIndex s, Perturbation p) const;

    // Function-named pairings, f0..f3 order; empty entries absent.
    std::array<int, 4> function_counts() const;
    // Exactly one pairing per function and no other pairing.
    bool covers_all_functions_once() const;
    std::size_t periodic_point_count() const;
};

AttractorAtlas classify_functions(const NetworkSpec& spec, int cap_bits = default_state_cap_bits, int workers = 0);

struct DiagramOptions {
    bool include_self_loops = false;
};

// DOT digraph: one node per periodic point under an input-only clamp,
// one edge per (tail, head) labelled with the perturbation codes that
// cause it, joined by ',', e.g. "1,10".
std::string export_transition_diagram(const AttractorAtlas& atlas, const DiagramOptions& opts = {});

// Fixed points with their basins, pairings and represented functions.
std::string format_report(const AttractorAtlas& atlas);

} // namespace lbnn
