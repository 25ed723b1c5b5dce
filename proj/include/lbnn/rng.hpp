#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lbnn {

using Seed = std::uint64_t;

// SplitMix64 finalizer. Used only to derive independent seeds from a parent
// seed and a tag; the generators themselves are std engines.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr Seed derive_seed(Seed parent, std::uint64_t tag) noexcept
{
    return mix64(mix64(parent) ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

// FNV-1a, so named streams are stable across builds.
constexpr std::uint64_t tag_of(std::string_view name) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

using Engine = std::mt19937_64;

inline Engine make_stream(Seed master, std::string_view name)
{
    return Engine{derive_seed(master, tag_of(name))};
}

// One fair bit per call; consumes a whole engine output so draws never
// depend on how earlier bits were grouped.
inline bool draw_bit(Engine& rng) { return (rng() >> 63) != 0; }

// Uniform double in [0, 1) from the top 53 bits.
inline double draw_unit(Engine& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection; portable across standard
// libraries, unlike std::uniform_int_distribution.
inline std::uint64_t draw_below(Engine& rng, std::uint64_t bound)
{
    if (bound <= 1)
        return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

} // namespace lbnn
