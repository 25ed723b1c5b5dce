#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "lbnn/atlas.hpp"
#include "lbnn/genome.hpp"
#include "test_support.hpp"

using namespace lbnn;

namespace {

NetworkSpec perfect_fixture()
{
    std::ifstream in(testing::data_dir() / "perfect_n5.txt");
    REQUIRE(in);
    return decode(read_genome_file(in).genomes.at(0));
}

// Iterates the reference step until a state repeats and returns the
// smallest state on the cycle.
StateIndex settle(const StateSpace& space, StateIndex start, const ClampSet& clamps)
{
    NetworkState st = space.unpack(start);
    apply_clamps(st, clamps);
    std::map<StateIndex, int> seen;
    std::vector<StateIndex> path;
    StateIndex s = space.pack(st);
    while (seen.emplace(s, static_cast<int>(path.size())).second) {
        path.push_back(s);
        st = step(space.spec(), st, clamps);
        s = space.pack(st);
    }
    return *std::min_element(path.begin() + seen[s], path.end());
}

std::size_t count_of(const std::string& text, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1))
        ++n;
    return n;
}

} // namespace

TEST_CASE("state packing and formatting")
{
    NetworkSpec s = NetworkSpec::empty(3, 1);
    s.set_cell(2, 1, WeightCell::learnable());
    const StateSpace space(s);
    CHECK(space.width() == 4);
    NetworkState st{{Spin::Plus, Spin::Minus, Spin::Minus}, {Spin::Plus}};
    const StateIndex idx = space.pack(st);
    CHECK(idx == 0b1001u);
    CHECK(space.format(idx) == "1001");
    CHECK(space.parse("1001") == idx);
    CHECK(space.unpack(idx) == st);
    CHECK_THROWS_AS(space.parse("10x1"), Error);
    CHECK_THROWS_AS(space.parse("101"), Error);
}

TEST_CASE("unconnected network has one fixed point per input")
{
    const NetworkSpec s = NetworkSpec::empty(3, 1);
    const AttractorAtlas atlas = classify_functions(s);
    for (Spin x : {Spin::Minus, Spin::Plus}) {
        const auto& a = atlas.free_for(x);
        REQUIRE(a.orbits.size() == 1);
        CHECK(a.orbits[0].period() == 1);
        CHECK(a.basin_sizes[0] == 4);
    }
    CHECK(atlas.periodic_point_count() == 2);
    REQUIRE(atlas.pairings.size() == 1);
    CHECK(atlas.pairings[0].function == BoolFn::F0);
    CHECK(atlas.function_counts() == std::array<int, 4>{1, 0, 0, 0});
    CHECK(!atlas.covers_all_functions_once());
}

TEST_CASE("state count includes learnable cells")
{
    std::mt19937_64 gen(55);
    const NetworkSpec s = testing::random_spec_with_learnable(gen, 5, 2);
    const StateSpace space(s);
    CHECK(space.width() == 7);
    const OrbitAnalysis none = find_orbits(space, ClampSet::none(s));
    CHECK(none.basins.state_count() == 128);
    CHECK(std::accumulate(none.basin_sizes.begin(), none.basin_sizes.end(), std::uint64_t{0}) == 128);
    const OrbitAnalysis held = find_orbits(space, ClampSet::input(s, Spin::Plus));
    CHECK(held.basins.state_count() == 64);
}

TEST_CASE("enumeration agrees with iterating the reference step")
{
    std::mt19937_64 gen(808);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 3 + trial % 4;
        const NetworkSpec s = testing::random_spec_with_learnable(gen, n, trial % 3);
        const StateSpace space(s);
        for (const ClampSet& clamps :
             {ClampSet::none(s), ClampSet::input(s, Spin::Minus), ClampSet::input_output(s, Spin::Plus, Spin::Minus)}) {
            const OrbitAnalysis a = find_orbits(space, clamps, 24, 1 + trial % 3);
            const auto oracle = reference_orbit_of_each_state(space, clamps);
            REQUIRE(oracle.size() == a.basins.state_count());

            std::set<std::vector<StateIndex>> distinct(oracle.begin(), oracle.end());
            CHECK(distinct.size() == a.orbits.size());

            std::vector<std::uint64_t> sizes(a.orbits.size());
            for (std::uint64_t c = 0; c < oracle.size(); ++c) {
                const StateIndex st = a.basins.state_at(c);
                const auto id = a.basins.orbit_of(st);
                CHECK(a.orbits[id].states == oracle[c]);
                ++sizes[id];
                const bool periodic = a.orbit_containing(st).has_value();
                CHECK(periodic == (a.basins.transient_of(st) == 0));
            }
            CHECK(sizes == a.basin_sizes);

            for (const Orbit& o : a.orbits) {
                CHECK(o.head() == *std::min_element(o.states.begin(), o.states.end()));
                for (int i = 0; i < o.period(); ++i)
                    CHECK(space.transition(o.states[static_cast<std::size_t>(i)], clamps) ==
                          o.states[static_cast<std::size_t>((i + 1) % o.period())]);
            }
            CHECK(std::is_sorted(a.orbits.begin(), a.orbits.end(),
                                 [](const Orbit& l, const Orbit& r) { return l.head() < r.head(); }));
        }
    }
}

TEST_CASE("constant-output free orbits are orbits of the output-clamped map")
{
    std::mt19937_64 gen(91);
    for (int trial = 0; trial < 40; ++trial) {
        const NetworkSpec s = testing::random_spec_with_learnable(gen, 4 + trial % 2, trial % 3);
        const AttractorAtlas atlas = classify_functions(s);
        for (Spin x : {Spin::Minus, Spin::Plus}) {
            for (const Orbit& o : atlas.free_for(x).orbits) {
                const auto y = o.constant_output(atlas.space);
                if (!y)
                    continue;
                const auto& held = atlas.clamped_for(x, *y);
                for (StateIndex st : o.states)
                    CHECK(held.orbit_containing(st).has_value());
            }
        }
    }
}

TEST_CASE("find_orbits worker count does not change the result")
{
    std::mt19937_64 gen(17);
    const NetworkSpec s = testing::random_spec_with_learnable(gen, 6, 6);
    const StateSpace space(s);
    const OrbitAnalysis a = find_orbits(space, ClampSet::input(s, Spin::Plus), 24, 1);
    const OrbitAnalysis b = find_orbits(space, ClampSet::input(s, Spin::Plus), 24, 4);
    REQUIRE(a.orbits.size() == b.orbits.size());
    for (std::size_t i = 0; i < a.orbits.size(); ++i)
        CHECK(a.orbits[i].states == b.orbits[i].states);
    CHECK(a.basin_sizes == b.basin_sizes);
    CHECK(a.max_transient == b.max_transient);
}

TEST_CASE("sampling finds a subset of the orbits")
{
    std::mt19937_64 gen(3);
    const NetworkSpec s = testing::random_spec_with_learnable(gen, 5, 3);
    const StateSpace space(s);
    const auto clamp = space.kernel().clamp_input(Spin::Minus);
    const OrbitAnalysis full = find_orbits(space, clamp);
    const OrbitAnalysis part = sample_orbits(space, clamp, 50, 9);
    CHECK(!part.complete);
    CHECK(part.orbits.size() <= full.orbits.size());
    for (const Orbit& o : part.orbits)
        CHECK(full.orbit_containing(o.head()).has_value());
}

TEST_CASE("the frozen evolved network represents each function once")
{
    const AttractorAtlas atlas = classify_functions(perfect_fixture());
    CHECK(atlas.covers_all_functions_once());
    CHECK(atlas.function_counts() == std::array<int, 4>{1, 1, 1, 1});
    CHECK(atlas.periodic_point_count() == 8);
    for (const auto& side : atlas.free)
        for (const Orbit& o : side.orbits)
            CHECK(o.period() == 1);
    CHECK(!format_report(atlas).empty());

    const std::string dot = export_transition_diagram(atlas);
    CHECK(dot == export_transition_diagram(classify_functions(perfect_fixture())));
    CHECK(dot.rfind("digraph", 0) == 0);
    CHECK(count_of(dot, ";\n") - count_of(dot, "->") == 9); // 8 nodes and the style line
    CHECK(count_of(export_transition_diagram(atlas, {true}), "->") >= count_of(dot, "->"));

    // Every edge head agrees with clamping and iterating the reference step.
    const StateSpace& space = atlas.space;
    const NetworkSpec& spec = space.spec();
    for (const auto& side : atlas.free) {
        for (const Orbit& o : side.orbits) {
            const StateIndex s = o.head();
            for (Spin x : {Spin::Minus, Spin::Plus}) {
                const StateIndex free_head = settle(space, s, ClampSet::input(spec, x));
                CHECK(atlas.perturb(s, x == Spin::Plus ? Perturbation::FreePlus : Perturbation::FreeMinus) ==
                      free_head);
                for (Spin y : {Spin::Minus, Spin::Plus}) {
                    const StateIndex held = settle(space, s, ClampSet::input_output(spec, x, y));
                    const StateIndex released = settle(space, held, ClampSet::input(spec, x));
                    const int code = 2 * bit_of(x) + bit_of(y);
                    CHECK(atlas.perturb(s, all_perturbations[static_cast<std::size_t>(2 + code)]) == released);
                }
            }
        }
    }
}

TEST_CASE("perturbation codes")
{
    CHECK(code_of(Perturbation::FreeMinus) == "0");
    CHECK(code_of(Perturbation::FreePlus) == "1");
    CHECK(code_of(Perturbation::ClampPM) == "10");
    CHECK(code_of(Perturbation::ClampMP) == "01");
}

TEST_CASE("transition rejects states that contradict the clamps")
{
    const NetworkSpec s = NetworkSpec::empty(3, 1);
    const StateSpace space(s);
    const ClampSet c = ClampSet::input(s, Spin::Plus);
    CHECK_THROWS_AS(space.transition(0b000u, c), Error);
    CHECK_NOTHROW(space.transition(0b001u, c));
}

TEST_CASE("oversized state spaces are refused")
{
    NetworkSpec s = NetworkSpec::empty(6, 1);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 4; ++j)
            s.set_cell(i, j, WeightCell::learnable());
    const StateSpace space(s);
    try {
        (void)find_orbits(space, ClampSet::none(s), 20);
        FAIL("expected the cap to trigger");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("exceeds the cap") != std::string::npos);
    }
}
