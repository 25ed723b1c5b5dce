#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "lbnn/network.hpp"
#include "test_support.hpp"

using namespace lbnn;

TEST_CASE("sign_threshold ties go to -1")
{
    CHECK(sign_threshold(0) == Spin::Minus);
    CHECK(sign_threshold(3) == Spin::Plus);
    CHECK(sign_threshold(-2) == Spin::Minus);
    CHECK(sign_threshold(1) == Spin::Plus);
}

TEST_CASE("hebb rule is the product on all four pairs")
{
    const LearningRule hebb = hebb_rule();
    CHECK(apply_rule(hebb, Spin::Minus, Spin::Minus) == Spin::Plus);
    CHECK(apply_rule(hebb, Spin::Minus, Spin::Plus) == Spin::Minus);
    CHECK(apply_rule(hebb, Spin::Plus, Spin::Plus) == Spin::Plus);
    CHECK(apply_rule(hebb, Spin::Plus, Spin::Minus) == Spin::Minus);
    for (Spin a : {Spin::Minus, Spin::Plus})
        for (Spin b : {Spin::Minus, Spin::Plus})
            CHECK(value_of(hebb(a, b)) == value_of(a) * value_of(b));
    CHECK(hebb.to_string() == "1001");
}

TEST_CASE("constant rule")
{
    const LearningRule plus{{Spin::Plus, Spin::Plus, Spin::Plus, Spin::Plus}};
    CHECK(apply_rule(plus, Spin::Minus, Spin::Plus) == Spin::Plus);
}

TEST_CASE("network spec validates shape and normalizes cells")
{
    CHECK_THROWS_AS(NetworkSpec::empty(1, 1), Error);
    CHECK_THROWS_AS(NetworkSpec(3, 1, std::vector<WeightCell>(4), {}), Error);
    NetworkSpec s = NetworkSpec::empty(4, 1);
    CHECK(s.output_node() == 1);
    CHECK(s.hidden_count() == 2);
    CHECK(s.is_input(0));
    CHECK(s.is_output(1));
    CHECK(s.is_hidden(2));
    CHECK(s.is_hidden(3));
    s.set_cell(2, 3, WeightCell{WeightKind::Absent, Spin::Minus});
    CHECK(s.cell(2, 3).value() == 0);
    s.set_cell(0, 1, WeightCell::learnable());
    s.set_cell(3, 0, WeightCell::learnable());
    const auto cells = s.learnable_cells();
    REQUIRE(cells.size() == 2);
    CHECK(cells[0] == CellIndex{0, 1});
    CHECK(cells[1] == CellIndex{3, 0});
}

TEST_CASE("hidden nodes cannot be clamped")
{
    const NetworkSpec s = NetworkSpec::empty(3, 1);
    ClampSet c(3);
    c.clamp(2, Spin::Plus);
    CHECK_THROWS_AS(step(s, rest_state(s), c), Error);
}

TEST_CASE("step: all cells absent pins unclamped nodes to -1")
{
    const NetworkSpec s = NetworkSpec::empty(5, 1);
    NetworkState state = rest_state(s);
    state.activations = {Spin::Minus, Spin::Plus, Spin::Plus, Spin::Minus, Spin::Plus};
    const NetworkState next = step(s, state, ClampSet::input(s, Spin::Plus));
    CHECK(next.activations[0] == Spin::Plus);
    for (int i = 1; i < 5; ++i)
        CHECK(next.activations[static_cast<std::size_t>(i)] == Spin::Minus);
}

TEST_CASE("step: clamped source drives fixed weight")
{
    NetworkSpec s = NetworkSpec::empty(2, 1);
    s.set_cell(0, 1, WeightCell::fixed(Spin::Plus));
    const NetworkState next = step(s, rest_state(s), ClampSet::input(s, Spin::Plus));
    CHECK(next.activations[1] == Spin::Plus);
}

TEST_CASE("step: learnable weight and activation read time-t values")
{
    // Hand trace: a1 = +1, a2 = -1, w12 learnable under hebb.
    // w12(t+1) = f(+1, -1) = -1; a2(t+1) = theta(a1 * w12(t)).
    NetworkSpec s = NetworkSpec::empty(2, 1, hebb_rule());
    s.set_cell(0, 1, WeightCell::learnable());
    for (Spin old_w : {Spin::Plus, Spin::Minus}) {
        NetworkState state{{Spin::Plus, Spin::Minus}, {old_w}};
        const NetworkState next = step(s, state, ClampSet::none(s));
        CHECK(next.learnable[0] == Spin::Minus);
        CHECK(next.activations[1] == old_w);
        // Node 0 has no incoming weights and is free.
        CHECK(next.activations[0] == Spin::Minus);
    }
}

TEST_CASE("step: weights into a clamped node still learn")
{
    NetworkSpec s = NetworkSpec::empty(3, 1, hebb_rule());
    s.set_cell(2, 0, WeightCell::learnable());
    NetworkState state{{Spin::Plus, Spin::Minus, Spin::Minus}, {Spin::Plus}};
    const NetworkState next = step(s, state, ClampSet::input(s, Spin::Plus));
    CHECK(next.activations[0] == Spin::Plus);
    CHECK(next.learnable[0] == Spin::Minus); // f(a_2 = -1, a_0 = +1)
}

TEST_CASE("step rejects mismatched state")
{
    NetworkSpec s = NetworkSpec::empty(3, 1);
    s.set_cell(0, 2, WeightCell::learnable());
    NetworkState bad = rest_state(s);
    bad.learnable.clear();
    CHECK_THROWS_AS(step(s, bad, ClampSet::none(s)), Error);
    CHECK_THROWS_AS(step(s, NetworkState{{Spin::Plus}, {Spin::Plus}}, ClampSet::none(s)), Error);
}

TEST_CASE("random_state is seeded and leaves inputs and outputs at rest")
{
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 20; ++trial) {
        const NetworkSpec s = testing::random_spec(gen, 2 + trial % 6);
        const Seed seed = gen();
        CHECK(random_state(s, seed) == random_state(s, seed));
        const NetworkState st = random_state(s, seed);
        CHECK(st.activations[0] == Spin::Minus);
        CHECK(st.activations[1] == Spin::Minus);
        CHECK(st.learnable.size() == static_cast<std::size_t>(s.learnable_count()));
    }
    CHECK(random_state(NetworkSpec::empty(4, 1), 3).learnable.empty());
}

TEST_CASE("random_state hidden draws are fair")
{
    // 10^4 draws; [0.45, 0.55] is a 10-sigma band.
    const NetworkSpec s = NetworkSpec::empty(3, 1);
    int plus = 0;
    for (Seed seed = 0; seed < 10000; ++seed)
        plus += random_state(s, derive_seed(99, seed)).activations[2] == Spin::Plus;
    const double frac = plus / 10000.0;
    CHECK(frac >= 0.45);
    CHECK(frac <= 0.55);
}

// Relabels hidden nodes by `perm` (perm[old] = new, identity on input and
// output) and returns the permuted spec plus the learnable-index map.
static std::pair<NetworkSpec, std::vector<std::size_t>> permute_hidden(const NetworkSpec& s,
                                                                       const std::vector<int>& perm)
{
    NetworkSpec p = NetworkSpec::empty(s.n(), s.m(), s.rule());
    for (int i = 0; i < s.n(); ++i)
        for (int j = 0; j < s.n(); ++j)
            p.set_cell(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)], s.cell(i, j));
    const auto old_cells = s.learnable_cells();
    const auto new_cells = p.learnable_cells();
    std::vector<std::size_t> map(old_cells.size());
    for (std::size_t k = 0; k < old_cells.size(); ++k) {
        const CellIndex moved{perm[static_cast<std::size_t>(old_cells[k].source)],
                              perm[static_cast<std::size_t>(old_cells[k].dest)]};
        map[k] = static_cast<std::size_t>(std::find(new_cells.begin(), new_cells.end(), moved) - new_cells.begin());
    }
    return {p, map};
}

TEST_CASE("step is invariant to node enumeration order")
{
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 200; ++trial) {
        const NetworkSpec s = testing::random_spec(gen, 4 + trial % 4);
        const NetworkState st = testing::random_full_state(gen, s);
        std::vector<int> perm(static_cast<std::size_t>(s.n()));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin() + 2, perm.end(), gen);
        const auto [p, map] = permute_hidden(s, perm);

        NetworkState pst = rest_state(p);
        for (int i = 0; i < s.n(); ++i)
            pst.activations[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
                st.activations[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < map.size(); ++k)
            pst.learnable[map[k]] = st.learnable[k];

        const ClampSet clamps = ClampSet::input(s, Spin::Plus);
        const NetworkState a = step(s, st, clamps);
        const NetworkState b = step(p, pst, clamps);
        for (int i = 0; i < s.n(); ++i)
            CHECK(b.activations[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] ==
                  a.activations[static_cast<std::size_t>(i)]);
        for (std::size_t k = 0; k < map.size(); ++k)
            CHECK(b.learnable[map[k]] == a.learnable[k]);
    }
}

TEST_CASE("clamped nodes are unchanged and step is pure")
{
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 200; ++trial) {
        const NetworkSpec s = testing::random_spec(gen, 2 + trial % 7);
        NetworkState st = testing::random_full_state(gen, s);
        const Spin x = spin_of(gen() & 1);
        const Spin y = spin_of(gen() & 1);
        const ClampSet clamps = ClampSet::input_output(s, x, y);
        apply_clamps(st, clamps);
        const NetworkState copy = st;
        const NetworkState a = step(s, st, clamps);
        const NetworkState b = step(s, st, clamps);
        CHECK(st == copy);
        CHECK(a == b);
        CHECK(a.activations[0] == x);
        CHECK(a.activations[1] == y);
    }
}
