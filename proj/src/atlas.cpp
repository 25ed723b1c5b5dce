#include "lbnn/atlas.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lbnn {

namespace {

constexpr std::uint32_t unvisited = 0xffffffffu;
constexpr std::uint32_t on_path = 0xfffffffeu;

} // namespace

StateSpace::StateSpace(const NetworkSpec& spec)
    : spec_(spec), kernel_(spec), width_(spec.n() + spec.learnable_count())
{
    if (width_ > 63)
        throw Error("state vector of " + std::to_string(width_) + " bits does not fit a 64-bit index");
}

StateIndex StateSpace::pack(const NetworkState& s) const { return pack(kernel_.pack(s)); }

NetworkState StateSpace::unpack(StateIndex s) const { return kernel_.unpack(packed(s)); }

std::string StateSpace::format(StateIndex s) const
{
    std::string out;
    out.reserve(static_cast<std::size_t>(width_));
    for (int p = 0; p < width_; ++p)
        out.push_back(((s >> p) & 1u) ? '1' : '0');
    return out;
}

StateIndex StateSpace::parse(const std::string& text) const
{
    if (text.size() != static_cast<std::size_t>(width_))
        throw Error("state string must have " + std::to_string(width_) + " characters");
    StateIndex s = 0;
    for (int p = 0; p < width_; ++p) {
        const char c = text[static_cast<std::size_t>(p)];
        if (c != '0' && c != '1')
            throw Error("state string may contain only 0 and 1");
        if (c == '1')
            s |= StateIndex{1} << p;
    }
    return s;
}

StateIndex StateSpace::transition(StateIndex s, PackedClamp c) const
{
    if (s >> width_)
        throw Error("state index out of range");
    if ((s & c.mask) != (c.values & c.mask))
        throw Error("state " + format(s) + " disagrees with its clamped bits");
    return transition_unchecked(s, c);
}

StateIndex StateSpace::transition(StateIndex s, const ClampSet& clamps) const
{
    return transition(s, kernel_.pack(clamps));
}

std::optional<Spin> Orbit::constant_output(const StateSpace& space) const
{
    const Spin first = space.output(states.front());
    for (StateIndex s : states)
        if (space.output(s) != first)
            return std::nullopt;
    return first;
}

BasinMap::BasinMap(PackedClamp clamp, int width)
    : clamp_mask_(clamp.mask), clamp_values_(clamp.values & clamp.mask)
{
    for (int p = 0; p < width; ++p)
        if (!((clamp_mask_ >> p) & 1u))
            free_positions_.push_back(p);
    free_bits_ = static_cast<int>(free_positions_.size());
}

StateIndex BasinMap::state_at(std::uint64_t compact) const noexcept
{
    StateIndex s = clamp_values_;
    for (int k = 0; k < free_bits_; ++k)
        if ((compact >> k) & 1u)
            s |= StateIndex{1} << free_positions_[static_cast<std::size_t>(k)];
    return s;
}

std::uint64_t BasinMap::compact_of(StateIndex s) const noexcept
{
    std::uint64_t c = 0;
    for (int k = 0; k < free_bits_; ++k)
        if ((s >> free_positions_[static_cast<std::size_t>(k)]) & 1u)
            c |= std::uint64_t{1} << k;
    return c;
}

std::optional<std::uint32_t> OrbitAnalysis::orbit_containing(StateIndex s) const
{
    if (complete) {
        if (!basins.consistent(s) || basins.transient_of(s) != 0)
            return std::nullopt;
        return basins.orbit_of(s);
    }
    for (std::size_t i = 0; i < orbits.size(); ++i)
        if (std::find(orbits[i].states.begin(), orbits[i].states.end(), s) != orbits[i].states.end())
            return static_cast<std::uint32_t>(i);
    return std::nullopt;
}

namespace {

// Rotates so the smallest member comes first.
Orbit canonical_orbit(std::vector<StateIndex> cycle)
{
    const auto min_it = std::min_element(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), min_it, cycle.end());
    return Orbit{std::move(cycle)};
}

} // namespace

OrbitAnalysis find_orbits(const StateSpace& space, PackedClamp clamp, int cap_bits, int workers)
{
    clamp.values &= clamp.mask;
    OrbitAnalysis out;
    out.clamp = clamp;
    out.basins = BasinMap(clamp, space.width());
    BasinMap& basins = out.basins;

    const int free_bits = space.width() - std::popcount(clamp.mask);
    if (free_bits > cap_bits || free_bits > 31)
        throw Error("state space of 2^" + std::to_string(free_bits) + " states exceeds the cap of 2^" +
                    std::to_string(cap_bits));
    const std::uint64_t count = basins.state_count();

    std::vector<std::uint32_t> succ(count);
    const auto signed_count = static_cast<std::ptrdiff_t>(count);
#ifdef _OPENMP
    const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
#else
    (void)workers;
#endif
    for (std::ptrdiff_t c = 0; c < signed_count; ++c) {
        const StateIndex s = basins.state_at(static_cast<std::uint64_t>(c));
        succ[static_cast<std::size_t>(c)] =
            static_cast<std::uint32_t>(basins.compact_of(space.transition_unchecked(s, clamp)));
    }

    // Functional-graph labelling. While a walk is in progress, orbit_ids
    // holds on_path and transients holds the position along the walk.
    auto& orbit = basins.orbit_ids();
    auto& transient = basins.transients();
    orbit.assign(count, unvisited);
    transient.assign(count, 0);
    std::vector<std::vector<std::uint32_t>> raw_orbits;
    std::vector<std::uint32_t> path;

    for (std::uint64_t start = 0; start < count; ++start) {
        if (orbit[start] != unvisited)
            continue;
        path.clear();
        std::uint32_t c = static_cast<std::uint32_t>(start);
        while (orbit[c] == unvisited) {
            orbit[c] = on_path;
            transient[c] = static_cast<std::uint32_t>(path.size());
            path.push_back(c);
            c = succ[c];
        }
        std::uint32_t id;
        std::uint32_t base;
        std::size_t tail_end;
        if (orbit[c] == on_path) {
            const std::size_t cycle_start = transient[c];
            id = static_cast<std::uint32_t>(raw_orbits.size());
            raw_orbits.emplace_back(path.begin() + static_cast<std::ptrdiff_t>(cycle_start), path.end());
            for (std::size_t k = cycle_start; k < path.size(); ++k) {
                orbit[path[k]] = id;
                transient[path[k]] = 0;
            }
            base = 0;
            tail_end = cycle_start;
        } else {
            id = orbit[c];
            base = transient[c];
            tail_end = path.size();
        }
        for (std::size_t k = tail_end; k-- > 0;) {
            orbit[path[k]] = id;
            transient[path[k]] = base + static_cast<std::uint32_t>(tail_end - k);
        }
    }

    // Canonical ids: orbits sorted by their smallest member.
    std::vector<Orbit> orbits;
    orbits.reserve(raw_orbits.size());
    for (const auto& raw : raw_orbits) {
        std::vector<StateIndex> states;
        states.reserve(raw.size());
        for (std::uint32_t c : raw)
            states.push_back(basins.state_at(c));
        orbits.push_back(canonical_orbit(std::move(states)));
    }
    std::vector<std::uint32_t> order(orbits.size());
    for (std::uint32_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return orbits[a].head() < orbits[b].head(); });
    std::vector<std::uint32_t> remap(orbits.size());
    for (std::uint32_t k = 0; k < order.size(); ++k) {
        remap[order[k]] = k;
        out.orbits.push_back(std::move(orbits[order[k]]));
    }
    out.basin_sizes.assign(out.orbits.size(), 0);
    out.max_transient.assign(out.orbits.size(), 0);
    for (std::uint64_t c = 0; c < count; ++c) {
        orbit[c] = remap[orbit[c]];
        ++out.basin_sizes[orbit[c]];
        out.max_transient[orbit[c]] = std::max(out.max_transient[orbit[c]], transient[c]);
    }
    return out;
}

OrbitAnalysis find_orbits(const StateSpace& space, const ClampSet& clamps, int cap_bits, int workers)
{
    clamps.validate(space.spec());
    return find_orbits(space, space.kernel().pack(clamps), cap_bits, workers);
}

OrbitAnalysis sample_orbits(const StateSpace& space, PackedClamp clamp, std::uint64_t samples, Seed seed)
{
    clamp.values &= clamp.mask;
    OrbitAnalysis out;
    out.clamp = clamp;
    out.complete = false;
    Engine rng(seed);
    const StateIndex width_mask = space.width() >= 64 ? ~StateIndex{0} : (StateIndex{1} << space.width()) - 1;
    std::set<std::vector<StateIndex>> found;
    std::unordered_map<StateIndex, std::size_t> seen;
    std::vector<StateIndex> path;
    for (std::uint64_t k = 0; k < samples; ++k) {
        StateIndex s = space.with_clamps(rng() & width_mask, clamp);
        seen.clear();
        path.clear();
        while (seen.emplace(s, path.size()).second) {
            path.push_back(s);
            s = space.transition_unchecked(s, clamp);
        }
        std::vector<StateIndex> cycle(path.begin() + static_cast<std::ptrdiff_t>(seen[s]), path.end());
        found.insert(canonical_orbit(std::move(cycle)).states);
    }
    for (const auto& states : found)
        out.orbits.push_back(Orbit{states});
    std::sort(out.orbits.begin(), out.orbits.end(),
              [](const Orbit& a, const Orbit& b) { return a.head() < b.head(); });
    return out;
}

std::vector<std::vector<StateIndex>> reference_orbit_of_each_state(const StateSpace& space,
                                                                   const ClampSet& clamps)
{
    const BasinMap enumeration(space.kernel().pack(clamps), space.width());
    std::vector<std::vector<StateIndex>> out;
    out.reserve(enumeration.state_count());
    for (std::uint64_t c = 0; c < enumeration.state_count(); ++c) {
        NetworkState state = space.unpack(enumeration.state_at(c));
        std::map<StateIndex, std::size_t> seen;
        std::vector<StateIndex> path;
        StateIndex s = space.pack(state);
        while (seen.emplace(s, path.size()).second) {
            path.push_back(s);
            state = step(space.spec(), state, clamps);
            s = space.pack(state);
        }
        std::vector<StateIndex> cycle(path.begin() + static_cast<std::ptrdiff_t>(seen[s]), path.end());
        out.push_back(canonical_orbit(std::move(cycle)).states);
    }
    return out;
}

std::string code_of(Perturbation p)
{
    switch (p) {
    case Perturbation::FreeMinus: return "0";
    case Perturbation::FreePlus: return "1";
    case Perturbation::ClampMM: return "00";
    case Perturbation::ClampMP: return "01";
    case Perturbation::ClampPM: return "10";
    case Perturbation::ClampPP: return "11";
    }
    return "?";
}

namespace {

struct PerturbationTarget {
    Spin input;
    std::optional<Spin> output;
};

PerturbationTarget target_of(Perturbation p)
{
    switch (p) {
    case Perturbation::FreeMinus: return {Spin::Minus, std::nullopt};
    case Perturbation::FreePlus: return {Spin::Plus, std::nullopt};
    case Perturbation::ClampMM: return {Spin::Minus, Spin::Minus};
    case Perturbation::ClampMP: return {Spin::Minus, Spin::Plus};
    case Perturbation::ClampPM: return {Spin::Plus, Spin::Minus};
    case Perturbation::ClampPP: return {Spin::Plus, Spin::Plus};
    }
    return {Spin::Minus, std::nullopt};
}

// Attractor reached by every member of `orbit` after switching the input;
// empty if members disagree.
std::optional<std::uint32_t> flipped_target(const AttractorAtlas& atlas, const Orbit& orbit, Spin new_input)
{
    const OrbitAnalysis& dest = atlas.free_for(new_input);
    std::optional<std::uint32_t> target;
    for (StateIndex s : orbit.states) {
        const auto id = dest.basins.orbit_of(atlas.space.with_clamps(s, dest.clamp));
        if (target && *target != id)
            return std::nullopt;
        target = id;
    }
    return target;
}

} // namespace

StateIndex AttractorAtlas::perturb(StateIndex s, Perturbation p) const
{
    const auto [x, y] = target_of(p);
    const OrbitAnalysis& free_map = free_for(x);
    if (!y)
        return free_map.orbits[free_map.basins.orbit_of(space.with_clamps(s, free_map.clamp))].head();
    const OrbitAnalysis& held = clamped_for(x, *y);
    const StateIndex settled = held.orbits[held.basins.orbit_of(space.with_clamps(s, held.clamp))].head();
    return free_map.orbits[free_map.basins.orbit_of(settled)].head();
}

std::array<int, 4> AttractorAtlas::function_counts() const
{
    std::array<int, 4> counts{};
    for (const auto& p : pairings)
        if (p.function)
            ++counts[static_cast<std::size_t>(index_of(*p.function))];
    return counts;
}

bool AttractorAtlas::covers_all_functions_once() const
{
    if (pairings.size() != 4)
        return false;
    const auto counts = function_counts();
    return std::all_of(counts.begin(), counts.end(), [](int c) { return c == 1; });
}

std::size_t AttractorAtlas::periodic_point_count() const
{
    std::size_t total = 0;
    for (const auto& analysis : free)
        for (const auto& o : analysis.orbits)
            total += o.states.size();
    return total;
}

AttractorAtlas classify_functions(const NetworkSpec& spec, int cap_bits, int workers)
{
    AttractorAtlas atlas{StateSpace(spec), {}, {}, {}, {}, {}};
    const Kernel& k = atlas.space.kernel();
    for (Spin x : {Spin::Minus, Spin::Plus}) {
        atlas.free[bit_of(x)] = find_orbits(atlas.space, k.clamp_input(x), cap_bits, workers);
        for (Spin y : {Spin::Minus, Spin::Plus})
            atlas.clamped[bit_of(x)][bit_of(y)] =
                find_orbits(atlas.space, k.clamp_input_output(x, y), cap_bits, workers);
    }

    const OrbitAnalysis& plus = atlas.free_for(Spin::Plus);
    const OrbitAnalysis& minus = atlas.free_for(Spin::Minus);
    std::vector<std::optional<std::uint32_t>> forward;
    std::vector<std::optional<std::uint32_t>> backward;
    for (const auto& o : plus.orbits)
        forward.push_back(flipped_target(atlas, o, Spin::Minus));
    for (const auto& o : minus.orbits)
        backward.push_back(flipped_target(atlas, o, Spin::Plus));

    for (std::uint32_t a = 0; a < forward.size(); ++a) {
        const auto b = forward[a];
        if (b && backward[*b] == a) {
            Pairing p{a, *b, std::nullopt};
            const auto out_plus = plus.orbits[a].constant_output(atlas.space);
            const auto out_minus = minus.orbits[*b].constant_output(atlas.space);
            if (out_plus && out_minus)
                p.function = function_from_outputs(*out_plus, *out_minus);
            atlas.pairings.push_back(p);
        } else {
            atlas.unpaired.push_back({Spin::Plus, a, b});
        }
    }
    for (std::uint32_t b = 0; b < backward.size(); ++b) {
        const auto a = backward[b];
        if (!(a && forward[*a] == b))
            atlas.unpaired.push_back({Spin::Minus, b, a});
    }

    for (Spin x : {Spin::Minus, Spin::Plus}) {
        for (Spin y : {Spin::Minus, Spin::Plus}) {
            const OrbitAnalysis& held = atlas.clamped_for(x, y);
            for (std::uint32_t i = 0; i < held.orbits.size(); ++i)
                atlas.releases.push_back(
                    {x, y, i, atlas.free_for(x).basins.orbit_of(held.orbits[i].head())});
        }
    }
    return atlas;
}

std::string export_transition_diagram(const AttractorAtlas& atlas, const DiagramOptions& opts)
{
    std::vector<StateIndex> nodes;
    for (const auto& analysis : atlas.free)
        for (const auto& o : analysis.orbits)
            nodes.insert(nodes.end(), o.states.begin(), o.states.end());
    std::sort(nodes.begin(), nodes.end());

    const auto& space = atlas.space;
    std::ostringstream dot;
    dot << "digraph lbnn {\n";
    dot << "  node [shape=box, fontname=\"monospace\"];\n";
    for (StateIndex s : nodes)
        dot << "  \"" << space.format(s) << "\";\n";
    for (StateIndex tail : nodes) {
        std::vector<std::pair<StateIndex, std::string>> edges;
        for (Perturbation p : all_perturbations) {
            const StateIndex head = atlas.perturb(tail, p);
            if (head == tail && !opts.include_self_loops)
                continue;
            auto it = std::find_if(edges.begin(), edges.end(), [&](const auto& e) { return e.first == head; });
            if (it == edges.end())
                edges.emplace_back(head, code_of(p));
            else
                it->second += "," + code_of(p);
        }
        for (const auto& [head, label] : edges)
            dot << "  \"" << space.format(tail) << "\" -> \"" << space.format(head) << "\" [label=\"" << label
                << "\"];\n";
    }
    dot << "}\n";
    return dot.str();
}

std::string format_report(const AttractorAtlas& atlas)
{
    const auto& space = atlas.space;
    std::ostringstream out;
    const NetworkSpec& spec = space.spec();
    out << "Network: n=" << spec.n() << " m=" << spec.m() << " learnable=" << spec.learnable_count()
        << " rule=" << spec.rule().to_string() << (spec.rule() == hebb_rule() ? " (hebb)" : "") << '\n';
    out << "State layout: input, output, hidden x" << spec.hidden_count() << ", learnable x"
        << spec.learnable_count() << " (" << space.width() << " bits, 0 means -1)\n";

    for (Spin x : {Spin::Minus, Spin::Plus}) {
        const OrbitAnalysis& a = atlas.free_for(x);
        out << "\nInput clamped to " << glyph_of(x) << ": " << a.orbits.size() << " periodic orbit(s) over "
            << a.basins.state_count() << " states\n";
        std::vector<std::vector<StateIndex>> members(a.orbits.size());
        for (std::uint64_t c = 0; c < a.basins.state_count(); ++c) {
            const StateIndex s = a.basins.state_at(c);
            members[a.basins.orbit_of(s)].push_back(s);
        }
        for (std::size_t i = 0; i < a.orbits.size(); ++i) {
            const Orbit& o = a.orbits[i];
            out << "  orbit " << i << " period " << o.period() << ":";
            for (StateIndex s : o.states)
                out << ' ' << space.format(s);
            out << "  basin " << a.basin_sizes[i] << " states, max transient " << a.max_transient[i] << '\n';
            for (std::size_t k = 0; k < members[i].size(); ++k) {
                out << (k % 3 == 0 ? "      " : "  ") << space.format(members[i][k]);
                if (k % 3 == 2 || k + 1 == members[i].size())
                    out << '\n';
            }
        }
    }

    out << "\nPairings (input 1 orbit <-> input 0 orbit):\n";
    if (atlas.pairings.empty())
        out << "  none\n";
    for (const auto& p : atlas.pairings) {
        const Orbit& a = atlas.free_for(Spin::Plus).orbits[p.plus_orbit];
        const Orbit& b = atlas.free_for(Spin::Minus).orbits[p.minus_orbit];
        out << "  " << space.format(a.head()) << " <-> " << space.format(b.head()) << "  ";
        if (p.function)
            out << name_of(*p.function) << " (1, " << glyph_of(apply(*p.function, Spin::Plus)) << ") (0, "
                << glyph_of(apply(*p.function, Spin::Minus)) << ")\n";
        else
            out << "output not constant\n";
    }
    if (!atlas.unpaired.empty()) {
        out << "Unpaired:\n";
        for (const auto& u : atlas.unpaired) {
            const Orbit& o = atlas.free_for(u.input).orbits[u.orbit];
            out << "  input " << glyph_of(u.input) << " orbit " << space.format(o.head()) << " -> ";
            if (u.target)
                out << space.format(atlas.free_for(-u.input).orbits[*u.target].head()) << " (one-way)\n";
            else
                out << "split\n";
        }
    }

    const auto counts = atlas.function_counts();
    out << "\nRepresented functions:";
    for (BoolFn f : all_functions)
        out << ' ' << name_of(f) << "=" << counts[static_cast<std::size_t>(index_of(f))];
    out << (atlas.covers_all_functions_once() ? "  (all four, once each)" : "") << '\n';

    out << "\nInput and output clamped: orbit -> attractor after releasing the output\n";
    for (const auto& r : atlas.releases) {
        const Orbit& held = atlas.clamped_for(r.input, r.output).orbits[r.clamped_orbit];
        const Orbit& freed = atlas.free_for(r.input).orbits[r.free_orbit];
        out << "  " << glyph_of(r.input) << glyph_of(r.output) << "  " << space.format(held.head());
        if (held.period() > 1)
            out << " (period " << held.period() << ")";
        out << " -> " << space.format(freed.head()) << '\n';
    }
    return out.str();
}

} // namespace lbnn
