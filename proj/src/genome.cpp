#include "lbnn/genome.hpp"

#include <cmath>
#include <istream>
#include <ostream>

namespace lbnn {

std::size_t genome_length(int n)
{
    if (n < 2)
        throw Error("genome needs at least 2 nodes (input and output), got " + std::to_string(n));
    return 3 * static_cast<std::size_t>(n) * static_cast<std::size_t>(n) + Genome::rule_bits;
}

int nodes_for_length(std::size_t length)
{
    if (length >= 16 && (length - 4) % 3 == 0) {
        const auto sq = (length - 4) / 3;
        const auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(sq))));
        if (static_cast<std::size_t>(n) * static_cast<std::size_t>(n) == sq)
            return n;
    }
    throw Error("no node count gives a genome of length " + std::to_string(length));
}

Genome::Genome(int n, std::vector<std::uint8_t> bits) : n_(n), bits_(std::move(bits))
{
    if (bits_.size() != genome_length(n))
        throw Error("genome length " + std::to_string(bits_.size()) + " does not match n=" + std::to_string(n) +
                    " (expected " + std::to_string(genome_length(n)) + ")");
    for (auto& b : bits_)
        b = b ? 1 : 0;
}

Genome Genome::zeros(int n) { return Genome(n, std::vector<std::uint8_t>(genome_length(n), 0)); }

Genome Genome::from_string(int n, std::string_view bits)
{
    std::vector<std::uint8_t> v;
    v.reserve(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != '0' && bits[i] != '1')
            throw Error("invalid genome character '" + std::string(1, bits[i]) + "' at column " +
                        std::to_string(i + 1));
        v.push_back(bits[i] == '1');
    }
    return Genome(n, std::move(v));
}

std::string Genome::to_string() const
{
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_)
        s.push_back(b ? '1' : '0');
    return s;
}

NetworkSpec decode(const Genome& g, int m)
{
    const int n = g.n();
    if (g.size() != genome_length(n))
        throw Error("genome length mismatch");
    LearningRule rule;
    for (std::size_t k = 0; k < Genome::rule_bits; ++k)
        rule.table[k] = spin_of(g[k]);

    std::vector<WeightCell> cells(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const std::size_t off = Genome::cell_offset(n, i, j);
            WeightCell& c = cells[static_cast<std::size_t>(i * n + j)];
            if (!g[off])
                c = WeightCell::absent();
            else if (g[off + 1])
                c = WeightCell::learnable();
            else
                c = WeightCell::fixed(spin_of(g[off + 2]));
        }
    }
    return NetworkSpec(n, m, std::move(cells), rule);
}

Genome encode(const NetworkSpec& spec)
{
    const int n = spec.n();
    Genome g = Genome::zeros(n);
    for (std::size_t k = 0; k < Genome::rule_bits; ++k)
        g.set(k, bit_of(spec.rule().table[k]));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const std::size_t off = Genome::cell_offset(n, i, j);
            const WeightCell& c = spec.cell(i, j);
            switch (c.kind) {
            case WeightKind::Absent:
                break;
            case WeightKind::Learnable:
                g.set(off, true);
                g.set(off + 1, true);
                break;
            case WeightKind::Fixed:
                g.set(off, true);
                g.set(off + 2, bit_of(c.sign));
                break;
            }
        }
    }
    return g;
}

Genome random_genome(int n, Engine& rng)
{
    std::vector<std::uint8_t> bits(genome_length(n));
    for (auto& b : bits)
        b = draw_bit(rng);
    return Genome(n, std::move(bits));
}

Genome random_genome(int n, Seed seed)
{
    Engine rng(seed);
    return random_genome(n, rng);
}

GenomeFile read_genome_file(std::istream& in)
{
    GenomeFile file;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto where = "line " + std::to_string(line_no);
        if (line[0] == '#') {
            const auto pos = line.find("n=");
            if (pos == std::string::npos)
                continue;
            if (header_seen || !file.genomes.empty())
                throw Error(where + ": node-count header must come first");
            try {
                std::size_t used = 0;
                file.n = std::stoi(line.substr(pos + 2), &used);
                if (pos + 2 + used != line.size())
                    throw Error("trailing characters");
            } catch (const std::exception&) {
                throw Error(where + ", column " + std::to_string(pos + 3) + ": malformed node count");
            }
            header_seen = true;
            continue;
        }
        int n = file.n;
        if (n == 0) {
            try {
                n = nodes_for_length(line.size());
            } catch (const Error& e) {
                throw Error(where + ": " + e.what());
            }
            file.n = n;
        }
        try {
            file.genomes.push_back(Genome::from_string(n, line));
        } catch (const Error& e) {
            throw Error(where + ": " + e.what());
        }
    }
    if (file.genomes.empty())
        throw Error("genome file contains no genomes");
    return file;
}

void write_genome_file(std::ostream& out, const GenomeFile& file)
{
    out << "# n=" << file.n << '\n';
    for (const auto& g : file.genomes)
        out << g.to_string() << '\n';
}

} // namespace lbnn
