#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lbnn/network.hpp"

namespace lbnn {

// 3n^2 + 4 for n >= 2.
std::size_t genome_length(int n);

// Node count for a given genome length, or throws if none exists.
int nodes_for_length(std::size_t length);

// Layout: bits [0, 4) are the learning rule table in LearningRule index
// order; then 3 bits per ordered pair (i, j), row-major, at offset
// 4 + 3 * (i * n + j): non-zero, learnable, sign.
class Genome {
public:
    Genome() = default;
    Genome(int n, std::vector<std::uint8_t> bits);

    static Genome zeros(int n);
    static Genome from_string(int n, std::string_view bits);

    int n() const noexcept { return n_; }
    std::size_t size() const noexcept { return bits_.size(); }
    bool operator[](std::size_t i) const { return bits_[i] != 0; }
    void set(std::size_t i, bool v) { bits_.at(i) = v ? 1 : 0; }
    void flip(std::size_t i) { bits_.at(i) ^= 1; }
    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

    static constexpr std::size_t rule_bits = 4;
    static std::size_t cell_offset(int n, int source, int dest)
    {
        return rule_bits + 3 * static_cast<std::size_t>(source * n + dest);
    }

    std::string to_string() const;

    friend bool operator==(const Genome&, const Genome&) = default;
    friend auto operator<=>(const Genome& a, const Genome& b) { return a.bits_ <=> b.bits_; }

private:
    int n_ = 0;
    std::vector<std::uint8_t> bits_;
};

// Total on correct-length strings; m inputs, node m is the output.
NetworkSpec decode(const Genome& g, int m = 1);

// Canonical encoding: don't-care bits (B and C of Absent cells, C of
// Learnable cells) are zero.
Genome encode(const NetworkSpec& spec);

Genome random_genome(int n, Seed seed);
Genome random_genome(int n, Engine& rng);

// Genome text files: optional "# n=<n>" header, then one 0/1 line per genome.
struct GenomeFile {
    int n = 0;
    std::vector<Genome> genomes;
};

// Diagnoses bad input by line and column.
GenomeFile read_genome_file(std::istream& in);
void write_genome_file(std::ostream& out, const GenomeFile& file);

} // namespace lbnn
