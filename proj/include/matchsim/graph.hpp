#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "matchsim/errors.hpp"

namespace matchsim {

// Classes are 1-based everywhere, matching the I/O convention. Adjacency is
// kept both as sorted neighbor lists and as bitmasks (bit c-1 = class c),
// which caps n at 30; every verification target in this project has n <= 12.
class CompatibilityGraph {
public:
    static CompatibilityGraph from_edge_list(int n, const std::vector<std::pair<int, int>>& pairs);

    int num_classes() const { return n_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    bool adjacent(int i, int j) const { return (adj_mask_[i] >> (j - 1)) & 1u; }
    const std::vector<int>& neighbors(int i) const { return neighbors_[i]; }
    std::uint32_t neighbor_mask(int i) const { return adj_mask_[i]; }

    bool contains(int c) const { return c >= 1 && c <= n_; }
    void require_class(int c) const {
        if (!contains(c)) throw Error(errc::out_of_range, "class " + std::to_string(c));
    }

    // canonical text form: "n" line, then one "i j" line per edge, sorted
    std::string to_text() const;
    std::string to_json() const;
    std::uint64_t hash() const;

    bool operator==(const CompatibilityGraph& other) const {
        return n_ == other.n_ && edges_ == other.edges_;
    }

private:
    CompatibilityGraph() = default;

    int n_ = 0;
    std::vector<std::pair<int, int>> edges_;       // sorted, i < j
    std::vector<std::vector<int>> neighbors_;      // 1-based, sorted
    std::vector<std::uint32_t> adj_mask_;          // 1-based
};

// full-support probability vector over classes
class ArrivalDistribution {
public:
    explicit ArrivalDistribution(std::vector<double> probs);
    static ArrivalDistribution uniform(int n);

    int size() const { return static_cast<int>(probs_.size()); }
    double prob(int c) const { return probs_[c - 1]; }
    const std::vector<double>& probs() const { return probs_; }

    double mass_of_set(const std::vector<int>& classes) const;

    // CDF inversion of a uniform [0,1) draw
    int sample_class(double unit) const;

private:
    std::vector<double> probs_;
};

// An odd closed walk c_1 -- c_2 -- ... -- c_{2q+1} -- c_1. Simple when it is
// an induced cycle; spanning walks may repeat nodes.
struct OddCycleCert {
    std::vector<int> nodes;

    int length() const { return static_cast<int>(nodes.size()); }
    bool verify(const CompatibilityGraph& g) const;
};

struct NcondReport {
    bool holds = false;
    std::optional<std::vector<int>> witness;  // first violating independent set
    double witness_mu_set = 0.0;
    double witness_mu_neighborhood = 0.0;
};

struct MultipartiteReport {
    bool is_cpp = false;
    std::optional<std::vector<std::vector<int>>> parts;
};

std::vector<int> neighbors_of_set(const CompatibilityGraph& g, const std::vector<int>& classes);

// All nonempty independent sets, ordered by size then lexicographically.
// Refuses n > 20 (2^n enumeration).
std::vector<std::vector<int>> enumerate_independent_sets(const CompatibilityGraph& g);

NcondReport ncond_check(const CompatibilityGraph& g, const ArrivalDistribution& mu);

bool is_bipartite(const CompatibilityGraph& g);

// Shortest induced odd cycle, canonicalized to start at its smallest node and
// run toward the smaller neighbor. Empty when the graph is bipartite.
std::optional<OddCycleCert> find_induced_odd_cycle(const CompatibilityGraph& g);

// Odd closed walk covering every class: smallest induced odd cycle plus
// out-and-back shortest-path trips from its first node to each uncovered
// node, visited in ascending class order.
OddCycleCert spanning_odd_cycle(const CompatibilityGraph& g);

MultipartiteReport classify_complete_multipartite(const CompatibilityGraph& g);

// --- file formats ------------------------------------------------------

CompatibilityGraph parse_graph(const std::string& content);
CompatibilityGraph load_graph_file(const std::string& path);

// --- built-in graphs ----------------------------------------------------

CompatibilityGraph make_paw();
CompatibilityGraph make_cycle(int length);
// Parts are labeled round-robin: with sizes (2,2,2) the parts come out as
// {1,4}, {2,5}, {3,6}.
CompatibilityGraph make_complete_multipartite(const std::vector<int>& part_sizes);

}  // namespace matchsim
