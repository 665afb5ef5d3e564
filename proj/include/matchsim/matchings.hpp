#pragma once

#include <cstdint>
#include <vector>

#include "matchsim/policy.hpp"

namespace matchsim {

// Even times at which the buffer is empty; perfect matchings concatenate
// between consecutive construction points.
struct ConstructionPointSet {
    std::vector<long> times;

    bool contains(long t) const;
};

struct SimulateResult {
    MatchingTrace trace;  // arrival index k = the k-th entered item
    ConstructionPointSet cps;
};

// Forward even-time simulation with an unbounded buffer; n_steps arrival
// pairs drawn from the (seed, t)-indexed stream.
SimulateResult simulate_with_construction_points(const CompatibilityGraph& g,
                                                 const PolicySpec& policy,
                                                 const ArrivalDistribution& mu, const Word& start,
                                                 long n_steps, std::uint64_t seed);

// sub-traces between consecutive construction points (arrival indices
// re-based to each block); only defined for runs started empty
std::vector<MatchingTrace> split_into_blocks(const SimulateResult& run);

struct WindowItem {
    long time = 0;
    int klass = 0;
    long partner_time = 0;
    int partner_class = 0;

    friend bool operator==(const WindowItem&, const WindowItem&) = default;
};

struct BiMatchWindow {
    long begin = 0;
    long end = 0;
    std::vector<WindowItem> items;  // one per arrival time in [begin, end)
    long stabilized_from = 0;
};

// Matching of the window [a, b) on the single-arrival time scale, obtained by
// starting empty at -k for each depth in the schedule (all of one parity) and
// accepting once three consecutive depths agree item-for-item.
BiMatchWindow biinfinite_window(const CompatibilityGraph& g, const PolicySpec& policy,
                                const ArrivalDistribution& mu, long a, long b,
                                const std::vector<long>& depth_schedule, std::uint64_t seed,
                                long forward_cap = 200000);

// The reverse-time property of perfectly matched FCFM blocks: relabel every
// item with its match's class, read the block right to left, and the FCFM
// matching of that word mirrors the original edge set.
bool fcfm_reverse_check(const CompatibilityGraph& g, const MatchingTrace& block);

std::string window_to_text(const BiMatchWindow& window);

}  // namespace matchsim
