#include "matchsim/matchings.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace matchsim {

bool ConstructionPointSet::contains(long t) const {
    return std::binary_search(times.begin(), times.end(), t);
}

SimulateResult simulate_with_construction_points(const CompatibilityGraph& g,
                                                 const PolicySpec& policy,
                                                 const ArrivalDistribution& mu, const Word& start,
                                                 long n_steps, std::uint64_t seed) {
    policy.validate(g);
    if (!is_admissible(g, start)) throw Error(errc::inadmissible_state, word_to_string(start));
    const bool needs_prefs = policy.sigma_dependent();

    SimulateResult result;
    Word buffer;
    std::vector<int> buffer_indices;
    for (int c : start) {
        buffer_indices.push_back(static_cast<int>(result.trace.arrivals.size()));
        buffer.push_back(c);
        result.trace.arrivals.push_back(c);
    }
    if (buffer.empty()) result.cps.times.push_back(0);

    for (long t = 0; t < n_steps; ++t) {
        for (int slot = 0; slot < 2; ++slot) {
            int klass = mu.sample_class(
                stream_rng(seed, t, slot == 0 ? slot_class0 : slot_class1).next_unit());
            std::optional<PreferenceList> pref;
            if (needs_prefs) {
                Rng rng = stream_rng(seed, t, slot == 0 ? slot_pref0 : slot_pref1);
                pref = draw_preference(g, klass, rng);
            }
            int index = static_cast<int>(result.trace.arrivals.size());
            result.trace.arrivals.push_back(klass);
            const std::vector<int>* order = pref ? &pref->order : nullptr;
            std::optional<int> pos = select_match(g, policy, buffer, klass, order, nullptr);
            if (pos) {
                result.trace.edges.push_back({buffer_indices[*pos], index});
                buffer.erase(buffer.begin() + *pos);
                buffer_indices.erase(buffer_indices.begin() + *pos);
            } else {
                buffer.push_back(klass);
                buffer_indices.push_back(index);
            }
        }
        if (buffer.empty()) result.cps.times.push_back(t + 1);
    }
    result.trace.leftover = buffer;
    result.trace.leftover_indices = buffer_indices;
    return result;
}

std::vector<MatchingTrace> split_into_blocks(const SimulateResult& run) {
    std::vector<MatchingTrace> blocks;
    const auto& cps = run.cps.times;
    for (std::size_t k = 0; k + 1 < cps.size(); ++k) {
        int begin = static_cast<int>(2 * cps[k]);
        int end = static_cast<int>(2 * cps[k + 1]);
        MatchingTrace block;
        block.arrivals.assign(run.trace.arrivals.begin() + begin,
                              run.trace.arrivals.begin() + end);
        for (const MatchEdge& e : run.trace.edges)
            if (e.a >= begin && e.a < end && e.b >= begin && e.b < end)
                block.edges.push_back({e.a - begin, e.b - begin});
        blocks.push_back(std::move(block));
    }
    return blocks;
}

namespace {

struct WindowProbe {
    bool resolved = false;
    std::vector<WindowItem> items;

    friend bool operator==(const WindowProbe&, const WindowProbe&) = default;
};

WindowProbe probe_window(const CompatibilityGraph& g, const PolicySpec& policy,
                         const ArrivalDistribution& mu, long a, long b, long start_time,
                         std::uint64_t seed, long forward_cap) {
    const bool needs_prefs = policy.sigma_dependent();
    WindowProbe probe;
    std::map<long, std::pair<long, int>> matches;  // window time -> (partner time, class)
    std::map<long, int> classes;

    Word buffer;
    std::vector<long> buffer_times;
    long t = start_time;
    for (;;) {
        if (t >= b && buffer.empty()) break;
        if (t - start_time > forward_cap + (b - start_time)) return probe;  // unresolved

        int klass = mu.sample_class(stream_rng(seed, t, slot_single).next_unit());
        if (t >= a && t < b) classes[t] = klass;
        std::optional<PreferenceList> pref;
        if (needs_prefs) {
            Rng rng = stream_rng(seed, t, slot_single_pref);
            pref = draw_preference(g, klass, rng);
        }
        const std::vector<int>* order = pref ? &pref->order : nullptr;
        std::optional<int> pos = select_match(g, policy, buffer, klass, order, nullptr);
        if (pos) {
            long partner = buffer_times[*pos];
            int partner_class = buffer[*pos];
            if (partner >= a && partner < b) matches[partner] = {t, klass};
            if (t >= a && t < b) matches[t] = {partner, partner_class};
            buffer.erase(buffer.begin() + *pos);
            buffer_times.erase(buffer_times.begin() + *pos);
        } else {
            buffer.push_back(klass);
            buffer_times.push_back(t);
        }
        ++t;
    }

    probe.resolved = true;
    for (long w = a; w < b; ++w) {
        WindowItem item;
        item.time = w;
        item.klass = classes.at(w);
        auto it = matches.find(w);
        if (it == matches.end()) return {};  // should not happen once the buffer empties
        item.partner_time = it->second.first;
        item.partner_class = it->second.second;
        probe.items.push_back(item);
    }
    return probe;
}

}  // namespace

BiMatchWindow biinfinite_window(const CompatibilityGraph& g, const PolicySpec& policy,
                                const ArrivalDistribution& mu, long a, long b,
                                const std::vector<long>& depth_schedule, std::uint64_t seed,
                                long forward_cap) {
    if (a > b) throw Error(errc::bad_input, "window must satisfy a <= b");
    if (depth_schedule.size() < 3)
        throw Error(errc::bad_input, "depth schedule needs at least three entries");
    for (std::size_t k = 0; k + 1 < depth_schedule.size(); ++k) {
        if (depth_schedule[k] >= depth_schedule[k + 1])
            throw Error(errc::bad_input, "depth schedule must increase");
        if ((depth_schedule[k] & 1L) != (depth_schedule[k + 1] & 1L))
            throw Error(errc::bad_input, "depth schedule must keep one parity");
    }
    for (long depth : depth_schedule)
        if (-depth >= a) throw Error(errc::bad_input, "depths must start before the window");

    std::vector<WindowProbe> probes;
    for (long depth : depth_schedule)
        probes.push_back(probe_window(g, policy, mu, a, b, -depth, seed, forward_cap));

    // accept the first agreeing consecutive pair, then re-check one deeper
    // depth (the next schedule entry, or double the last when exhausted) to
    // guard against coincidental agreement
    for (std::size_t k = 0; k + 1 < probes.size(); ++k) {
        if (!probes[k].resolved || !probes[k + 1].resolved) continue;
        if (!(probes[k] == probes[k + 1])) continue;
        WindowProbe confirm =
            k + 2 < probes.size()
                ? probes[k + 2]
                : probe_window(g, policy, mu, a, b, -2 * depth_schedule.back(), seed, forward_cap);
        if (!confirm.resolved || !(confirm == probes[k])) continue;
        BiMatchWindow window;
        window.begin = a;
        window.end = b;
        window.items = probes[k].items;
        window.stabilized_from = depth_schedule[k];
        return window;
    }
    throw Error(errc::not_stabilized, "window matching did not stabilize within the schedule");
}

bool fcfm_reverse_check(const CompatibilityGraph& g, const MatchingTrace& block) {
    if (!block.perfectly_matched() || block.arrivals.empty())
        throw Error(errc::not_perfect, "block is not perfectly matched");

    MatchingTrace recomputed =
        run_word(g, PolicySpec::fcfm(), {}, block.arrivals, {}, nullptr);
    auto canon = [](std::vector<MatchEdge> edges) {
        std::sort(edges.begin(), edges.end(),
                  [](const MatchEdge& x, const MatchEdge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
        return edges;
    };
    if (canon(recomputed.edges) != canon(block.edges) || !recomputed.leftover.empty())
        throw Error(errc::not_fcfm, "block is not an FCFM matching");

    int length = static_cast<int>(block.arrivals.size());
    // exchange: every item takes the class of its match, then reverse time
    Word reversed(length, 0);
    for (int k = 0; k < length; ++k) {
        auto partner = block.partner_of(k);
        reversed[length - 1 - k] = block.arrivals[*partner];
    }
    MatchingTrace mirrored = run_word(g, PolicySpec::fcfm(), {}, reversed, {}, nullptr);

    std::vector<MatchEdge> expected;
    for (const MatchEdge& e : block.edges)
        expected.push_back({length - 1 - e.b, length - 1 - e.a});
    return canon(mirrored.edges) == canon(expected) && mirrored.leftover.empty();
}

std::string window_to_text(const BiMatchWindow& window) {
    std::ostringstream out;
    for (const WindowItem& item : window.items)
        out << item.time << ' ' << item.klass << ' ' << item.partner_time << ' '
            << item.partner_class << '\n';
    return out.str();
}

}  // namespace matchsim
