#include "matchsim/policy.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace matchsim {

const char* policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::fcfm: return "fcfm";
        case PolicyKind::lcfm: return "lcfm";
        case PolicyKind::ml: return "ml";
        case PolicyKind::ms: return "ms";
        case PolicyKind::priority: return "priority";
        case PolicyKind::uniform: return "uniform";
    }
    return "?";
}

PolicyKind policy_from_name(const std::string& name) {
    if (name == "fcfm") return PolicyKind::fcfm;
    if (name == "lcfm") return PolicyKind::lcfm;
    if (name == "ml") return PolicyKind::ml;
    if (name == "ms") return PolicyKind::ms;
    if (name == "priority") return PolicyKind::priority;
    if (name == "uniform" || name == "u") return PolicyKind::uniform;
    throw Error(errc::bad_input, "unknown policy '" + name + "'");
}

PolicySpec PolicySpec::priority_ascending(const CompatibilityGraph& g) {
    std::vector<std::vector<int>> lists(g.num_classes() + 1);
    for (int c = 1; c <= g.num_classes(); ++c) lists[c] = g.neighbors(c);
    return priority(std::move(lists));
}

void PolicySpec::validate(const CompatibilityGraph& g) const {
    if (kind != PolicyKind::priority) {
        if (!priority_lists.empty())
            throw Error(errc::bad_input, "priority lists given for a non-priority policy");
        return;
    }
    if (static_cast<int>(priority_lists.size()) != g.num_classes() + 1)
        throw Error(errc::bad_input, "priority policy needs one list per class");
    for (int c = 1; c <= g.num_classes(); ++c) {
        std::vector<int> sorted = priority_lists[c];
        std::sort(sorted.begin(), sorted.end());
        if (sorted != g.neighbors(c))
            throw Error(errc::bad_input,
                        "priority list of class " + std::to_string(c) +
                            " is not a permutation of its neighbor set");
    }
}

std::string PolicySpec::describe() const {
    std::string out = policy_name(kind);
    if (kind == PolicyKind::priority) {
        out += '[';
        for (std::size_t c = 1; c < priority_lists.size(); ++c) {
            if (c > 1) out += ';';
            for (std::size_t k = 0; k < priority_lists[c].size(); ++k) {
                if (k) out += ',';
                out += std::to_string(priority_lists[c][k]);
            }
        }
        out += ']';
    }
    return out;
}

std::optional<int> MatchingTrace::partner_of(int index) const {
    for (const auto& e : edges) {
        if (e.a == index) return e.b;
        if (e.b == index) return e.a;
    }
    return std::nullopt;
}

namespace {

// per-class counts and presence restricted to E(v)
struct CompatView {
    std::vector<int> present_classes;  // ascending
    std::vector<int> count;            // 1-based
};

CompatView compat_view(const CompatibilityGraph& g, const Word& q, int v) {
    CompatView view;
    view.count.assign(g.num_classes() + 1, 0);
    for (int c : q) ++view.count[c];
    for (int c : g.neighbors(v))
        if (view.count[c] > 0) view.present_classes.push_back(c);
    return view;
}

int oldest_position_of_class(const Word& q, int c) {
    for (std::size_t k = 0; k < q.size(); ++k)
        if (q[k] == c) return static_cast<int>(k);
    return -1;
}

// Tie-break candidate classes for a sigma-dependent policy: ML keeps the
// longest queues, MS the shortest nonempty ones, UNIFORM every nonempty one.
std::vector<int> tie_break_set(PolicyKind kind, const CompatView& view) {
    std::vector<int> out;
    if (view.present_classes.empty()) return out;
    if (kind == PolicyKind::uniform || kind == PolicyKind::priority) return view.present_classes;
    int best = view.count[view.present_classes.front()];
    for (int c : view.present_classes) {
        int len = view.count[c];
        best = (kind == PolicyKind::ml) ? std::max(best, len) : std::min(best, len);
    }
    for (int c : view.present_classes)
        if (view.count[c] == best) out.push_back(c);
    return out;
}

int first_in_order(const std::vector<int>& order, const std::vector<int>& allowed) {
    for (int c : order)
        if (std::find(allowed.begin(), allowed.end(), c) != allowed.end()) return c;
    throw Error(errc::bad_input, "preference list misses a compatible class");
}

}  // namespace

std::optional<int> select_match(const CompatibilityGraph& g, const PolicySpec& policy,
                                const Word& q, int v, const std::vector<int>* pref, Rng* rng) {
    g.require_class(v);
    if (policy.kind == PolicyKind::fcfm || policy.kind == PolicyKind::lcfm) {
        int found = -1;
        for (std::size_t k = 0; k < q.size(); ++k) {
            if (!g.adjacent(q[k], v)) continue;
            found = static_cast<int>(k);
            if (policy.kind == PolicyKind::fcfm) break;  // oldest; LCFM keeps scanning
        }
        if (found < 0) return std::nullopt;
        return found;
    }

    CompatView view = compat_view(g, q, v);
    if (view.present_classes.empty()) return std::nullopt;
    std::vector<int> allowed = tie_break_set(policy.kind, view);

    int chosen;
    if (policy.kind == PolicyKind::priority) {
        chosen = first_in_order(policy.priority_lists[v], allowed);
    } else if (allowed.size() == 1) {
        chosen = allowed.front();
    } else if (pref != nullptr) {
        chosen = first_in_order(*pref, allowed);
    } else if (rng != nullptr) {
        PreferenceList drawn = draw_preference(g, v, *rng);
        chosen = first_in_order(drawn.order, allowed);
    } else {
        throw Error(errc::bad_input, "sigma-dependent policy needs a preference list or rng");
    }
    return oldest_position_of_class(q, chosen);  // FCFM within classes
}

ArrivalOutcome apply_arrival(const CompatibilityGraph& g, const PolicySpec& policy, const Word& q,
                             const ArrivalEvent& event, Rng* rng) {
    if (!is_admissible(g, q)) throw Error(errc::inadmissible_state, word_to_string(q));
    const std::vector<int>* pref = event.pref ? &event.pref->order : nullptr;
    std::optional<int> pos = select_match(g, policy, q, event.klass, pref, rng);
    ArrivalOutcome out;
    out.queue = q;
    if (pos) {
        out.queue.erase(out.queue.begin() + *pos);
        out.matched_index = pos;
    } else {
        out.queue.push_back(event.klass);
    }
    return out;
}

Counts apply_class(const CompatibilityGraph& g, const PolicySpec& policy, const Counts& x,
                   const ArrivalEvent& event, Rng* rng) {
    if (!policy.class_admissible())
        throw Error(errc::policy_not_class_admissible, policy_name(policy.kind));
    if (!is_admissible_counts(g, x)) throw Error(errc::inadmissible_state, counts_to_string(x));
    int v = event.klass;
    g.require_class(v);

    // reuse the queue-level selection on a canonical queue with image x
    Word q;
    for (int c = 1; c <= g.num_classes(); ++c)
        q.insert(q.end(), x[c - 1], c);
    const std::vector<int>* pref = event.pref ? &event.pref->order : nullptr;
    std::optional<int> pos = select_match(g, policy, q, v, pref, rng);

    Counts next = x;
    if (pos)
        --next[q[*pos] - 1];
    else
        ++next[v - 1];
    return next;
}

MatchingTrace run_word(const CompatibilityGraph& g, const PolicySpec& policy, const Word& initial,
                       const Word& z, const std::vector<PreferenceList>& prefs, Rng* rng) {
    if (!prefs.empty() && prefs.size() != z.size())
        throw Error(errc::dimension_mismatch, "need one preference list per arrival");
    if (!is_admissible(g, initial)) throw Error(errc::inadmissible_state, word_to_string(initial));

    MatchingTrace trace;
    std::vector<int> buffer_indices;
    Word buffer;

    // initial letters enter first; they are mutually incompatible so none match
    for (int c : initial) {
        g.require_class(c);
        buffer_indices.push_back(static_cast<int>(trace.arrivals.size()));
        buffer.push_back(c);
        trace.arrivals.push_back(c);
    }
    for (std::size_t k = 0; k < z.size(); ++k) {
        int index = static_cast<int>(trace.arrivals.size());
        trace.arrivals.push_back(z[k]);
        ArrivalEvent event{z[k], prefs.empty() ? std::nullopt : std::optional(prefs[k])};
        const std::vector<int>* pref = event.pref ? &event.pref->order : nullptr;
        std::optional<int> pos = select_match(g, policy, buffer, z[k], pref, rng);
        if (pos) {
            trace.edges.push_back({buffer_indices[*pos], index});
            buffer.erase(buffer.begin() + *pos);
            buffer_indices.erase(buffer_indices.begin() + *pos);
        } else {
            buffer.push_back(z[k]);
            buffer_indices.push_back(index);
        }
    }
    trace.leftover = buffer;
    trace.leftover_indices = buffer_indices;
    return trace;
}

std::vector<PreferenceList> enumerate_preferences(const CompatibilityGraph& g, int v) {
    g.require_class(v);
    std::vector<int> order = g.neighbors(v);
    std::vector<PreferenceList> out;
    do {
        out.push_back({order});
    } while (std::next_permutation(order.begin(), order.end()));
    return out;
}

std::vector<int> candidate_positions(const CompatibilityGraph& g, const PolicySpec& policy,
                                     const Word& q, int v) {
    std::vector<int> out;
    if (!policy.sigma_dependent()) {
        auto pos = select_match(g, policy, q, v, nullptr, nullptr);
        if (pos) out.push_back(*pos);
        return out;
    }
    CompatView view = compat_view(g, q, v);
    for (int c : tie_break_set(policy.kind, view)) out.push_back(oldest_position_of_class(q, c));
    return out;
}

std::vector<int> candidate_classes(const CompatibilityGraph& g, const PolicySpec& policy,
                                   const Counts& x, int v) {
    if (!policy.class_admissible())
        throw Error(errc::policy_not_class_admissible, policy_name(policy.kind));
    CompatView view;
    view.count.assign(x.begin(), x.end());
    view.count.insert(view.count.begin(), 0);  // 1-based
    for (int c : g.neighbors(v))
        if (view.count[c] > 0) view.present_classes.push_back(c);
    if (view.present_classes.empty()) return {};
    if (policy.kind == PolicyKind::priority)
        return {first_in_order(policy.priority_lists[v], view.present_classes)};
    return tie_break_set(policy.kind, view);
}

std::vector<std::pair<int, int>> realizable_choice_pairs(const std::vector<int>& choices_a,
                                                         const std::vector<int>& choices_b) {
    auto contains = [](const std::vector<int>& set, int c) {
        return std::find(set.begin(), set.end(), c) != set.end();
    };
    std::vector<std::pair<int, int>> out;
    for (int a : choices_a)
        for (int b : choices_b) {
            if (a != b && contains(choices_a, b) && contains(choices_b, a)) continue;
            out.emplace_back(a, b);
        }
    return out;
}

std::vector<Word> reachable_states(const CompatibilityGraph& g, const PolicySpec& policy,
                                   const Word& start, const Word& z, std::size_t max_layer) {
    std::set<Word> layer{start};
    for (int v : z) {
        std::set<Word> next;
        for (const Word& q : layer) {
            std::vector<int> positions = candidate_positions(g, policy, q, v);
            if (positions.empty()) {
                Word grown = q;
                grown.push_back(v);
                next.insert(std::move(grown));
            } else {
                for (int pos : positions) {
                    Word shrunk = q;
                    shrunk.erase(shrunk.begin() + pos);
                    next.insert(std::move(shrunk));
                }
            }
            if (next.size() > max_layer)
                throw Error(errc::domain_too_large, "reachable-state layer exceeds bound");
        }
        layer = std::move(next);
    }
    return {layer.begin(), layer.end()};
}

PreferenceList draw_preference(const CompatibilityGraph& g, int v, Rng& rng) {
    PreferenceList pref{g.neighbors(v)};
    rng.shuffle(pref.order);
    return pref;
}

Word apply_word_canonical(const CompatibilityGraph& g, const PolicySpec& policy, const Word& start,
                          const Word& z) {
    Word state = start;
    for (int v : z) {
        std::vector<int> ascending = g.neighbors(v);  // already sorted
        std::optional<int> pos = select_match(g, policy, state, v, &ascending, nullptr);
        if (pos)
            state.erase(state.begin() + *pos);
        else
            state.push_back(v);
    }
    return state;
}

std::string trace_to_text(const MatchingTrace& trace) {
    std::ostringstream out;
    for (std::size_t t = 0; t < trace.arrivals.size(); ++t) {
        auto partner = trace.partner_of(static_cast<int>(t));
        out << t << ' ' << trace.arrivals[t] << ' ';
        if (partner)
            out << *partner;
        else
            out << '-';
        out << '\n';
    }
    out << "leftover " << word_to_string(trace.leftover) << '\n';
    return out.str();
}

}  // namespace matchsim
