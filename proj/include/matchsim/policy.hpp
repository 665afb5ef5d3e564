#pragma once

#include <optional>
#include <string>
#include <vector>

#include "matchsim/graph.hpp"
#include "matchsim/rng.hpp"
#include "matchsim/words.hpp"

namespace matchsim {

enum class PolicyKind { fcfm, lcfm, ml, ms, priority, uniform };

const char* policy_name(PolicyKind kind);
PolicyKind policy_from_name(const std::string& name);

struct PolicySpec {
    PolicyKind kind = PolicyKind::fcfm;
    // only for priority: priority_lists[i] is the fixed preference permutation
    // of E(i), 1-based by class
    std::vector<std::vector<int>> priority_lists;

    static PolicySpec fcfm() { return {PolicyKind::fcfm, {}}; }
    static PolicySpec lcfm() { return {PolicyKind::lcfm, {}}; }
    static PolicySpec ml() { return {PolicyKind::ml, {}}; }
    static PolicySpec ms() { return {PolicyKind::ms, {}}; }
    static PolicySpec uniform() { return {PolicyKind::uniform, {}}; }
    static PolicySpec priority(std::vector<std::vector<int>> lists) {
        return {PolicyKind::priority, std::move(lists)};
    }
    // priority order = ascending class number, for every class
    static PolicySpec priority_ascending(const CompatibilityGraph& g);

    // implementable from the class detail alone
    bool class_admissible() const {
        return kind != PolicyKind::fcfm && kind != PolicyKind::lcfm;
    }
    // the drawn preference list can change the outcome
    bool sigma_dependent() const {
        return kind == PolicyKind::ml || kind == PolicyKind::ms || kind == PolicyKind::uniform;
    }

    void validate(const CompatibilityGraph& g) const;
    std::string describe() const;
};

// permutation of E(v) for the arriving class, most preferred first
struct PreferenceList {
    std::vector<int> order;
};

struct ArrivalEvent {
    int klass = 0;
    std::optional<PreferenceList> pref;
};

// One matched pair of arrival indices plus the classes involved.
struct MatchEdge {
    int a = 0;
    int b = 0;

    friend bool operator==(const MatchEdge&, const MatchEdge&) = default;
};

struct MatchingTrace {
    std::vector<int> arrivals;             // class per arrival index
    std::vector<MatchEdge> edges;          // matched index pairs, a < b
    Word leftover;                         // unmatched classes in arrival order
    std::vector<int> leftover_indices;

    bool perfectly_matched() const { return leftover.empty(); }
    std::optional<int> partner_of(int index) const;
};

// Matched position in q (0-based, oldest first), or nullopt to store the
// arrival. `pref` orders the exploration for sigma-dependent policies; when
// absent, a preference list is drawn from `rng` (required only if the policy
// actually needs one and the choice is not forced).
std::optional<int> select_match(const CompatibilityGraph& g, const PolicySpec& policy,
                                const Word& q, int v, const std::vector<int>* pref, Rng* rng);

struct ArrivalOutcome {
    Word queue;
    std::optional<int> matched_index;
};

ArrivalOutcome apply_arrival(const CompatibilityGraph& g, const PolicySpec& policy, const Word& q,
                             const ArrivalEvent& event, Rng* rng);

// Class-detail action; rejects FCFM/LCFM (not class-admissible).
Counts apply_class(const CompatibilityGraph& g, const PolicySpec& policy, const Counts& x,
                   const ArrivalEvent& event, Rng* rng);

MatchingTrace run_word(const CompatibilityGraph& g, const PolicySpec& policy, const Word& initial,
                       const Word& z, const std::vector<PreferenceList>& prefs, Rng* rng);

// All |E(v)|! preference lists, lexicographic.
std::vector<PreferenceList> enumerate_preferences(const CompatibilityGraph& g, int v);

// --- exhaustive quantification over drawable preference lists -----------

// Queue positions the policy could match v with, one per realizable choice
// (empty = the arrival is stored). For deterministic policies this is a
// singleton; for ML/MS/UNIFORM one entry per class the tie-break could pick.
std::vector<int> candidate_positions(const CompatibilityGraph& g, const PolicySpec& policy,
                                     const Word& q, int v);

// Same on class details: the classes the policy could remove.
std::vector<int> candidate_classes(const CompatibilityGraph& g, const PolicySpec& policy,
                                   const Counts& x, int v);

// Choice pairs of two systems sharing one preference draw. A pair (c, c') with
// c != c' is realizable unless each choice was also available to the other
// system (then the shared list would force the same pick).
std::vector<std::pair<int, int>> realizable_choice_pairs(const std::vector<int>& choices_a,
                                                         const std::vector<int>& choices_b);

// Distinct queue states reachable by some drawable preference assignment when
// feeding `z` from `start` (deduplicated layer by layer).
std::vector<Word> reachable_states(const CompatibilityGraph& g, const PolicySpec& policy,
                                   const Word& start, const Word& z,
                                   std::size_t max_layer = 200000);

// uniform permutation of E(v)
PreferenceList draw_preference(const CompatibilityGraph& g, int v, Rng& rng);

// Folds the word under the fixed ascending preference draw (smallest class
// first, shared by convention across coupled runs). The deterministic
// stand-in used for canonical residuals and witness replays.
Word apply_word_canonical(const CompatibilityGraph& g, const PolicySpec& policy, const Word& start,
                          const Word& z);

std::string trace_to_text(const MatchingTrace& trace);

}  // namespace matchsim
