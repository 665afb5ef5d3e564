#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "matchsim/policy.hpp"

namespace matchsim {

enum class PropertyVerdict { holds_on_domain, violated };

// A violation of the 1-Lipschitz bound on the class-detail action. The two
// systems share each arrival's preference draw; `for_all_draws` marks
// witnesses that violate under every realizable shared draw (those replay
// without fixing a preference list).
struct NonExpansiveWitness {
    Counts x;
    Counts x_prime;
    int klass = 0;
    int choice_x = 0;        // matched class, 0 = stored
    int choice_x_prime = 0;
    Counts image_x;
    Counts image_x_prime;
    int norm_images = 0;
    int norm_inputs = 0;
    bool for_all_draws = false;
};

struct SubAdditiveWitness {
    Word z1;
    Word z2;
    int leftover_concat = 0;  // |W(z1 z2)|
    int leftover_z1 = 0;
    int leftover_z2 = 0;
    bool for_all_draws = false;
};

struct PropertyReport {
    std::string property;
    PropertyVerdict verdict = PropertyVerdict::holds_on_domain;
    std::string domain;
    std::optional<NonExpansiveWitness> nonexpansive_witness;
    std::optional<SubAdditiveWitness> subadditive_witness;

    bool violated() const { return verdict == PropertyVerdict::violated; }
};

// All admissible class details with entries <= max_count, ordered by total
// size then by their sorted-word representative. The canonical search order
// for witnesses.
std::vector<Counts> enumerate_class_details(const CompatibilityGraph& g, int max_count);

// Exhaustive check of the 1-Lipschitz property over all ordered state pairs,
// arrival classes, and realizable shared preference draws. The reported
// witness is the first draw-independent violation in canonical order when one
// exists, otherwise the first violation outright.
PropertyReport check_nonexpansive(const CompatibilityGraph& g, const PolicySpec& policy,
                                  int max_count, int workers = 1);

enum class SubAdditiveMode { exhaustive, sampled };

// Exhaustive mode enumerates all word pairs of even lengths with
// |z1|+|z2| <= max_len, quantifying preference draws exactly (the z2 draws
// are shared between the standalone and concatenated runs). Sampled mode
// draws random pairs and shared preference assignments instead.
PropertyReport check_subadditive(const CompatibilityGraph& g, const PolicySpec& policy,
                                 int max_len, SubAdditiveMode mode = SubAdditiveMode::exhaustive,
                                 std::uint64_t seed = 0, int n_samples = 10000, int workers = 1);

// Re-runs a witness through the policy engine; true when the reported
// norms/sizes reproduce exactly.
bool replay_nonexpansive_witness(const CompatibilityGraph& g, const PolicySpec& policy,
                                 const NonExpansiveWitness& witness);
bool replay_subadditive_witness(const CompatibilityGraph& g, const PolicySpec& policy,
                                const SubAdditiveWitness& witness);

std::string report_to_json(const PropertyReport& report);
PropertyReport report_from_json(const std::string& text);

}  // namespace matchsim
