#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matchsim/policy.hpp"

namespace matchsim {

// A verified erasing certificate. capacity == 0: `word` is an erasing word of
// the buffer content `target`. capacity == C > 0: `word` is 2C-strong (erases
// every buffer of W2(C) without ever growing it past its starting size).
struct ErasingCert {
    Word target;
    int capacity = 0;
    Word word;
    PolicySpec policy;
    std::string checked_domain;
};

struct VerifyOptions {
    std::size_t max_layer = 200000;  // reachable-state layer cap per step
    bool allow_sampling = false;     // fall back to sampled draws past the cap
    int sample_trials = 10000;
    std::uint64_t sample_seed = 1;
};

// Both conditions of an erasing word, quantified over every drawable
// preference assignment: z alone is perfectly matchable, and appended to u it
// empties the buffer.
bool is_erasing_word(const CompatibilityGraph& g, const PolicySpec& policy, const Word& u,
                     const Word& z, const VerifyOptions& opts = {});

// Constructive erasing word: repeatedly erase the last two
// letters of the residual through a shortest path, doubling the last interior
// letter and completing through an induced odd cycle when the path length is
// even. Always post-verified.
ErasingCert construct_erasing_word(const CompatibilityGraph& g, const PolicySpec& policy,
                                   const Word& u);

// All reduced erasing words of u of the minimum achievable length <= max_len.
std::vector<Word> find_minimal_erasing_words(const CompatibilityGraph& g, const PolicySpec& policy,
                                             const Word& u, int max_len);

// 2C-strong: for every w in W2(C) and every draw, wz empties and no even
// prefix ever grows the buffer past |w|.
bool is_strong_erasing_word(const CompatibilityGraph& g, const PolicySpec& policy, int capacity,
                            const Word& z, const VerifyOptions& opts = {});

// is_strong_erasing_word wrapped into a certificate; falls back to sampled
// verification (recorded in checked_domain) when the exhaustive domain is
// intractable.
ErasingCert certify_strong(const CompatibilityGraph& g, const PolicySpec& policy, int capacity,
                           const Word& z);

// Concatenation of C 2-strong words is 2C-strong for sub-additive policies;
// inputs are re-verified, the composite is post-verified when tractable and
// marked composition-derived otherwise.
ErasingCert compose_strong_words(const CompatibilityGraph& g, const PolicySpec& policy,
                                 const std::vector<ErasingCert>& certs);

// spanning odd cycle visited four times; 2-strong under LCFM on any
// connected non-bipartite graph
Word make_lcfm_cycle_word(const CompatibilityGraph& g);

// forward, forward, backward, backward exploration of an odd cycle graph;
// 2-strong under FCFM
Word make_fcfm_cycle_word(const CompatibilityGraph& g);

// length-2p word with two letters per part, consecutive odd/even letters
// from different parts; 2-strong for every admissible policy on a complete
// p-partite graph, p >= 3
Word make_complete_partite_word(const CompatibilityGraph& g);

// Brute-force search for 2C-strong words of the exact given length. Strong
// words are concatenations of compatible ordered pairs, which keeps the
// search space small.
std::vector<Word> search_strong_words(const CompatibilityGraph& g, const PolicySpec& policy,
                                      int capacity, int word_length,
                                      std::size_t max_results = 100000);

struct DictionaryOptions {
    bool use_constructors = true;
    bool use_search = true;
    std::size_t max_words = 1'000'000;
};

// All C-fold concatenations of certified 2-strong base words of length 2q,
// deduplicated and sorted. The Algorithm-1 dictionary S2(Cq).
std::vector<Word> build_dictionary(const CompatibilityGraph& g, const PolicySpec& policy,
                                   int capacity, int q, const DictionaryOptions& opts = {});

// dictionary file: "# key=value" header lines, then one word per line
std::string dictionary_to_text(const CompatibilityGraph& g, const PolicySpec& policy, int capacity,
                               int q, const std::vector<Word>& words);
std::vector<Word> dictionary_from_text(const std::string& text, const CompatibilityGraph& g,
                                       int expected_capacity);

}  // namespace matchsim
