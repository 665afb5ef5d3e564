#pragma once

#include <string>
#include <vector>

#include "matchsim/graph.hpp"

namespace matchsim {

// A word over the class alphabet. Queue details are words whose support is an
// independent set (no two compatible classes waiting together); class details
// are the per-class count vectors of such words.
using Word = std::vector<int>;
using Counts = std::vector<int>;

Counts commutative_image(const CompatibilityGraph& g, const Word& word);

// support is empty or an independent set
bool is_admissible(const CompatibilityGraph& g, const Word& word);
bool is_admissible_counts(const CompatibilityGraph& g, const Counts& counts);

// All admissible words of even length <= 2*capacity, ordered by length then
// lexicographically (empty word first).
std::vector<Word> enumerate_w2(const CompatibilityGraph& g, int capacity,
                               std::size_t max_states = 5'000'000);

// serialization: comma-separated classes, "-" for the empty word
std::string word_to_string(const Word& word);
Word word_from_string(const std::string& text);

std::string counts_to_string(const Counts& counts);

}  // namespace matchsim
