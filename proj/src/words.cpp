#include "matchsim/words.hpp"

#include <algorithm>
#include <sstream>

namespace matchsim {

Counts commutative_image(const CompatibilityGraph& g, const Word& word) {
    Counts counts(g.num_classes(), 0);
    for (int c : word) {
        g.require_class(c);
        ++counts[c - 1];
    }
    return counts;
}

bool is_admissible(const CompatibilityGraph& g, const Word& word) {
    std::uint32_t support = 0;
    for (int c : word) {
        if (!g.contains(c)) return false;
        support |= 1u << (c - 1);
    }
    for (int c : word)
        if (g.neighbor_mask(c) & support) return false;
    return true;
}

bool is_admissible_counts(const CompatibilityGraph& g, const Counts& counts) {
    if (static_cast<int>(counts.size()) != g.num_classes()) return false;
    std::uint32_t support = 0;
    for (int c = 1; c <= g.num_classes(); ++c) {
        if (counts[c - 1] < 0) return false;
        if (counts[c - 1] > 0) support |= 1u << (c - 1);
    }
    for (int c = 1; c <= g.num_classes(); ++c)
        if (counts[c - 1] > 0 && (g.neighbor_mask(c) & support)) return false;
    return true;
}

namespace {

void extend_words(const CompatibilityGraph& g, Word& word, std::uint32_t support, int remaining,
                  std::vector<Word>& out, std::size_t max_states) {
    if (remaining == 0) {
        if (out.size() >= max_states)
            throw Error(errc::too_large, "state enumeration exceeds configured bound");
        out.push_back(word);
        return;
    }
    for (int c = 1; c <= g.num_classes(); ++c) {
        if (g.neighbor_mask(c) & support) continue;
        word.push_back(c);
        extend_words(g, word, support | (1u << (c - 1)), remaining - 1, out, max_states);
        word.pop_back();
    }
}

}  // namespace

std::vector<Word> enumerate_w2(const CompatibilityGraph& g, int capacity, std::size_t max_states) {
    if (capacity < 0) throw Error(errc::bad_input, "capacity must be >= 0");
    std::vector<Word> out;
    Word scratch;
    for (int length = 0; length <= 2 * capacity; length += 2)
        extend_words(g, scratch, 0, length, out, max_states);
    return out;
}

std::string word_to_string(const Word& word) {
    if (word.empty()) return "-";
    std::ostringstream out;
    for (std::size_t k = 0; k < word.size(); ++k) {
        if (k) out << ',';
        out << word[k];
    }
    return out.str();
}

Word word_from_string(const std::string& text) {
    if (text.empty()) throw Error(errc::bad_input, "empty word literal");
    if (text == "-") return {};
    Word word;
    if (text.find(',') != std::string::npos) {
        std::istringstream in(text);
        std::string token;
        while (std::getline(in, token, ',')) {
            if (token.empty()) throw Error(errc::bad_input, "malformed word: " + text);
            word.push_back(std::stoi(token));
        }
    } else {
        // digit-string shorthand, valid while all classes are single-digit
        for (char c : text) {
            if (c < '1' || c > '9') throw Error(errc::bad_input, "malformed word: " + text);
            word.push_back(c - '0');
        }
    }
    for (int c : word)
        if (c < 1) throw Error(errc::bad_input, "classes are 1-based");
    return word;
}

std::string counts_to_string(const Counts& counts) {
    std::ostringstream out;
    out << '(';
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (k) out << ',';
        out << counts[k];
    }
    out << ')';
    return out.str();
}

}  // namespace matchsim
