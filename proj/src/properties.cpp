#include "matchsim/properties.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace matchsim {

namespace {

int l1_distance(const Counts& a, const Counts& b) {
    int acc = 0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += std::abs(a[k] - b[k]);
    return acc;
}

void enumerate_details_rec(const CompatibilityGraph& g, int max_count, int target_size,
                           int min_class, std::uint32_t support, Counts& current,
                           std::vector<Counts>& out) {
    if (target_size == 0) {
        out.push_back(current);
        return;
    }
    for (int c = min_class; c <= g.num_classes(); ++c) {
        if (current[c - 1] >= max_count) continue;
        if (g.neighbor_mask(c) & support) continue;
        ++current[c - 1];
        enumerate_details_rec(g, max_count, target_size - 1, c, support | (1u << (c - 1)), current,
                              out);
        --current[c - 1];
    }
}

// image of x after the arrival of v with the given matched class (0 = stored)
Counts step_image(const Counts& x, int v, int matched_class) {
    Counts out = x;
    if (matched_class == 0)
        ++out[v - 1];
    else
        --out[matched_class - 1];
    return out;
}

// choice pairs of two systems sharing the arrival's preference draw;
// 0 encodes "stored"
std::vector<std::pair<int, int>> shared_draw_pairs(const std::vector<int>& da,
                                                   const std::vector<int>& db) {
    if (da.empty() && db.empty()) return {{0, 0}};
    if (da.empty()) {
        std::vector<std::pair<int, int>> out;
        for (int c : db) out.emplace_back(0, c);
        return out;
    }
    if (db.empty()) {
        std::vector<std::pair<int, int>> out;
        for (int c : da) out.emplace_back(c, 0);
        return out;
    }
    return realizable_choice_pairs(da, db);
}

}  // namespace

std::vector<Counts> enumerate_class_details(const CompatibilityGraph& g, int max_count) {
    if (max_count < 0) throw Error(errc::bad_input, "max_count must be >= 0");
    std::vector<Counts> out;
    Counts current(g.num_classes(), 0);
    for (int size = 0; size <= g.num_classes() * max_count; ++size)
        enumerate_details_rec(g, max_count, size, 1, 0, current, out);
    return out;
}

namespace {

struct NonExpFound {
    std::size_t order = 0;  // global scan position, for deterministic merging
    NonExpansiveWitness witness;
};

// scans outer states [begin, end); fills the first draw-independent and the
// first draw-dependent violation of the chunk
void scan_nonexpansive_chunk(const CompatibilityGraph& g, const PolicySpec& policy,
                             const std::vector<Counts>& states, std::size_t begin,
                             std::size_t end, std::optional<NonExpFound>& uniform,
                             std::optional<NonExpFound>& existential) {
    int n = g.num_classes();
    for (std::size_t xi = begin; xi < end; ++xi) {
        const Counts& x = states[xi];
        for (std::size_t xj = 0; xj < states.size(); ++xj) {
            const Counts& xp = states[xj];
            int bound = l1_distance(x, xp);
            for (int v = 1; v <= n; ++v) {
                std::vector<int> da = candidate_classes(g, policy, x, v);
                std::vector<int> db = candidate_classes(g, policy, xp, v);
                auto pairs = shared_draw_pairs(da, db);

                bool all_violate = true;
                std::optional<std::pair<int, int>> violating;
                for (auto [ca, cb] : pairs) {
                    int norm = l1_distance(step_image(x, v, ca), step_image(xp, v, cb));
                    if (norm > bound) {
                        if (!violating) violating = {ca, cb};
                    } else {
                        all_violate = false;
                    }
                }
                if (!violating) continue;

                NonExpFound found;
                found.order = (xi * states.size() + xj) * static_cast<std::size_t>(n) +
                              static_cast<std::size_t>(v);
                NonExpansiveWitness& w = found.witness;
                w.x = x;
                w.x_prime = xp;
                w.klass = v;
                w.for_all_draws = all_violate;
                // replay under the ascending shared draw when every draw
                // violates, else under the specific violating pair
                if (all_violate) {
                    w.choice_x = da.empty() ? 0 : *std::min_element(da.begin(), da.end());
                    w.choice_x_prime = db.empty() ? 0 : *std::min_element(db.begin(), db.end());
                } else {
                    w.choice_x = violating->first;
                    w.choice_x_prime = violating->second;
                }
                w.image_x = step_image(x, v, w.choice_x);
                w.image_x_prime = step_image(xp, v, w.choice_x_prime);
                w.norm_images = l1_distance(w.image_x, w.image_x_prime);
                w.norm_inputs = bound;
                if (all_violate) {
                    if (!uniform) uniform = found;
                    return;  // nothing earlier can exist in this chunk
                }
                if (!existential) existential = found;
            }
        }
    }
}

}  // namespace

PropertyReport check_nonexpansive(const CompatibilityGraph& g, const PolicySpec& policy,
                                  int max_count, int workers) {
    if (!policy.class_admissible())
        throw Error(errc::policy_not_class_admissible, policy_name(policy.kind));
    policy.validate(g);

    PropertyReport report;
    report.property = "nonexpansive";
    report.domain = "all admissible class-detail pairs with entries <= " +
                    std::to_string(max_count) + ", all arrival classes, all shared draws";

    std::vector<Counts> states = enumerate_class_details(g, max_count);
    int thread_count = std::max(1, std::min<int>(workers, static_cast<int>(states.size())));
    std::vector<std::optional<NonExpFound>> uniforms(thread_count);
    std::vector<std::optional<NonExpFound>> existentials(thread_count);

    if (thread_count == 1) {
        scan_nonexpansive_chunk(g, policy, states, 0, states.size(), uniforms[0],
                                existentials[0]);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (states.size() + thread_count - 1) / thread_count;
        for (int worker = 0; worker < thread_count; ++worker) {
            std::size_t begin = chunk * static_cast<std::size_t>(worker);
            std::size_t end = std::min(states.size(), begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(scan_nonexpansive_chunk, std::cref(g), std::cref(policy),
                              std::cref(states), begin, end, std::ref(uniforms[worker]),
                              std::ref(existentials[worker]));
        }
        for (auto& t : pool) t.join();
    }

    // first-witness selection by global scan order, so the report does not
    // depend on the worker count
    auto merge = [](const std::vector<std::optional<NonExpFound>>& found) {
        std::optional<NonExpFound> best;
        for (const auto& f : found)
            if (f && (!best || f->order < best->order)) best = f;
        return best;
    };
    std::optional<NonExpFound> uniform = merge(uniforms);
    std::optional<NonExpFound> existential = merge(existentials);
    if (uniform) {
        report.verdict = PropertyVerdict::violated;
        report.nonexpansive_witness = uniform->witness;
    } else if (existential) {
        // no uniform violation anywhere, so every chunk was scanned fully and
        // the merged existential is the global first
        report.verdict = PropertyVerdict::violated;
        report.nonexpansive_witness = existential->witness;
    }
    return report;
}

namespace {

using PairState = std::pair<Word, Word>;  // (standalone z2 run, run continued from w')

// One coupled arrival step under a shared preference draw. Deterministic
// policies step independently; sigma-dependent ones branch over realizable
// class pairs with the oldest item of the chosen class removed.
std::vector<PairState> coupled_step(const CompatibilityGraph& g, const PolicySpec& policy,
                                    const PairState& state, int v) {
    auto erase_class = [](const Word& q, int c) {
        Word out = q;
        out.erase(std::find(out.begin(), out.end(), c));
        return out;
    };
    auto grow = [v](const Word& q) {
        Word out = q;
        out.push_back(v);
        return out;
    };

    if (!policy.sigma_dependent()) {
        auto advance = [&](const Word& q) {
            auto pos = select_match(g, policy, q, v, nullptr, nullptr);
            if (!pos) return grow(q);
            Word out = q;
            out.erase(out.begin() + *pos);
            return out;
        };
        return {{advance(state.first), advance(state.second)}};
    }

    std::vector<int> da_pos = candidate_positions(g, policy, state.first, v);
    std::vector<int> db_pos = candidate_positions(g, policy, state.second, v);
    std::vector<int> da, db;
    for (int p : da_pos) da.push_back(state.first[p]);
    for (int p : db_pos) db.push_back(state.second[p]);

    std::vector<PairState> out;
    for (auto [ca, cb] : shared_draw_pairs(da, db))
        out.emplace_back(ca == 0 ? grow(state.first) : erase_class(state.first, ca),
                         cb == 0 ? grow(state.second) : erase_class(state.second, cb));
    return out;
}

// final coupled states of the z2 phase: standalone from empty, continuation
// from w', sharing every arrival's draw
std::set<PairState> coupled_leaves(const CompatibilityGraph& g, const PolicySpec& policy,
                                   const Word& w_prime, const Word& z2) {
    std::set<PairState> layer{{Word{}, w_prime}};
    for (int v : z2) {
        std::set<PairState> next;
        for (const PairState& state : layer)
            for (PairState& successor : coupled_step(g, policy, state, v))
                next.insert(std::move(successor));
        layer = std::move(next);
    }
    return layer;
}

bool pair_violates_exists(const CompatibilityGraph& g, const PolicySpec& policy,
                          const Word& w_prime, const Word& z2) {
    for (const auto& [b, ab] : coupled_leaves(g, policy, w_prime, z2))
        if (ab.size() > w_prime.size() + b.size()) return true;
    return false;
}

// every draw of z1 and of the shared z2 assignment violates
bool pair_violates_forall(const CompatibilityGraph& g, const PolicySpec& policy, const Word& z1,
                          const Word& z2) {
    for (const Word& w_prime : reachable_states(g, policy, {}, z1))
        for (const auto& [b, ab] : coupled_leaves(g, policy, w_prime, z2))
            if (ab.size() <= w_prime.size() + b.size()) return false;
    return true;
}

bool pair_violates_exists_any(const CompatibilityGraph& g, const PolicySpec& policy,
                              const Word& z1, const Word& z2) {
    for (const Word& w_prime : reachable_states(g, policy, {}, z1))
        if (pair_violates_exists(g, policy, w_prime, z2)) return true;
    return false;
}

// lexicographic odometer over all words of the given length, starting at
// `from` (all-ones when empty); visit returns false to stop
template <typename Visit>
void for_each_word_from(int n, int length, const Word& from, Visit visit) {
    Word word = from.empty() ? Word(length, 1) : from;
    if (length == 0) {
        visit(word);
        return;
    }
    for (;;) {
        if (!visit(word)) return;
        int k = length - 1;
        while (k >= 0 && word[k] == n) {
            word[k] = 1;
            --k;
        }
        if (k < 0) return;
        ++word[k];
    }
}

template <typename Visit>
void for_each_word(int n, int length, Visit visit) {
    for_each_word_from(n, length, {}, visit);
}

SubAdditiveWitness make_subadd_witness(const CompatibilityGraph& g, const PolicySpec& policy,
                                       const Word& z1, const Word& z2, bool for_all) {
    Word concat = z1;
    concat.insert(concat.end(), z2.begin(), z2.end());
    SubAdditiveWitness w;
    w.z1 = z1;
    w.z2 = z2;
    w.leftover_concat = static_cast<int>(apply_word_canonical(g, policy, {}, concat).size());
    w.leftover_z1 = static_cast<int>(apply_word_canonical(g, policy, {}, z1).size());
    w.leftover_z2 = static_cast<int>(apply_word_canonical(g, policy, {}, z2).size());
    w.for_all_draws = for_all;
    return w;
}

}  // namespace

PropertyReport check_subadditive(const CompatibilityGraph& g, const PolicySpec& policy,
                                 int max_len, SubAdditiveMode mode, std::uint64_t seed,
                                 int n_samples, int workers) {
    (void)workers;
    policy.validate(g);
    PropertyReport report;
    report.property = "subadditive";

    int n = g.num_classes();
    std::optional<SubAdditiveWitness> first_existential;

    if (mode == SubAdditiveMode::sampled) {
        report.domain = "sampled word pairs, total length <= " + std::to_string(max_len) + ", " +
                        std::to_string(n_samples) + " shared draws";
        Rng rng(seed);
        for (int trial = 0; trial < n_samples; ++trial) {
            int total = 2 * (1 + static_cast<int>(rng.next_below(max_len / 2)));
            int len1 = 2 * static_cast<int>(rng.next_below(total / 2));
            Word z1, z2;
            for (int k = 0; k < len1; ++k) z1.push_back(1 + rng.next_below(n));
            for (int k = len1; k < total; ++k) z2.push_back(1 + rng.next_below(n));

            // shared draws: one preference list per z2 arrival, used by both runs
            Word run1;
            for (int v : z1) {
                ArrivalEvent e{v, std::nullopt};
                run1 = apply_arrival(g, policy, run1, e, &rng).queue;
            }
            Word standalone, concat = run1;
            for (int v : z2) {
                PreferenceList pref = draw_preference(g, v, rng);
                ArrivalEvent e{v, pref};
                standalone = apply_arrival(g, policy, standalone, e, nullptr).queue;
                concat = apply_arrival(g, policy, concat, e, nullptr).queue;
            }
            if (concat.size() > run1.size() + standalone.size()) {
                // witness sizes come from the canonical replay draw, exactly
                // as in exhaustive mode, so replays are draw-free
                report.verdict = PropertyVerdict::violated;
                report.subadditive_witness = make_subadd_witness(g, policy, z1, z2, false);
                return report;
            }
        }
        return report;
    }

    if (max_len > 12)
        throw Error(errc::domain_too_large, "exhaustive mode supports total length <= 12");
    report.domain = "all word pairs of even lengths, total length <= " + std::to_string(max_len) +
                    ", all shared draws";

    // first existential z2 per (w', |z2|); the same leftover state w' is
    // reached by many z1, so the inner scan is shared
    std::map<std::pair<Word, int>, std::optional<Word>> exist_cache;
    auto first_violating_z2 = [&](const Word& w_prime, int len2) -> std::optional<Word> {
        auto key = std::make_pair(w_prime, len2);
        auto it = exist_cache.find(key);
        if (it != exist_cache.end()) return it->second;
        std::optional<Word> found;
        for_each_word(n, len2, [&](const Word& z2) {
            if (pair_violates_exists(g, policy, w_prime, z2)) {
                found = z2;
                return false;
            }
            return true;
        });
        exist_cache[key] = found;
        return found;
    };

    bool stop = false;
    for (int total = 4; total <= max_len && !stop; total += 2) {
        for (int len1 = 2; len1 <= total - 2 && !stop; len1 += 2) {
            int len2 = total - len1;
            for_each_word(n, len1, [&](const Word& z1) {
                std::vector<Word> w_primes = reachable_states(g, policy, {}, z1);
                std::optional<Word> best_z2;
                for (const Word& w_prime : w_primes) {
                    auto z2 = first_violating_z2(w_prime, len2);
                    if (z2 && (!best_z2 || *z2 < *best_z2)) best_z2 = z2;
                }
                if (!best_z2) return true;

                // scan z2 from the first existential violation onward, looking
                // for a draw-independent witness
                for_each_word_from(n, len2, *best_z2, [&](const Word& z2) {
                    bool exists = false;
                    for (const Word& w_prime : w_primes)
                        if (pair_violates_exists(g, policy, w_prime, z2)) {
                            exists = true;
                            break;
                        }
                    if (!exists) return true;
                    if (!first_existential)
                        first_existential = make_subadd_witness(g, policy, z1, z2, false);
                    if (pair_violates_forall(g, policy, z1, z2)) {
                        report.verdict = PropertyVerdict::violated;
                        report.subadditive_witness = make_subadd_witness(g, policy, z1, z2, true);
                        stop = true;
                        return false;
                    }
                    return true;
                });
                return !stop;
            });
        }
    }
    if (stop) return report;
    if (first_existential) {
        report.verdict = PropertyVerdict::violated;
        report.subadditive_witness = first_existential;
    }
    return report;
}

bool replay_nonexpansive_witness(const CompatibilityGraph& g, const PolicySpec& policy,
                                 const NonExpansiveWitness& w) {
    std::vector<int> da = candidate_classes(g, policy, w.x, w.klass);
    std::vector<int> db = candidate_classes(g, policy, w.x_prime, w.klass);
    auto pairs = shared_draw_pairs(da, db);
    bool pair_ok = false;
    bool all_violate = true;
    int bound = l1_distance(w.x, w.x_prime);
    for (auto [ca, cb] : pairs) {
        int norm = l1_distance(step_image(w.x, w.klass, ca), step_image(w.x_prime, w.klass, cb));
        if (norm <= bound) all_violate = false;
        if (ca == w.choice_x && cb == w.choice_x_prime) pair_ok = true;
    }
    if (!pair_ok) return false;
    if (w.for_all_draws && !all_violate) return false;
    Counts ia = step_image(w.x, w.klass, w.choice_x);
    Counts ib = step_image(w.x_prime, w.klass, w.choice_x_prime);
    return ia == w.image_x && ib == w.image_x_prime && l1_distance(ia, ib) == w.norm_images &&
           bound == w.norm_inputs && w.norm_images > w.norm_inputs;
}

bool replay_subadditive_witness(const CompatibilityGraph& g, const PolicySpec& policy,
                                const SubAdditiveWitness& w) {
    if (!pair_violates_exists_any(g, policy, w.z1, w.z2)) return false;
    if (w.for_all_draws && !pair_violates_forall(g, policy, w.z1, w.z2)) return false;
    Word concat = w.z1;
    concat.insert(concat.end(), w.z2.begin(), w.z2.end());
    int concat_size = static_cast<int>(apply_word_canonical(g, policy, {}, concat).size());
    int z1_size = static_cast<int>(apply_word_canonical(g, policy, {}, w.z1).size());
    int z2_size = static_cast<int>(apply_word_canonical(g, policy, {}, w.z2).size());
    return concat_size == w.leftover_concat && z1_size == w.leftover_z1 &&
           z2_size == w.leftover_z2;
}

std::string report_to_json(const PropertyReport& report) {
    nlohmann::json j;
    j["property"] = report.property;
    j["verdict"] = report.violated() ? "Violated" : "HoldsOnDomain";
    j["domain"] = report.domain;
    if (report.nonexpansive_witness) {
        const auto& w = *report.nonexpansive_witness;
        j["witness"] = {{"x", w.x},
                        {"x_prime", w.x_prime},
                        {"class", w.klass},
                        {"choice_x", w.choice_x},
                        {"choice_x_prime", w.choice_x_prime},
                        {"image_x", w.image_x},
                        {"image_x_prime", w.image_x_prime},
                        {"norm_images", w.norm_images},
                        {"norm_inputs", w.norm_inputs},
                        {"for_all_draws", w.for_all_draws}};
    }
    if (report.subadditive_witness) {
        const auto& w = *report.subadditive_witness;
        j["witness"] = {{"z1", word_to_string(w.z1)},
                        {"z2", word_to_string(w.z2)},
                        {"leftover_concat", w.leftover_concat},
                        {"leftover_z1", w.leftover_z1},
                        {"leftover_z2", w.leftover_z2},
                        {"for_all_draws", w.for_all_draws}};
    }
    return j.dump(2);
}

PropertyReport report_from_json(const std::string& text) {
    // artifacts carry "# ..." config header lines before the JSON body
    std::size_t start = 0;
    while (start < text.size() && (text[start] == '#' || text[start] == '\n' ||
                                   text[start] == '\r' || text[start] == ' ')) {
        if (text[start] == '#') {
            start = text.find('\n', start);
            if (start == std::string::npos) throw Error(errc::bad_input, "no JSON body");
        } else {
            ++start;
        }
    }
    nlohmann::json j = nlohmann::json::parse(text.substr(start));
    PropertyReport report;
    report.property = j.at("property").get<std::string>();
    report.verdict = j.at("verdict").get<std::string>() == "Violated"
                         ? PropertyVerdict::violated
                         : PropertyVerdict::holds_on_domain;
    report.domain = j.value("domain", "");
    if (j.contains("witness")) {
        const auto& w = j["witness"];
        if (report.property == "nonexpansive") {
            NonExpansiveWitness nw;
            nw.x = w.at("x").get<Counts>();
            nw.x_prime = w.at("x_prime").get<Counts>();
            nw.klass = w.at("class").get<int>();
            nw.choice_x = w.at("choice_x").get<int>();
            nw.choice_x_prime = w.at("choice_x_prime").get<int>();
            nw.image_x = w.at("image_x").get<Counts>();
            nw.image_x_prime = w.at("image_x_prime").get<Counts>();
            nw.norm_images = w.at("norm_images").get<int>();
            nw.norm_inputs = w.at("norm_inputs").get<int>();
            nw.for_all_draws = w.at("for_all_draws").get<bool>();
            report.nonexpansive_witness = nw;
        } else {
            SubAdditiveWitness sw;
            sw.z1 = word_from_string(w.at("z1").get<std::string>());
            sw.z2 = word_from_string(w.at("z2").get<std::string>());
            sw.leftover_concat = w.at("leftover_concat").get<int>();
            sw.leftover_z1 = w.at("leftover_z1").get<int>();
            sw.leftover_z2 = w.at("leftover_z2").get<int>();
            sw.for_all_draws = w.at("for_all_draws").get<bool>();
            report.subadditive_witness = sw;
        }
    }
    return report;
}

}  // namespace matchsim
