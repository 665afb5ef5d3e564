#include "matchsim/erasing.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

namespace matchsim {

namespace {

// layered evolution of the reachable-state set; `limit` < 0 disables the
// even-prefix size bound
bool all_draws_satisfy(const CompatibilityGraph& g, const PolicySpec& policy, const Word& start,
                       const Word& z, int limit, const VerifyOptions& opts) {
    std::set<Word> layer{start};
    for (std::size_t k = 0; k < z.size(); ++k) {
        std::set<Word> next;
        for (const Word& q : layer) {
            std::vector<int> positions = candidate_positions(g, policy, q, z[k]);
            if (positions.empty()) {
                Word grown = q;
                grown.push_back(z[k]);
                next.insert(std::move(grown));
            } else {
                for (int pos : positions) {
                    Word shrunk = q;
                    shrunk.erase(shrunk.begin() + pos);
                    next.insert(std::move(shrunk));
                }
            }
            if (next.size() > opts.max_layer)
                throw Error(errc::domain_too_large, "draw enumeration exceeds layer bound");
        }
        layer = std::move(next);
        if (limit >= 0 && (k + 1) % 2 == 0)
            for (const Word& q : layer)
                if (static_cast<int>(q.size()) > limit) return false;
    }
    return layer.size() == 1 && layer.begin()->empty();
}

bool sampled_check(const CompatibilityGraph& g, const PolicySpec& policy, const Word& start,
                   const Word& z, int limit, const VerifyOptions& opts) {
    for (int trial = 0; trial < opts.sample_trials; ++trial) {
        Rng rng(replica_seed(opts.sample_seed, static_cast<std::uint64_t>(trial)));
        Word state = start;
        for (std::size_t k = 0; k < z.size(); ++k) {
            ArrivalEvent e{z[k], std::nullopt};
            state = apply_arrival(g, policy, state, e, &rng).queue;
            if (limit >= 0 && (k + 1) % 2 == 0 && static_cast<int>(state.size()) > limit)
                return false;
        }
        if (!state.empty()) return false;
    }
    return true;
}

void require_even(const Word& z) {
    if (z.size() % 2 != 0) throw Error(errc::odd_length, "word length must be even");
}

void require_state(const CompatibilityGraph& g, const Word& u) {
    if (u.size() % 2 != 0) throw Error(errc::odd_length, "buffer content must have even length");
    if (!is_admissible(g, u)) throw Error(errc::inadmissible_state, word_to_string(u));
}

std::vector<int> bfs_shortest_path(const CompatibilityGraph& g, int source, int target) {
    std::vector<int> dist(g.num_classes() + 1, -1), parent(g.num_classes() + 1, 0);
    std::deque<int> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int v : g.neighbors(u))
            if (dist[v] == -1) {
                dist[v] = dist[u] + 1;
                parent[v] = u;
                queue.push_back(v);
            }
    }
    std::vector<int> path{target};
    while (path.back() != source) path.push_back(parent[path.back()]);
    std::reverse(path.begin(), path.end());
    return path;
}

// word erasing the residual "aa": shortest path to an induced odd cycle with
// doubled path letters, then a sweep of the cycle
Word tail_completion(const CompatibilityGraph& g, int a) {
    auto cycle = find_induced_odd_cycle(g);
    if (!cycle) throw Error(errc::bipartite_graph, "no odd cycle exists");
    const std::vector<int>& nodes = cycle->nodes;

    auto on_cycle = std::find(nodes.begin(), nodes.end(), a);
    if (on_cycle != nodes.end()) {
        // rotate so the cycle starts at a, then sweep the rest once
        Word out;
        std::size_t start = static_cast<std::size_t>(on_cycle - nodes.begin());
        for (std::size_t k = 1; k < nodes.size(); ++k)
            out.push_back(nodes[(start + k) % nodes.size()]);
        return out;
    }

    // nearest cycle node, lowest class on ties
    std::vector<int> dist(g.num_classes() + 1, -1);
    std::vector<int> parent(g.num_classes() + 1, 0);
    std::deque<int> queue{a};
    dist[a] = 0;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int v : g.neighbors(u))
            if (dist[v] == -1) {
                dist[v] = dist[u] + 1;
                parent[v] = u;
                queue.push_back(v);
            }
    }
    int entry = 0;
    for (int c : nodes)
        if (entry == 0 || dist[c] < dist[entry] || (dist[c] == dist[entry] && c < entry)) entry = c;

    std::vector<int> path{entry};
    while (path.back() != a) path.push_back(parent[path.back()]);
    std::reverse(path.begin(), path.end());  // a, j1, ..., jq, entry

    Word out;
    for (std::size_t k = 1; k + 1 < path.size(); ++k) {
        out.push_back(path[k]);
        out.push_back(path[k]);
    }
    out.push_back(entry);
    out.push_back(entry);
    std::size_t start = static_cast<std::size_t>(
        std::find(nodes.begin(), nodes.end(), entry) - nodes.begin());
    for (std::size_t k = 1; k < nodes.size(); ++k)
        out.push_back(nodes[(start + k) % nodes.size()]);
    return out;
}

// word erasing the two-letter residual "ab" (a older), a and b incompatible
Word pair_eraser(const CompatibilityGraph& g, int a, int b) {
    if (a == b) return tail_completion(g, a);
    std::vector<int> path = bfs_shortest_path(g, a, b);
    int p = static_cast<int>(path.size()) - 1;  // >= 2 since a, b incompatible
    Word word(path.begin() + 1, path.end() - 1);
    if (p % 2 == 1) return word;
    word.push_back(path[p - 1]);  // doubled last interior letter
    Word tail = tail_completion(g, path[p - 1]);
    word.insert(word.end(), tail.begin(), tail.end());
    return word;
}

}  // namespace

bool is_erasing_word(const CompatibilityGraph& g, const PolicySpec& policy, const Word& u,
                     const Word& z, const VerifyOptions& opts) {
    policy.validate(g);
    require_even(z);
    require_state(g, u);
    for (int c : z) g.require_class(c);
    return all_draws_satisfy(g, policy, {}, z, -1, opts) &&
           all_draws_satisfy(g, policy, u, z, -1, opts);
}

ErasingCert construct_erasing_word(const CompatibilityGraph& g, const PolicySpec& policy,
                                   const Word& u) {
    policy.validate(g);
    require_state(g, u);
    if (is_bipartite(g)) throw Error(errc::bipartite_graph, "erasing words need an odd cycle");

    ErasingCert cert;
    cert.target = u;
    cert.policy = policy;
    if (u.empty()) {
        cert.checked_domain = "trivial";
        return cert;
    }

    Word z;
    int appends = 0;
    int max_appends = static_cast<int>(u.size()) + 16;
    for (;;) {
        // canonical residual first; when it is gone, chase remaining draw
        // branches (sigma-dependent policies only)
        Word residual = apply_word_canonical(g, policy, u, z);
        if (residual.empty()) {
            std::vector<Word> branches = reachable_states(g, policy, u, z);
            for (const Word& r : branches)
                if (!r.empty() && (residual.empty() || r < residual)) residual = r;
        }
        if (residual.empty()) break;
        if (++appends > max_appends)
            throw Error(errc::verification_failed,
                        "construction did not terminate for " + word_to_string(u));
        int a = residual[residual.size() - 2];
        int b = residual[residual.size() - 1];
        Word extension = pair_eraser(g, a, b);
        z.insert(z.end(), extension.begin(), extension.end());
    }

    if (!is_erasing_word(g, policy, u, z))
        throw Error(errc::verification_failed,
                    "constructed word is not erasing for " + word_to_string(u));
    cert.word = z;
    cert.checked_domain = "exhaustive draws";
    return cert;
}

std::vector<Word> find_minimal_erasing_words(const CompatibilityGraph& g, const PolicySpec& policy,
                                             const Word& u, int max_len) {
    policy.validate(g);
    require_state(g, u);
    if (max_len % 2 != 0) throw Error(errc::odd_length, "max_len must be even");
    if (is_bipartite(g) && !u.empty())
        throw Error(errc::bipartite_graph, "no erasing word of a nonempty buffer exists");

    int n = g.num_classes();
    for (int length = 2; length <= max_len; length += 2) {
        double space = 1.0;
        for (int k = 0; k < length; ++k) space *= n;
        if (space > 4e6) throw Error(errc::domain_too_large, "word search space too large");

        std::vector<Word> found;
        Word word(length, 1);
        for (;;) {
            if (is_erasing_word(g, policy, u, word)) found.push_back(word);
            int k = length - 1;
            while (k >= 0 && word[k] == n) {
                word[k] = 1;
                --k;
            }
            if (k < 0) break;
            ++word[k];
        }
        if (!found.empty()) {
            // drop words with a proper even prefix that already erases u
            std::vector<Word> reduced;
            for (const Word& z : found) {
                bool has_erasing_prefix = false;
                for (int cut = 2; cut < length && !has_erasing_prefix; cut += 2)
                    if (is_erasing_word(g, policy, Word(z.begin(), z.begin() + cut), {}) &&
                        is_erasing_word(g, policy, u, Word(z.begin(), z.begin() + cut)))
                        has_erasing_prefix = true;
                if (!has_erasing_prefix) reduced.push_back(z);
            }
            return reduced;
        }
    }
    throw Error(errc::none_found,
                "no erasing word of " + word_to_string(u) + " within length " +
                    std::to_string(max_len));
}

bool is_strong_erasing_word(const CompatibilityGraph& g, const PolicySpec& policy, int capacity,
                            const Word& z, const VerifyOptions& opts) {
    policy.validate(g);
    require_even(z);
    if (capacity < 0) throw Error(errc::bad_input, "capacity must be >= 0");
    for (int c : z) g.require_class(c);
    for (const Word& w : enumerate_w2(g, capacity))
        if (!all_draws_satisfy(g, policy, w, z, static_cast<int>(w.size()), opts)) return false;
    return true;
}

ErasingCert certify_strong(const CompatibilityGraph& g, const PolicySpec& policy, int capacity,
                           const Word& z) {
    ErasingCert cert;
    cert.capacity = capacity;
    cert.word = z;
    cert.policy = policy;
    try {
        if (!is_strong_erasing_word(g, policy, capacity, z))
            throw Error(errc::verification_failed,
                        word_to_string(z) + " is not " + std::to_string(2 * capacity) +
                            "-strong for " + policy.describe());
        cert.checked_domain = "exhaustive draws over W2(" + std::to_string(capacity) + ")";
    } catch (const Error& err) {
        if (err.code() != errc::domain_too_large) throw;
        VerifyOptions opts;
        bool ok = true;
        for (const Word& w : enumerate_w2(g, capacity))
            if (!sampled_check(g, policy, w, z, static_cast<int>(w.size()), opts)) {
                ok = false;
                break;
            }
        if (!ok)
            throw Error(errc::verification_failed,
                        word_to_string(z) + " fails sampled strong verification");
        cert.checked_domain =
            "sampled draws (" + std::to_string(opts.sample_trials) + " trials) over W2(" +
            std::to_string(capacity) + ")";
    }
    return cert;
}

ErasingCert compose_strong_words(const CompatibilityGraph& g, const PolicySpec& policy,
                                 const std::vector<ErasingCert>& certs) {
    if (certs.empty()) throw Error(errc::no_base_words, "no certificates to compose");
    Word word;
    for (const ErasingCert& cert : certs) {
        if (cert.capacity != 1 || !is_strong_erasing_word(g, policy, 1, cert.word))
            throw Error(errc::verification_failed,
                        word_to_string(cert.word) + " is not 2-strong under " + policy.describe());
        word.insert(word.end(), cert.word.begin(), cert.word.end());
    }
    int capacity = static_cast<int>(certs.size());

    ErasingCert out;
    out.capacity = capacity;
    out.word = word;
    out.policy = policy;
    std::size_t state_count = enumerate_w2(g, capacity).size();
    if (state_count <= 20000) {
        if (!is_strong_erasing_word(g, policy, capacity, word))
            throw Error(errc::verification_failed, "composition failed strong verification");
        out.checked_domain = "exhaustive draws over W2(" + std::to_string(capacity) + ")";
    } else {
        out.checked_domain = "composition-derived from certified 2-strong factors";
    }
    return out;
}

Word make_lcfm_cycle_word(const CompatibilityGraph& g) {
    OddCycleCert walk = spanning_odd_cycle(g);  // throws BipartiteGraph
    Word word;
    for (int rep = 0; rep < 4; ++rep) word.insert(word.end(), walk.nodes.begin(), walk.nodes.end());
    if (!is_strong_erasing_word(g, PolicySpec::lcfm(), 1, word))
        throw Error(errc::verification_failed, "spanning-cycle word failed LCFM verification");
    return word;
}

Word make_fcfm_cycle_word(const CompatibilityGraph& g) {
    int n = g.num_classes();
    bool odd_cycle_graph = (n % 2 == 1) && n >= 3;
    for (int c = 1; c <= n && odd_cycle_graph; ++c)
        if (static_cast<int>(g.neighbors(c).size()) != 2) odd_cycle_graph = false;
    if (!odd_cycle_graph) throw Error(errc::not_an_odd_cycle, "graph is not an odd cycle");

    // cycle order from class 1 toward its smaller neighbor
    Word forward{1, g.neighbors(1).front()};
    while (static_cast<int>(forward.size()) < n) {
        int prev = forward[forward.size() - 2];
        int cur = forward.back();
        for (int next : g.neighbors(cur))
            if (next != prev) {
                forward.push_back(next);
                break;
            }
    }
    Word backward{1};
    for (std::size_t k = forward.size(); k-- > 1;) backward.push_back(forward[k]);

    Word word;
    word.insert(word.end(), forward.begin(), forward.end());
    word.insert(word.end(), forward.begin(), forward.end());
    word.insert(word.end(), backward.begin(), backward.end());
    word.insert(word.end(), backward.begin(), backward.end());
    if (!is_strong_erasing_word(g, PolicySpec::fcfm(), 1, word))
        throw Error(errc::verification_failed, "cycle exploration word failed FCFM verification");
    return word;
}

Word make_complete_partite_word(const CompatibilityGraph& g) {
    MultipartiteReport report = classify_complete_multipartite(g);
    if (!report.is_cpp)
        throw Error(errc::not_complete_multipartite, "graph is not complete p-partite, p >= 3");
    const auto& parts = *report.parts;
    int p = static_cast<int>(parts.size());

    // part pair ring (1,2), (2,3), ..., (p,1); first appearance of a part
    // contributes its smallest element, the second its largest
    std::vector<int> appearances(p, 0);
    auto pick = [&](int part) {
        int element = appearances[part] == 0 ? parts[part].front() : parts[part].back();
        ++appearances[part];
        return element;
    };
    Word word;
    for (int k = 0; k < p; ++k) {
        word.push_back(pick(k));
        word.push_back(pick((k + 1) % p));
    }

    // the pattern is policy-independent; verify the
    // whole implemented family
    std::vector<PolicySpec> family{PolicySpec::fcfm(),    PolicySpec::lcfm(),
                                   PolicySpec::ml(),      PolicySpec::ms(),
                                   PolicySpec::uniform(), PolicySpec::priority_ascending(g)};
    for (const PolicySpec& policy : family)
        if (!is_strong_erasing_word(g, policy, 1, word))
            throw Error(errc::verification_failed,
                        "complete-partite word failed under " + policy.describe());
    return word;
}

std::vector<Word> search_strong_words(const CompatibilityGraph& g, const PolicySpec& policy,
                                      int capacity, int word_length, std::size_t max_results) {
    policy.validate(g);
    if (word_length < 2 || word_length % 2 != 0)
        throw Error(errc::bad_input, "word length must be even and positive");

    // every even prefix of a strong word is perfectly matchable from the
    // empty buffer, so candidates are sequences of compatible ordered pairs
    std::vector<std::pair<int, int>> ordered_edges;
    for (auto [i, j] : g.edges()) {
        ordered_edges.emplace_back(i, j);
        ordered_edges.emplace_back(j, i);
    }
    std::sort(ordered_edges.begin(), ordered_edges.end());

    std::vector<Word> states = enumerate_w2(g, capacity);
    std::vector<Word> results;

    // DFS over pair slots with the per-start reachable sets evolved in step
    struct Frame {
        std::vector<std::set<Word>> layers;
    };
    Frame root;
    for (const Word& w : states) root.layers.push_back({w});

    auto advance = [&](const std::set<Word>& src, int v, std::set<Word>& dst) {
        for (const Word& state : src) {
            std::vector<int> positions = candidate_positions(g, policy, state, v);
            if (positions.empty()) {
                Word grown = state;
                grown.push_back(v);
                dst.insert(std::move(grown));
            } else {
                for (int pos : positions) {
                    Word shrunk = state;
                    shrunk.erase(shrunk.begin() + pos);
                    dst.insert(std::move(shrunk));
                }
            }
        }
    };

    std::function<void(const Frame&, Word&)> descend = [&](const Frame& frame, Word& prefix) {
        if (results.size() >= max_results) return;
        if (static_cast<int>(prefix.size()) == word_length) {
            for (const auto& layer : frame.layers)
                if (layer.size() != 1 || !layer.begin()->empty()) return;
            results.push_back(prefix);
            return;
        }
        for (auto [e, f] : ordered_edges) {
            Frame next;
            next.layers.resize(frame.layers.size());
            bool viable = true;
            for (std::size_t s = 0; s < frame.layers.size() && viable; ++s) {
                int limit = static_cast<int>(states[s].size());
                std::set<Word> mid;
                advance(frame.layers[s], e, mid);
                advance(mid, f, next.layers[s]);
                for (const Word& state : next.layers[s])
                    if (static_cast<int>(state.size()) > limit) {
                        viable = false;
                        break;
                    }
            }
            if (!viable) continue;
            prefix.push_back(e);
            prefix.push_back(f);
            descend(next, prefix);
            prefix.pop_back();
            prefix.pop_back();
            if (results.size() >= max_results) return;
        }
    };
    Word prefix;
    descend(root, prefix);
    std::sort(results.begin(), results.end());
    return results;
}

std::vector<Word> build_dictionary(const CompatibilityGraph& g, const PolicySpec& policy,
                                   int capacity, int q, const DictionaryOptions& opts) {
    if (capacity < 1 || q < 1) throw Error(errc::bad_input, "capacity and q must be >= 1");
    std::set<Word> base;

    if (opts.use_constructors) {
        auto try_add = [&](auto make) {
            try {
                Word w = make();
                if (static_cast<int>(w.size()) == 2 * q &&
                    is_strong_erasing_word(g, policy, 1, w))
                    base.insert(w);
            } catch (const Error&) {
            }
        };
        try_add([&] { return make_complete_partite_word(g); });
        try_add([&] { return make_lcfm_cycle_word(g); });
        try_add([&] { return make_fcfm_cycle_word(g); });
    }
    if (opts.use_search)
        for (Word& w : search_strong_words(g, policy, 1, 2 * q)) base.insert(std::move(w));

    if (base.empty())
        throw Error(errc::no_base_words,
                    "no certified 2-strong word of length " + std::to_string(2 * q));

    std::vector<Word> bases(base.begin(), base.end());
    double count = 1.0;
    for (int k = 0; k < capacity; ++k) count *= static_cast<double>(bases.size());
    if (count > static_cast<double>(opts.max_words))
        throw Error(errc::too_large, "dictionary would exceed the configured bound");

    std::set<Word> dictionary;
    std::vector<std::size_t> pick(capacity, 0);
    for (;;) {
        Word w;
        for (std::size_t idx : pick) {
            const Word& factor = bases[idx];
            w.insert(w.end(), factor.begin(), factor.end());
        }
        dictionary.insert(std::move(w));
        int k = capacity - 1;
        while (k >= 0 && pick[k] + 1 == bases.size()) pick[k--] = 0;
        if (k < 0) break;
        ++pick[k];
    }
    return {dictionary.begin(), dictionary.end()};
}

std::string dictionary_to_text(const CompatibilityGraph& g, const PolicySpec& policy, int capacity,
                               int q, const std::vector<Word>& words) {
    std::ostringstream out;
    out << "# graph=" << std::hex << g.hash() << std::dec << '\n';
    out << "# policy=" << policy.describe() << '\n';
    out << "# capacity=" << capacity << '\n';
    out << "# q=" << q << '\n';
    for (const Word& w : words) out << word_to_string(w) << '\n';
    return out.str();
}

std::vector<Word> dictionary_from_text(const std::string& text, const CompatibilityGraph& g,
                                       int expected_capacity) {
    std::istringstream in(text);
    std::string line;
    std::vector<Word> words;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto eq = line.find("graph=");
            if (eq != std::string::npos) {
                std::uint64_t h = std::stoull(line.substr(eq + 6), nullptr, 16);
                if (h != g.hash())
                    throw Error(errc::bad_input, "dictionary was built for a different graph");
            }
            auto cap = line.find("capacity=");
            if (cap != std::string::npos) {
                int c = std::stoi(line.substr(cap + 9));
                if (expected_capacity > 0 && c != expected_capacity)
                    throw Error(errc::bad_input, "dictionary capacity mismatch");
            }
            continue;
        }
        words.push_back(word_from_string(line));
    }
    if (words.empty()) throw Error(errc::empty_dictionary, "dictionary file holds no words");
    return words;
}

}  // namespace matchsim
