#include "matchsim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace matchsim {

namespace {

constexpr int kMaxClasses = 30;       // bitmask representation
constexpr int kMaxEnumClasses = 20;   // 2^n independent-set enumeration

std::vector<int> mask_to_classes(std::uint32_t mask) {
    std::vector<int> out;
    for (int c = 1; mask != 0; ++c, mask >>= 1)
        if (mask & 1u) out.push_back(c);
    return out;
}

}  // namespace

CompatibilityGraph CompatibilityGraph::from_edge_list(int n,
                                                      const std::vector<std::pair<int, int>>& pairs) {
    if (n < 2) throw Error(errc::bad_input, "need at least two classes");
    if (n > kMaxClasses)
        throw Error(errc::too_large, "more than " + std::to_string(kMaxClasses) + " classes");

    std::set<std::pair<int, int>> dedup;
    for (auto [i, j] : pairs) {
        if (i < 1 || i > n || j < 1 || j > n)
            throw Error(errc::out_of_range, "edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
        if (i == j) throw Error(errc::self_loop, "class " + std::to_string(i));
        dedup.insert({std::min(i, j), std::max(i, j)});
    }

    CompatibilityGraph g;
    g.n_ = n;
    g.edges_.assign(dedup.begin(), dedup.end());
    g.neighbors_.assign(n + 1, {});
    g.adj_mask_.assign(n + 1, 0);
    for (auto [i, j] : g.edges_) {
        g.neighbors_[i].push_back(j);
        g.neighbors_[j].push_back(i);
        g.adj_mask_[i] |= 1u << (j - 1);
        g.adj_mask_[j] |= 1u << (i - 1);
    }
    for (int i = 1; i <= n; ++i) std::sort(g.neighbors_[i].begin(), g.neighbors_[i].end());

    // connectivity (implies nonempty neighbor sets for n >= 2)
    std::vector<bool> seen(n + 1, false);
    std::deque<int> queue{1};
    seen[1] = true;
    int reached = 1;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int v : g.neighbors_[u])
            if (!seen[v]) {
                seen[v] = true;
                ++reached;
                queue.push_back(v);
            }
    }
    if (reached != n) throw Error(errc::disconnected, "graph is not connected");
    return g;
}

std::string CompatibilityGraph::to_text() const {
    std::ostringstream out;
    out << n_ << '\n';
    for (auto [i, j] : edges_) out << i << ' ' << j << '\n';
    return out.str();
}

std::string CompatibilityGraph::to_json() const {
    nlohmann::json j;
    j["n"] = n_;
    j["edges"] = nlohmann::json::array();
    for (auto [a, b] : edges_) j["edges"].push_back({a, b});
    return j.dump();
}

std::uint64_t CompatibilityGraph::hash() const {
    // FNV-1a over the canonical text form
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : to_text()) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

ArrivalDistribution::ArrivalDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw Error(errc::bad_input, "empty distribution");
    double sum = 0.0;
    for (double p : probs_) {
        if (!(p > 0.0)) throw Error(errc::bad_input, "mu must have full support");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw Error(errc::bad_input, "mu must sum to 1");
}

ArrivalDistribution ArrivalDistribution::uniform(int n) {
    std::vector<double> p(n, 1.0 / n);
    // make the entries sum to exactly the represented 1.0 within tolerance
    return ArrivalDistribution(std::move(p));
}

double ArrivalDistribution::mass_of_set(const std::vector<int>& classes) const {
    double m = 0.0;
    for (int c : classes) m += probs_[c - 1];
    return m;
}

int ArrivalDistribution::sample_class(double unit) const {
    double acc = 0.0;
    for (int c = 1; c <= size(); ++c) {
        acc += probs_[c - 1];
        if (unit < acc) return c;
    }
    return size();
}

bool OddCycleCert::verify(const CompatibilityGraph& g) const {
    if (nodes.size() < 3 || nodes.size() % 2 == 0) return false;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        int a = nodes[k];
        int b = nodes[(k + 1) % nodes.size()];
        if (!g.contains(a) || !g.contains(b) || !g.adjacent(a, b)) return false;
    }
    return true;
}

std::vector<int> neighbors_of_set(const CompatibilityGraph& g, const std::vector<int>& classes) {
    std::uint32_t mask = 0;
    for (int c : classes) {
        g.require_class(c);
        mask |= g.neighbor_mask(c);
    }
    return mask_to_classes(mask);
}

std::vector<std::vector<int>> enumerate_independent_sets(const CompatibilityGraph& g) {
    int n = g.num_classes();
    if (n > kMaxEnumClasses)
        throw Error(errc::too_large, "independent-set enumeration refused for n > 20");
    std::vector<std::vector<int>> sets;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        bool independent = true;
        for (int c = 1; c <= n && independent; ++c)
            if ((mask >> (c - 1)) & 1u)
                if (g.neighbor_mask(c) & mask) independent = false;
        if (independent) sets.push_back(mask_to_classes(mask));
    }
    std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return sets;
}

NcondReport ncond_check(const CompatibilityGraph& g, const ArrivalDistribution& mu) {
    if (mu.size() != g.num_classes())
        throw Error(errc::dimension_mismatch, "mu length does not match class count");
    NcondReport report;
    for (const auto& ind : enumerate_independent_sets(g)) {
        double mu_set = mu.mass_of_set(ind);
        double mu_nbr = mu.mass_of_set(neighbors_of_set(g, ind));
        if (!(mu_set < mu_nbr)) {
            report.holds = false;
            report.witness = ind;
            report.witness_mu_set = mu_set;
            report.witness_mu_neighborhood = mu_nbr;
            return report;
        }
    }
    report.holds = true;
    return report;
}

bool is_bipartite(const CompatibilityGraph& g) {
    int n = g.num_classes();
    std::vector<int> color(n + 1, -1);
    std::deque<int> queue{1};
    color[1] = 0;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int v : g.neighbors(u)) {
            if (color[v] == -1) {
                color[v] = 1 - color[u];
                queue.push_back(v);
            } else if (color[v] == color[u]) {
                return false;
            }
        }
    }
    return true;
}

namespace {

// BFS with ascending-class exploration, so parents (and hence extracted
// paths) are deterministic.
void bfs_tree(const CompatibilityGraph& g, int source, std::vector<int>& dist,
              std::vector<int>& parent) {
    int n = g.num_classes();
    dist.assign(n + 1, -1);
    parent.assign(n + 1, 0);
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
}

std::vector<int> path_from_root(const std::vector<int>& parent, int source, int target) {
    std::vector<int> path{target};
    while (path.back() != source) path.push_back(parent[path.back()]);
    std::reverse(path.begin(), path.end());
    return path;
}

// Splits a closed odd walk at a repeated node until it is a simple cycle.
// One of the two sub-walks at any repeat is always odd.
std::vector<int> reduce_to_simple_odd_cycle(std::vector<int> walk) {
    for (;;) {
        std::vector<int> first_pos(64, -1);
        bool reduced = false;
        for (std::size_t k = 0; k < walk.size() && !reduced; ++k) {
            int node = walk[k];
            if (first_pos[node] >= 0) {
                std::size_t i = static_cast<std::size_t>(first_pos[node]);
                std::vector<int> inner(walk.begin() + i, walk.begin() + k);
                std::vector<int> outer(walk.begin(), walk.begin() + i);
                outer.insert(outer.end(), walk.begin() + k, walk.end());
                walk = (inner.size() % 2 == 1) ? inner : outer;
                reduced = true;
            } else {
                first_pos[node] = static_cast<int>(k);
            }
        }
        if (!reduced) return walk;
    }
}

std::vector<int> canonicalize_cycle(std::vector<int> cycle) {
    auto it = std::min_element(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), it, cycle.end());
    if (cycle.size() >= 3 && cycle.back() < cycle[1])
        std::reverse(cycle.begin() + 1, cycle.end());
    return cycle;
}

}  // namespace

std::optional<OddCycleCert> find_induced_odd_cycle(const CompatibilityGraph& g) {
    if (is_bipartite(g)) return std::nullopt;
    int n = g.num_classes();
    int best_len = -1;
    int best_root = 0, best_u = 0, best_v = 0;
    std::vector<int> dist, parent;
    for (int s = 1; s <= n; ++s) {
        bfs_tree(g, s, dist, parent);
        for (auto [u, v] : g.edges()) {
            int len = dist[u] + dist[v] + 1;
            if (len % 2 == 0) continue;
            if (best_len < 0 || len < best_len) {
                best_len = len;
                best_root = s;
                best_u = u;
                best_v = v;
            }
        }
    }
    bfs_tree(g, best_root, dist, parent);
    // closed walk u .. s .. v, closed by the edge (v, u)
    std::vector<int> to_u = path_from_root(parent, best_root, best_u);
    std::vector<int> to_v = path_from_root(parent, best_root, best_v);
    std::vector<int> walk(to_u.rbegin(), to_u.rend());
    walk.insert(walk.end(), to_v.begin() + 1, to_v.end());
    OddCycleCert cert{canonicalize_cycle(reduce_to_simple_odd_cycle(std::move(walk)))};
    return cert;
}

OddCycleCert spanning_odd_cycle(const CompatibilityGraph& g) {
    auto base = find_induced_odd_cycle(g);
    if (!base) throw Error(errc::bipartite_graph, "no odd cycle exists");

    std::vector<bool> covered(g.num_classes() + 1, false);
    for (int c : base->nodes) covered[c] = true;

    int anchor = base->nodes.front();
    std::vector<int> dist, parent;
    bfs_tree(g, anchor, dist, parent);

    std::vector<int> walk = base->nodes;
    for (int c = 1; c <= g.num_classes(); ++c) {
        if (covered[c]) continue;
        // out-and-back trip anchor -> c -> anchor; the terminal anchor is
        // implicit (next segment or the closing edge starts there)
        std::vector<int> path = path_from_root(parent, anchor, c);
        walk.insert(walk.end(), path.begin(), path.end());
        walk.insert(walk.end(), path.rbegin() + 1, path.rend() - 1);
        for (int node : path) covered[node] = true;
    }
    OddCycleCert cert{std::move(walk)};
    return cert;
}

MultipartiteReport classify_complete_multipartite(const CompatibilityGraph& g) {
    int n = g.num_classes();
    // group classes by identical neighborhood; in a complete multipartite
    // graph the parts are exactly those groups
    std::vector<std::vector<int>> parts;
    std::vector<std::uint32_t> masks;
    for (int c = 1; c <= n; ++c) {
        std::uint32_t m = g.neighbor_mask(c);
        bool placed = false;
        for (std::size_t k = 0; k < parts.size(); ++k)
            if (masks[k] == m) {
                parts[k].push_back(c);
                placed = true;
                break;
            }
        if (!placed) {
            parts.push_back({c});
            masks.push_back(m);
        }
    }
    MultipartiteReport report;
    if (parts.size() < 3) return report;
    for (std::size_t a = 0; a < parts.size(); ++a)
        for (std::size_t b = a + 1; b < parts.size(); ++b)
            for (int i : parts[a])
                for (int j : parts[b])
                    if (!g.adjacent(i, j)) return report;
    // same-group pairs are non-adjacent by construction (j is never in its
    // own neighborhood), so non-adjacency is transitive here
    report.is_cpp = true;
    report.parts = std::move(parts);
    return report;
}

CompatibilityGraph parse_graph(const std::string& content) {
    std::size_t first = content.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw Error(errc::bad_input, "empty graph description");
    if (content[first] == '{') {
        nlohmann::json j = nlohmann::json::parse(content, nullptr, false);
        if (j.is_discarded() || !j.contains("n") || !j.contains("edges"))
            throw Error(errc::bad_input, "malformed graph object");
        std::vector<std::pair<int, int>> pairs;
        for (const auto& e : j["edges"]) pairs.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        return CompatibilityGraph::from_edge_list(j["n"].get<int>(), pairs);
    }
    std::istringstream in(content);
    int n = 0;
    if (!(in >> n)) throw Error(errc::bad_input, "missing class count");
    std::vector<std::pair<int, int>> pairs;
    int a = 0, b = 0;
    while (in >> a >> b) pairs.emplace_back(a, b);
    return CompatibilityGraph::from_edge_list(n, pairs);
}

CompatibilityGraph load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io_error, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_graph(buffer.str());
}

CompatibilityGraph make_paw() {
    return CompatibilityGraph::from_edge_list(4, {{1, 2}, {2, 3}, {2, 4}, {3, 4}});
}

CompatibilityGraph make_cycle(int length) {
    if (length < 3) throw Error(errc::bad_input, "cycle length must be >= 3");
    std::vector<std::pair<int, int>> pairs;
    for (int c = 1; c < length; ++c) pairs.emplace_back(c, c + 1);
    pairs.emplace_back(length, 1);
    return CompatibilityGraph::from_edge_list(length, pairs);
}

CompatibilityGraph make_complete_multipartite(const std::vector<int>& part_sizes) {
    if (part_sizes.size() < 2) throw Error(errc::bad_input, "need at least two parts");
    int n = std::accumulate(part_sizes.begin(), part_sizes.end(), 0);
    int p = static_cast<int>(part_sizes.size());
    std::vector<int> part_of(n + 1, 0);
    std::vector<int> remaining = part_sizes;
    int c = 1;
    // round-robin labeling: sizes (2,2,2) give parts {1,4}, {2,5}, {3,6}
    while (c <= n) {
        for (int k = 0; k < p && c <= n; ++k) {
            if (remaining[k] > 0) {
                part_of[c++] = k;
                --remaining[k];
            }
        }
    }
    std::vector<std::pair<int, int>> pairs;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            if (part_of[i] != part_of[j]) pairs.emplace_back(i, j);
    return CompatibilityGraph::from_edge_list(n, pairs);
}

}  // namespace matchsim
