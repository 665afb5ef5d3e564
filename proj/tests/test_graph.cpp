#include <doctest.h>

#include <algorithm>
#include <set>

#include "matchsim/graph.hpp"
#include "matchsim/rng.hpp"

using namespace matchsim;

namespace {

// independent-set oracle: direct subset filter, no shared code with the
// library's mask-based enumeration order
std::set<std::set<int>> brute_force_independent_sets(const CompatibilityGraph& g) {
    std::set<std::set<int>> out;
    int n = g.num_classes();
    for (int mask = 1; mask < (1 << n); ++mask) {
        std::set<int> sub;
        for (int c = 1; c <= n; ++c)
            if (mask & (1 << (c - 1))) sub.insert(c);
        bool ok = true;
        for (int a : sub)
            for (int b : sub)
                if (a < b && g.adjacent(a, b)) ok = false;
        if (ok) out.insert(sub);
    }
    return out;
}

CompatibilityGraph random_connected_graph(Rng& rng, int n, bool want_non_bipartite) {
    for (;;) {
        std::vector<std::pair<int, int>> edges;
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                if (rng.next_unit() < 0.45) edges.emplace_back(i, j);
        try {
            CompatibilityGraph g = CompatibilityGraph::from_edge_list(n, edges);
            if (want_non_bipartite && is_bipartite(g)) continue;
            return g;
        } catch (const Error&) {
            continue;
        }
    }
}

// all connected graphs on n labeled nodes
std::vector<CompatibilityGraph> all_connected_graphs(int n) {
    std::vector<std::pair<int, int>> slots;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) slots.emplace_back(i, j);
    std::vector<CompatibilityGraph> out;
    for (std::uint32_t mask = 0; mask < (1u << slots.size()); ++mask) {
        std::vector<std::pair<int, int>> edges;
        for (std::size_t k = 0; k < slots.size(); ++k)
            if (mask & (1u << k)) edges.push_back(slots[k]);
        try {
            out.push_back(CompatibilityGraph::from_edge_list(n, edges));
        } catch (const Error&) {
        }
    }
    return out;
}

}  // namespace

TEST_CASE("from_edge_list builds the paw graph") {
    CompatibilityGraph paw = make_paw();
    CHECK(paw.num_classes() == 4);
    CHECK(paw.edges() == std::vector<std::pair<int, int>>{{1, 2}, {2, 3}, {2, 4}, {3, 4}});
    CHECK(paw.adjacent(3, 4));
    CHECK(!paw.adjacent(1, 3));

    CHECK_NOTHROW(CompatibilityGraph::from_edge_list(2, {{1, 2}}));
    CHECK_THROWS_AS(CompatibilityGraph::from_edge_list(4, {{1, 2}, {3, 4}}), Error);
    CHECK_THROWS_AS(CompatibilityGraph::from_edge_list(2, {{1, 1}}), Error);
    CHECK_THROWS_AS(CompatibilityGraph::from_edge_list(2, {{1, 3}}), Error);

    // duplicate edges collapse
    auto g = CompatibilityGraph::from_edge_list(2, {{1, 2}, {2, 1}, {1, 2}});
    CHECK(g.edges().size() == 1);
}

TEST_CASE("neighbors_of_set matches the union of adjacencies") {
    CompatibilityGraph paw = make_paw();
    CHECK(neighbors_of_set(paw, {1}) == std::vector<int>{2});
    CHECK(neighbors_of_set(paw, {1, 3}) == std::vector<int>{2, 4});
    CHECK(neighbors_of_set(paw, {}) == std::vector<int>{});
    CHECK_THROWS_AS(neighbors_of_set(paw, {5}), Error);
}

TEST_CASE("independent-set enumeration agrees with the brute-force oracle") {
    CompatibilityGraph paw = make_paw();
    auto sets = enumerate_independent_sets(paw);
    CHECK(sets == std::vector<std::vector<int>>{{1}, {2}, {3}, {4}, {1, 3}, {1, 4}});

    CHECK(enumerate_independent_sets(make_cycle(3)).size() == 3);
    auto edge = CompatibilityGraph::from_edge_list(2, {{1, 2}});
    CHECK(enumerate_independent_sets(edge) == std::vector<std::vector<int>>{{1}, {2}});

    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        CompatibilityGraph g = random_connected_graph(rng, 2 + rng.next_below(5), false);
        auto got = enumerate_independent_sets(g);
        std::set<std::set<int>> as_sets;
        for (const auto& s : got) as_sets.insert({s.begin(), s.end()});
        CHECK(as_sets == brute_force_independent_sets(g));
        CHECK(as_sets.size() == got.size());
    }
}

TEST_CASE("ncond_check on the paw graph") {
    CompatibilityGraph paw = make_paw();
    ArrivalDistribution good({0.2, 0.3, 0.25, 0.25});
    CHECK(ncond_check(paw, good).holds);

    auto bad = ncond_check(paw, ArrivalDistribution::uniform(4));
    CHECK(!bad.holds);
    CHECK(*bad.witness == std::vector<int>{1});

    // single edge: one of {1}, {2} always violates
    auto edge = CompatibilityGraph::from_edge_list(2, {{1, 2}});
    for (double p : {0.3, 0.5, 0.7}) {
        auto report = ncond_check(edge, ArrivalDistribution({p, 1.0 - p}));
        CHECK(!report.holds);
    }
}

TEST_CASE("ncond always fails on connected bipartite graphs, n <= 5") {
    Rng rng(11);
    for (int n = 2; n <= 5; ++n) {
        for (const auto& g : all_connected_graphs(n)) {
            if (!is_bipartite(g)) continue;
            for (int trial = 0; trial < 3; ++trial) {
                std::vector<double> mu(n);
                double sum = 0.0;
                for (double& x : mu) sum += (x = 0.05 + rng.next_unit());
                for (double& x : mu) x /= sum;
                double fix = 1.0;
                for (int k = 0; k + 1 < n; ++k) fix -= mu[k];
                mu[n - 1] = fix;
                CHECK(!ncond_check(g, ArrivalDistribution(mu)).holds);
            }
        }
    }
}

TEST_CASE("bipartiteness and induced odd cycles") {
    CompatibilityGraph paw = make_paw();
    CHECK(!is_bipartite(paw));
    auto cycle = find_induced_odd_cycle(paw);
    REQUIRE(cycle);
    CHECK(cycle->nodes == std::vector<int>{2, 3, 4});
    CHECK(cycle->verify(paw));

    CHECK(is_bipartite(make_cycle(4)));
    CHECK(!find_induced_odd_cycle(make_cycle(4)));

    auto c5 = find_induced_odd_cycle(make_cycle(5));
    REQUIRE(c5);
    CHECK(c5->nodes == std::vector<int>{1, 2, 3, 4, 5});

    // returned cycles are chordless
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        CompatibilityGraph g = random_connected_graph(rng, 4 + rng.next_below(4), true);
        auto found = find_induced_odd_cycle(g);
        REQUIRE(found);
        CHECK(found->verify(g));
        const auto& nodes = found->nodes;
        for (std::size_t a = 0; a < nodes.size(); ++a)
            for (std::size_t b = a + 1; b < nodes.size(); ++b) {
                bool consecutive = (b == a + 1) || (a == 0 && b + 1 == nodes.size());
                if (!consecutive) CHECK(!g.adjacent(nodes[a], nodes[b]));
            }
    }
}

TEST_CASE("spanning odd cycle covers every class") {
    CompatibilityGraph paw = make_paw();
    auto walk = spanning_odd_cycle(paw);
    CHECK(walk.nodes == std::vector<int>{2, 3, 4, 2, 1});
    CHECK(walk.verify(paw));

    CHECK(spanning_odd_cycle(make_cycle(5)).nodes == std::vector<int>{1, 2, 3, 4, 5});
    CHECK_THROWS_AS(spanning_odd_cycle(make_cycle(4)), Error);

    Rng rng(19);
    for (int trial = 0; trial < 200; ++trial) {
        CompatibilityGraph g = random_connected_graph(rng, 3 + rng.next_below(6), true);
        auto cert = spanning_odd_cycle(g);
        CHECK(cert.nodes.size() % 2 == 1);
        CHECK(cert.verify(g));
        std::set<int> covered(cert.nodes.begin(), cert.nodes.end());
        CHECK(static_cast<int>(covered.size()) == g.num_classes());
    }
}

TEST_CASE("complete multipartite classification") {
    auto tripartite = make_complete_multipartite({2, 2, 2});
    auto report = classify_complete_multipartite(tripartite);
    REQUIRE(report.is_cpp);
    CHECK(*report.parts ==
          std::vector<std::vector<int>>{{1, 4}, {2, 5}, {3, 6}});

    auto k3 = classify_complete_multipartite(make_cycle(3));
    REQUIRE(k3.is_cpp);
    CHECK(*k3.parts == std::vector<std::vector<int>>{{1}, {2}, {3}});

    CHECK(!classify_complete_multipartite(make_paw()).is_cpp);
}

TEST_CASE("multipartite classification agrees with the complement-clique oracle, n <= 6") {
    // oracle: complete multipartite iff every connected component of the
    // complement graph is a clique (and >= 3 components here)
    for (int n = 3; n <= 6; ++n) {
        for (const auto& g : all_connected_graphs(n)) {
            std::vector<int> component(n + 1, -1);
            int groups = 0;
            for (int c = 1; c <= n; ++c) {
                if (component[c] != -1) continue;
                std::vector<int> stack{c};
                component[c] = groups;
                while (!stack.empty()) {
                    int u = stack.back();
                    stack.pop_back();
                    for (int v = 1; v <= n; ++v)
                        if (v != u && !g.adjacent(u, v) && component[v] == -1) {
                            component[v] = groups;
                            stack.push_back(v);
                        }
                }
                ++groups;
            }
            bool oracle = groups >= 3;
            for (int a = 1; a <= n && oracle; ++a)
                for (int b = a + 1; b <= n && oracle; ++b)
                    if (component[a] == component[b] && g.adjacent(a, b)) oracle = false;
            for (int a = 1; a <= n && oracle; ++a)
                for (int b = a + 1; b <= n && oracle; ++b)
                    if (component[a] != component[b] && !g.adjacent(a, b)) oracle = false;
            CHECK(classify_complete_multipartite(g).is_cpp == oracle);
        }
    }
}

TEST_CASE("graph files round-trip bit-exactly") {
    CompatibilityGraph paw = make_paw();
    CHECK(parse_graph(paw.to_text()) == paw);
    CHECK(parse_graph(paw.to_json()) == paw);
    CHECK(parse_graph(paw.to_text()).to_text() == paw.to_text());
    CHECK(parse_graph(paw.to_json()).to_json() == paw.to_json());
    CHECK_THROWS_AS(parse_graph("nonsense"), Error);
}

TEST_CASE("arrival distributions validate") {
    CHECK_THROWS_AS(ArrivalDistribution({0.5, 0.5, 0.1}), Error);
    CHECK_THROWS_AS(ArrivalDistribution({1.0, 0.0}), Error);
    ArrivalDistribution mu({0.2, 0.3, 0.25, 0.25});
    CHECK(mu.sample_class(0.0) == 1);
    CHECK(mu.sample_class(0.19) == 1);
    CHECK(mu.sample_class(0.21) == 2);
    CHECK(mu.sample_class(0.9999) == 4);
    CHECK(mu.mass_of_set({1, 3}) == doctest::Approx(0.45));
}
