#include <doctest.h>

#include "matchsim/matchings.hpp"

using namespace matchsim;

namespace {

const ArrivalDistribution kPawMu({0.2, 0.3, 0.25, 0.25});

}  // namespace

TEST_CASE("construction points mark empty-buffer times") {
    CompatibilityGraph paw = make_paw();
    auto run = simulate_with_construction_points(paw, PolicySpec::fcfm(), kPawMu, {}, 0, 1);
    CHECK(run.cps.times == std::vector<long>{0});
    CHECK(run.trace.arrivals.empty());

    auto seeded = simulate_with_construction_points(paw, PolicySpec::fcfm(), kPawMu, {1, 3}, 0, 1);
    CHECK(seeded.cps.times.empty());

    int runs_with_cp = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto sim = simulate_with_construction_points(paw, PolicySpec::fcfm(), kPawMu, {}, 10000,
                                                     seed);
        if (sim.cps.times.size() > 1) ++runs_with_cp;
        // replaying prefixes confirms the recorded construction points
        Word buffer;
        std::size_t next_cp = 0;
        for (std::size_t k = 0; k <= sim.trace.arrivals.size(); ++k) {
            if (k % 2 == 0) {
                bool listed = next_cp < sim.cps.times.size() &&
                              sim.cps.times[next_cp] == static_cast<long>(k / 2);
                CHECK(listed == buffer.empty());
                if (listed) ++next_cp;
            }
            if (k == sim.trace.arrivals.size()) break;
            int klass = sim.trace.arrivals[k];
            auto partner = sim.trace.partner_of(static_cast<int>(k));
            if (partner && *partner < static_cast<int>(k)) {
                // remove that item from the buffer replica
                int needle = sim.trace.arrivals[*partner];
                for (std::size_t b = 0; b < buffer.size(); ++b)
                    if (buffer[b] == needle) {
                        buffer.erase(buffer.begin() + b);
                        break;
                    }
            } else {
                buffer.push_back(klass);
            }
        }
        if (seed < 5) {
            // blocks between construction points are perfectly matched
            for (const MatchingTrace& block : split_into_blocks(sim)) {
                CHECK(!block.arrivals.empty());
                CHECK(block.perfectly_matched());
                for (const MatchEdge& e : block.edges)
                    CHECK(paw.adjacent(block.arrivals[e.a], block.arrivals[e.b]));
            }
        }
    }
    CHECK(runs_with_cp >= 99);
}

TEST_CASE("feeding a strong erasing word from empty creates a construction point") {
    CompatibilityGraph paw = make_paw();
    auto trace = run_word(paw, PolicySpec::fcfm(), {}, {2, 3, 4, 2, 3, 4}, {}, nullptr);
    CHECK(trace.leftover.empty());  // construction point three pairs in
}

TEST_CASE("bi-infinite windows stabilize under the doubling schedule") {
    CompatibilityGraph paw = make_paw();
    std::vector<long> depths{50, 100, 200, 400};
    int stabilized = 0;
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        try {
            BiMatchWindow window =
                biinfinite_window(paw, PolicySpec::fcfm(), kPawMu, 0, 20, depths, seed);
            ++stabilized;
            CHECK(window.items.size() == 20);
            for (const WindowItem& item : window.items)
                CHECK(paw.adjacent(item.klass, item.partner_class));
        } catch (const Error& err) {
            CHECK(err.code() == errc::not_stabilized);
        }
    }
    CHECK(stabilized >= 24);

    BiMatchWindow empty =
        biinfinite_window(paw, PolicySpec::fcfm(), kPawMu, 0, 0, depths, 4);
    CHECK(empty.items.empty());
    CHECK(empty.stabilized_from == 50);
}

TEST_CASE("even and odd start parities can give the two different matchings") {
    CompatibilityGraph paw = make_paw();
    std::vector<long> even{50, 100, 200, 400};
    std::vector<long> odd{51, 101, 201, 401};
    bool difference_found = false;
    for (std::uint64_t seed = 0; seed < 40 && !difference_found; ++seed) {
        try {
            BiMatchWindow a = biinfinite_window(paw, PolicySpec::fcfm(), kPawMu, 0, 20, even, seed);
            BiMatchWindow b = biinfinite_window(paw, PolicySpec::fcfm(), kPawMu, 0, 20, odd, seed);
            if (!(a.items == b.items)) difference_found = true;
        } catch (const Error&) {
        }
    }
    CHECK(difference_found);
}

TEST_CASE("depth schedules validate") {
    CompatibilityGraph paw = make_paw();
    CHECK_THROWS_AS(biinfinite_window(paw, PolicySpec::fcfm(), kPawMu, 0, 20, {50, 100}, 1), Error);
    CHECK_THROWS_AS(biinfinite_window(paw, PolicySpec::fcfm(), kPawMu, 0, 20, {50, 101, 200}, 1),
                    Error);
    CHECK_THROWS_AS(
        biinfinite_window(paw, PolicySpec::fcfm(), kPawMu, -60, 20, {50, 100, 200}, 1),
        Error);  // depth 50 starts inside the window
}

TEST_CASE("the reverse-time FCFM property holds on two hand-checked blocks") {
    CompatibilityGraph paw = make_paw();
    // first block: 1 3 4 2 with matches (1,2) and (3,4)
    auto block1 = run_word(paw, PolicySpec::fcfm(), {}, {1, 3, 4, 2}, {}, nullptr);
    REQUIRE(block1.perfectly_matched());
    CHECK(block1.edges == std::vector<MatchEdge>{{1, 2}, {0, 3}});
    CHECK(fcfm_reverse_check(paw, block1));

    // second block: 3 1 3 2 2 1 4 2
    auto block2 = run_word(paw, PolicySpec::fcfm(), {}, {3, 1, 3, 2, 2, 1, 4, 2}, {}, nullptr);
    REQUIRE(block2.perfectly_matched());
    CHECK(block2.edges ==
          std::vector<MatchEdge>{{0, 3}, {1, 4}, {2, 6}, {5, 7}});
    CHECK(fcfm_reverse_check(paw, block2));
}

TEST_CASE("reverse check passes on sampled FCFM blocks") {
    for (const CompatibilityGraph& g : {make_paw(), make_cycle(5)}) {
        ArrivalDistribution mu = g.num_classes() == 4 ? kPawMu : ArrivalDistribution::uniform(5);
        int checked = 0;
        for (std::uint64_t seed = 0; checked < 200 && seed < 40; ++seed) {
            auto run = simulate_with_construction_points(g, PolicySpec::fcfm(), mu, {}, 2000, seed);
            for (const MatchingTrace& block : split_into_blocks(run)) {
                CHECK(fcfm_reverse_check(g, block));
                if (++checked >= 200) break;
            }
        }
        CHECK(checked >= 200);
    }
}

TEST_CASE("reverse check guards its preconditions") {
    CompatibilityGraph paw = make_paw();
    auto partial = run_word(paw, PolicySpec::fcfm(), {}, {1, 1}, {}, nullptr);
    CHECK_THROWS_AS(fcfm_reverse_check(paw, partial), Error);

    // a perfectly matched LCFM block that is not an FCFM matching
    auto lcfm = run_word(paw, PolicySpec::lcfm(), {}, {1, 1, 2, 2}, {}, nullptr);
    REQUIRE(lcfm.perfectly_matched());
    bool rejected = false;
    try {
        fcfm_reverse_check(paw, lcfm);
    } catch (const Error& err) {
        rejected = err.code() == errc::not_fcfm;
    }
    CHECK(rejected);
}
