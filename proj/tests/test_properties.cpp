#include <doctest.h>

#include "matchsim/properties.hpp"

using namespace matchsim;

TEST_CASE("class-detail enumeration order is size-major") {
    CompatibilityGraph paw = make_paw();
    auto states = enumerate_class_details(paw, 1);
    REQUIRE(states.size() == 7);  // empty, four singletons, {1,3}, {1,4}
    CHECK(states[0] == Counts{0, 0, 0, 0});
    CHECK(states[1] == Counts{1, 0, 0, 0});
    CHECK(states[5] == Counts{1, 0, 1, 0});
    CHECK(states[6] == Counts{1, 0, 0, 1});
    for (const Counts& x : states) CHECK(is_admissible_counts(paw, x));
}

TEST_CASE("Match the Shortest is not non-expansive: the canonical witness") {
    CompatibilityGraph paw = make_paw();
    auto report = check_nonexpansive(paw, PolicySpec::ms(), 2);
    REQUIRE(report.violated());
    REQUIRE(report.nonexpansive_witness);
    const auto& w = *report.nonexpansive_witness;
    CHECK(w.x == Counts{2, 0, 1, 0});
    CHECK(w.x_prime == Counts{1, 0, 2, 0});
    CHECK(w.klass == 2);
    CHECK(w.norm_images == 4);
    CHECK(w.norm_inputs == 2);
    CHECK(w.for_all_draws);
    CHECK(replay_nonexpansive_witness(paw, PolicySpec::ms(), w));
}

TEST_CASE("ML, uniform and priority policies are non-expansive on the paw graph") {
    CompatibilityGraph paw = make_paw();
    CHECK(!check_nonexpansive(paw, PolicySpec::ml(), 2).violated());
    CHECK(!check_nonexpansive(paw, PolicySpec::uniform(), 2).violated());
    CHECK(!check_nonexpansive(paw, PolicySpec::priority_ascending(paw), 2).violated());
    CHECK_THROWS_AS(check_nonexpansive(paw, PolicySpec::fcfm(), 2), Error);
}

TEST_CASE("Match the Shortest is not sub-additive: the canonical witness") {
    CompatibilityGraph paw = make_paw();
    auto report = check_subadditive(paw, PolicySpec::ms(), 8);
    REQUIRE(report.violated());
    REQUIRE(report.subadditive_witness);
    const auto& w = *report.subadditive_witness;
    CHECK(w.z1 == Word{1, 1});
    CHECK(w.z2 == Word{1, 3, 3, 2, 2, 4});
    CHECK(w.leftover_concat == 4);
    CHECK(w.leftover_z1 + w.leftover_z2 == 2);
    CHECK(w.for_all_draws);
    CHECK(replay_subadditive_witness(paw, PolicySpec::ms(), w));
}

TEST_CASE("sub-additivity holds for the non-expansive and arrival-order policies on small domains") {
    CompatibilityGraph paw = make_paw();
    CHECK(!check_subadditive(paw, PolicySpec::fcfm(), 8).violated());
    CHECK(!check_subadditive(paw, PolicySpec::lcfm(), 8).violated());
    CHECK(!check_subadditive(paw, PolicySpec::ml(), 6).violated());
    CHECK(!check_subadditive(paw, PolicySpec::uniform(), 6).violated());
    CHECK(!check_subadditive(paw, PolicySpec::priority_ascending(paw), 6).violated());
}

TEST_CASE("an empty first word can never violate sub-additivity") {
    CompatibilityGraph paw = make_paw();
    // with z1 empty both coupled runs start identical and stay identical, so
    // |W(z2)| <= |W(empty)| + |W(z2)| holds with equality on every draw
    Rng rng(13);
    for (const PolicySpec& policy : {PolicySpec::ms(), PolicySpec::ml(), PolicySpec::fcfm()}) {
        for (int trial = 0; trial < 200; ++trial) {
            Word z2;
            int len = 1 + static_cast<int>(rng.next_below(8));
            for (int k = 0; k < len; ++k) z2.push_back(1 + rng.next_below(4));
            Word alone, concat;
            Rng draw(replica_seed(99, trial));
            for (int v : z2) {
                PreferenceList pref = draw_preference(paw, v, draw);
                ArrivalEvent e{v, pref};
                alone = apply_arrival(paw, policy, alone, e, nullptr).queue;
                concat = apply_arrival(paw, policy, concat, e, nullptr).queue;
            }
            CHECK(alone == concat);
        }
    }
}

TEST_CASE("non-expansive reports are worker-count independent") {
    CompatibilityGraph paw = make_paw();
    auto one = check_nonexpansive(paw, PolicySpec::ms(), 2, 1);
    auto four = check_nonexpansive(paw, PolicySpec::ms(), 2, 4);
    REQUIRE(one.nonexpansive_witness);
    REQUIRE(four.nonexpansive_witness);
    CHECK(one.nonexpansive_witness->x == four.nonexpansive_witness->x);
    CHECK(one.nonexpansive_witness->x_prime == four.nonexpansive_witness->x_prime);
    CHECK(one.nonexpansive_witness->klass == four.nonexpansive_witness->klass);

    auto clean_one = check_nonexpansive(paw, PolicySpec::ml(), 2, 1);
    auto clean_four = check_nonexpansive(paw, PolicySpec::ml(), 2, 4);
    CHECK(clean_one.violated() == clean_four.violated());
}

TEST_CASE("sampled mode finds the MS violation and clears FCFM") {
    CompatibilityGraph paw = make_paw();
    auto ms = check_subadditive(paw, PolicySpec::ms(), 8, SubAdditiveMode::sampled, 7, 20000);
    CHECK(ms.violated());
    REQUIRE(ms.subadditive_witness);
    CHECK(replay_subadditive_witness(paw, PolicySpec::ms(), *ms.subadditive_witness));

    auto fcfm = check_subadditive(paw, PolicySpec::fcfm(), 8, SubAdditiveMode::sampled, 7, 5000);
    CHECK(!fcfm.violated());
}

TEST_CASE("reports serialize and replay through JSON") {
    CompatibilityGraph paw = make_paw();
    auto report = check_nonexpansive(paw, PolicySpec::ms(), 2);
    auto restored = report_from_json(report_to_json(report));
    REQUIRE(restored.nonexpansive_witness);
    CHECK(replay_nonexpansive_witness(paw, PolicySpec::ms(), *restored.nonexpansive_witness));

    auto sub = check_subadditive(paw, PolicySpec::ms(), 8);
    auto sub_restored = report_from_json(report_to_json(sub));
    REQUIRE(sub_restored.subadditive_witness);
    CHECK(replay_subadditive_witness(paw, PolicySpec::ms(), *sub_restored.subadditive_witness));
}
