#include <doctest.h>

#include "matchsim/policy.hpp"

using namespace matchsim;

namespace {

Word apply_simple(const CompatibilityGraph& g, const PolicySpec& policy, const Word& q, int v,
                  Rng* rng = nullptr) {
    return apply_arrival(g, policy, q, ArrivalEvent{v, std::nullopt}, rng).queue;
}

std::vector<PolicySpec> all_policies(const CompatibilityGraph& g) {
    return {PolicySpec::fcfm(), PolicySpec::lcfm(),    PolicySpec::ml(),
            PolicySpec::ms(),   PolicySpec::uniform(), PolicySpec::priority_ascending(g)};
}

}  // namespace

TEST_CASE("FCFM matches the oldest compatible item, LCFM the youngest") {
    CompatibilityGraph paw = make_paw();
    CHECK(apply_simple(paw, PolicySpec::fcfm(), {1, 3, 3}, 2) == Word{3, 3});
    CHECK(apply_simple(paw, PolicySpec::fcfm(), {3, 1, 1}, 2) == Word{1, 1});
    CHECK(apply_simple(paw, PolicySpec::lcfm(), {3, 3, 1}, 2) == Word{3, 3});
    CHECK(apply_simple(paw, PolicySpec::lcfm(), {1, 1, 3}, 2) == Word{1, 1});

    // the queue-detail counterexample to FCFM non-expansiveness:
    // distance jumps from 2 to 4 under a common arrival
    Counts a = commutative_image(paw, apply_simple(paw, PolicySpec::fcfm(), {1, 3, 3}, 2));
    Counts b = commutative_image(paw, apply_simple(paw, PolicySpec::fcfm(), {3, 1, 1}, 2));
    int norm = 0;
    for (std::size_t k = 0; k < a.size(); ++k) norm += std::abs(a[k] - b[k]);
    CHECK(norm == 4);

    CHECK(apply_simple(paw, PolicySpec::fcfm(), {}, 1) == Word{1});
    CHECK_THROWS_AS(apply_simple(paw, PolicySpec::fcfm(), {}, 5), Error);
    CHECK_THROWS_AS(apply_simple(paw, PolicySpec::fcfm(), {3, 4}, 1), Error);  // inadmissible
}

TEST_CASE("class-detail actions of MS and ML") {
    CompatibilityGraph paw = make_paw();
    ArrivalEvent two{2, std::nullopt};
    CHECK(apply_class(paw, PolicySpec::ms(), {2, 0, 1, 0}, two, nullptr) == Counts{2, 0, 0, 0});
    CHECK(apply_class(paw, PolicySpec::ms(), {1, 0, 2, 0}, two, nullptr) == Counts{0, 0, 2, 0});
    CHECK(apply_class(paw, PolicySpec::ml(), {2, 0, 1, 0}, two, nullptr) == Counts{1, 0, 1, 0});

    // storing when no compatible class is present
    CHECK(apply_class(paw, PolicySpec::ml(), {0, 0, 0, 0}, ArrivalEvent{1, std::nullopt},
                      nullptr) == Counts{1, 0, 0, 0});

    CHECK_THROWS_AS(apply_class(paw, PolicySpec::fcfm(), {0, 0, 0, 0}, two, nullptr), Error);
    CHECK_THROWS_AS(apply_class(paw, PolicySpec::lcfm(), {0, 0, 0, 0}, two, nullptr), Error);
}

TEST_CASE("run_word reproduces the Match-the-Shortest concatenation sizes") {
    CompatibilityGraph paw = make_paw();
    PolicySpec ms = PolicySpec::ms();
    Rng rng(5);
    auto concat = run_word(paw, ms, {}, {1, 1, 1, 3, 3, 2, 2, 4}, {}, &rng);
    CHECK(concat.leftover.size() == 4);
    auto left = run_word(paw, ms, {}, {1, 1}, {}, &rng);
    CHECK(left.leftover.size() == 2);
    auto right = run_word(paw, ms, {}, {1, 3, 3, 2, 2, 4}, {}, &rng);
    CHECK(right.leftover.empty());

    auto empty = run_word(paw, ms, {1, 3}, {}, {}, nullptr);
    CHECK(empty.leftover == Word{1, 3});
    CHECK(empty.edges.empty());
}

TEST_CASE("matching traces are consistent") {
    CompatibilityGraph paw = make_paw();
    auto trace = run_word(paw, PolicySpec::fcfm(), {}, {1, 3, 4, 2}, {}, nullptr);
    // 4 matches the 3, 2 matches the 1
    CHECK(trace.edges == std::vector<MatchEdge>{{1, 2}, {0, 3}});
    CHECK(trace.leftover.empty());
    CHECK(trace.partner_of(0) == 3);
    CHECK(trace.partner_of(2) == 1);
}

TEST_CASE("enumerate_preferences lists all permutations of the neighbor set") {
    CompatibilityGraph paw = make_paw();
    CHECK(enumerate_preferences(paw, 1).size() == 1);
    CHECK(enumerate_preferences(paw, 1).front().order == std::vector<int>{2});
    CHECK(enumerate_preferences(paw, 2).size() == 6);
    CHECK(enumerate_preferences(paw, 3).size() == 2);
    CHECK(enumerate_preferences(paw, 2).front().order == std::vector<int>{1, 3, 4});
}

TEST_CASE("closure, consistency and greediness over W2(3)") {
    for (const CompatibilityGraph& g : {make_paw(), make_cycle(5)}) {
        auto states = enumerate_w2(g, 3);
        for (const PolicySpec& policy : all_policies(g)) {
            for (const Word& q : states) {
                for (int v = 1; v <= g.num_classes(); ++v) {
                    for (const PreferenceList& pref : enumerate_preferences(g, v)) {
                        ArrivalEvent event{v, pref};
                        ArrivalOutcome out = apply_arrival(g, policy, q, event, nullptr);
                        // closure: queue details stay admissible, which is
                        // exactly the greedy no-compatible-pair property
                        CHECK(is_admissible(g, out.queue));

                        if (policy.class_admissible()) {
                            Counts image =
                                apply_class(g, policy, commutative_image(g, q), event, nullptr);
                            CHECK(commutative_image(g, out.queue) == image);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("candidate sets cover exactly the realizable choices") {
    CompatibilityGraph paw = make_paw();
    // ML with a tie between classes 1 and 3
    auto cands = candidate_classes(paw, PolicySpec::ml(), {2, 0, 2, 0}, 2);
    CHECK(cands == std::vector<int>{1, 3});
    // MS picks the unique shortest
    CHECK(candidate_classes(paw, PolicySpec::ms(), {2, 0, 1, 0}, 2) == std::vector<int>{3});
    // priority follows its fixed list
    CHECK(candidate_classes(paw, PolicySpec::priority_ascending(paw), {2, 0, 2, 0}, 2) ==
          std::vector<int>{1});
    // uniform can take any nonempty compatible class
    CHECK(candidate_classes(paw, PolicySpec::uniform(), {2, 0, 2, 0}, 2) ==
          std::vector<int>{1, 3});

    // positions mirror the class choices, oldest first within a class
    auto pos = candidate_positions(paw, PolicySpec::uniform(), {3, 1, 3, 1}, 2);
    CHECK(pos == std::vector<int>{1, 0});  // oldest 1 at index 1, oldest 3 at index 0

    // a shared draw cannot pick differently when both options are open to both
    auto pairs = realizable_choice_pairs({1, 3}, {1, 3});
    CHECK(pairs == std::vector<std::pair<int, int>>{{1, 1}, {3, 3}});
    auto mixed = realizable_choice_pairs({1, 3}, {3});
    CHECK(mixed == std::vector<std::pair<int, int>>{{1, 3}, {3, 3}});
}

TEST_CASE("identical seeds give identical traces") {
    CompatibilityGraph paw = make_paw();
    Word z;
    Rng letters(99);
    for (int k = 0; k < 200; ++k) z.push_back(1 + letters.next_below(4));
    for (const PolicySpec& policy : all_policies(paw)) {
        Rng r1(1234), r2(1234);
        auto t1 = run_word(paw, policy, {}, z, {}, &r1);
        auto t2 = run_word(paw, policy, {}, z, {}, &r2);
        CHECK(t1.edges == t2.edges);
        CHECK(t1.leftover == t2.leftover);
    }
}

TEST_CASE("trace dump format is stable") {
    CompatibilityGraph paw = make_paw();
    auto trace = run_word(paw, PolicySpec::fcfm(), {}, {1, 3, 4, 2, 1}, {}, nullptr);
    CHECK(trace_to_text(trace) ==
          "0 1 3\n"
          "1 3 2\n"
          "2 4 1\n"
          "3 2 0\n"
          "4 1 -\n"
          "leftover 1\n");
}

TEST_CASE("priority specs validate against the graph") {
    CompatibilityGraph paw = make_paw();
    CHECK_NOTHROW(PolicySpec::priority_ascending(paw).validate(paw));
    PolicySpec bad = PolicySpec::priority({{}, {2}, {1, 3}, {2, 4}, {2, 3}});
    CHECK_THROWS_AS(bad.validate(paw), Error);  // class 2 list misses 4
}
