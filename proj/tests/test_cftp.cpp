#include <doctest.h>

#include <cmath>

#include "matchsim/cftp.hpp"
#include "matchsim/erasing.hpp"

using namespace matchsim;

namespace {

FiniteBufferChain paw_fcfm_chain() {
    return FiniteBufferChain(make_paw(), PolicySpec::fcfm(), 1,
                             ArrivalDistribution({0.2, 0.3, 0.25, 0.25}));
}

const Word kPawWord{2, 3, 4, 2, 3, 4};

}  // namespace

TEST_CASE("the sampler rejects bad dictionaries") {
    auto chain = paw_fcfm_chain();
    CHECK_THROWS_AS(CftpSampler(chain, {}), Error);
    CHECK_THROWS_AS(CftpSampler(chain, {Word{2, 2}}), Error);           // not strong
    CHECK_THROWS_AS(CftpSampler(chain, {kPawWord, Word{2, 3}}), Error); // mixed lengths
}

TEST_CASE("fixed seeds reproduce samples bit-exactly") {
    auto chain = paw_fcfm_chain();
    CftpSampler sampler(chain, {kPawWord});
    for (std::uint64_t seed : {1ULL, 7ULL, 12345ULL}) {
        CftpResult a = sampler.sample(seed);
        CftpResult b = sampler.sample(seed);
        CHECK(a.sample == b.sample);
        CHECK(a.scan_depth == b.scan_depth);
        CHECK(a.reset_time == b.reset_time);
        CHECK(a.scan_depth >= sampler.pairs_per_word());
        CHECK(is_admissible(chain.graph, a.sample));
        CHECK(a.sample.size() <= 2);
    }
}

TEST_CASE("a stream whose last window spells the word resets at the zero boundary") {
    auto chain = paw_fcfm_chain();
    CftpSampler sampler(chain, {kPawWord});
    // hunt for a seed whose first backward window (times -3..-1) is 234234
    bool found = false;
    for (std::uint64_t seed = 0; seed < 200000 && !found; ++seed) {
        BackwardStream probe(chain.mu, seed);
        Word window;
        for (long t = -3; t <= -1; ++t) {
            const PairDraw& draw = probe.classes_at(t);
            window.push_back(draw.v0);
            window.push_back(draw.v1);
        }
        if (window != kPawWord) continue;
        found = true;
        CftpResult result = sampler.sample(seed);
        CHECK(result.reset_time == 0);
        CHECK(result.scan_depth == 3);
        CHECK(result.sample.empty());
    }
    CHECK(found);
}

TEST_CASE("replay consumes exactly the recorded stream") {
    auto chain = paw_fcfm_chain();
    CftpSampler sampler(chain, {kPawWord});
    BackwardStream stream(chain.mu, 99);
    CftpResult first = sampler.sample_with_stream(stream);
    std::size_t drawn_after_first = stream.drawn_count();
    CftpResult second = sampler.sample_with_stream(stream);
    CHECK(first.sample == second.sample);
    CHECK(first.scan_depth == second.scan_depth);
    CHECK(first.reset_time == second.reset_time);
    CHECK(stream.drawn_count() == drawn_after_first);
}

TEST_CASE("the scan stops at the most recent qualifying window") {
    auto chain = paw_fcfm_chain();
    CftpSampler sampler(chain, {kPawWord});
    for (std::uint64_t seed : {4ULL, 8ULL, 15ULL, 16ULL, 23ULL, 42ULL}) {
        CftpResult result = sampler.sample(seed);
        BackwardStream stream(chain.mu, seed);
        // windows at start times -scan_depth < i' < -3 must all miss, and the
        // window at -scan_depth must hit
        for (long start = -result.scan_depth; start <= -3; ++start) {
            Word window;
            for (long t = start; t < start + 3; ++t) {
                const PairDraw& draw = stream.classes_at(t);
                window.push_back(draw.v0);
                window.push_back(draw.v1);
            }
            if (start == -result.scan_depth)
                CHECK(window == kPawWord);
            else
                CHECK(window != kPawWord);
        }
    }
}

TEST_CASE("monte carlo histograms are worker-count independent") {
    auto chain = paw_fcfm_chain();
    auto one = monte_carlo(chain, {kPawWord}, 2000, 77, 1);
    auto eight = monte_carlo(chain, {kPawWord}, 2000, 77, 8);
    CHECK(one.counts == eight.counts);
    CHECK(one.mean_scan_depth == eight.mean_scan_depth);
    double total = 0.0;
    for (double p : one.histogram) total += p;
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("moderate sample sizes already land near the exact distribution") {
    auto chain = paw_fcfm_chain();
    auto pi = solve_stationary(build_transition_matrix(chain));
    auto mc = monte_carlo(chain, {kPawWord}, 20000, 3, 8);
    REQUIRE(mc.states == pi.states);
    CHECK(total_variation(mc.histogram, pi.probs) < 0.03);
}

TEST_CASE("coalescence holds for certified words and fails for 22") {
    auto chain = paw_fcfm_chain();
    CHECK(coalescence_check(chain, {kPawWord}, 100, 5));

    bool failed = false;
    std::string message;
    try {
        coalescence_check(chain, {Word{2, 2}}, 100, 5);
    } catch (const Error& err) {
        failed = err.code() == errc::coalescence_failed;
        message = err.what();
    }
    CHECK(failed);
    CHECK(message.find("witness state") != std::string::npos);
}

TEST_CASE("larger capacity uses composed dictionary words") {
    FiniteBufferChain chain(make_paw(), PolicySpec::fcfm(), 2,
                            ArrivalDistribution({0.2, 0.3, 0.25, 0.25}));
    Word doubled;
    for (int rep = 0; rep < 2; ++rep)
        doubled.insert(doubled.end(), kPawWord.begin(), kPawWord.end());
    CftpSampler sampler(chain, {doubled});
    CftpResult result = sampler.sample(11);
    CHECK(is_admissible(chain.graph, result.sample));
    CHECK(result.sample.size() <= 4);
    CHECK(coalescence_check(chain, {doubled}, 25, 8));
}
