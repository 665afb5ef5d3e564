#pragma once

#include <cstdint>
#include <vector>

#include "matchsim/finite_buffer.hpp"

namespace matchsim {

struct PairDraw {
    int v0 = 0;
    int v1 = 0;
};

// The arrival stream at even times t <= -1, drawn on demand. Every draw is
// derived from (seed, t, slot), so an entry never changes once seen and
// replays are bit-exact without storing generator state.
class BackwardStream {
public:
    BackwardStream(const ArrivalDistribution& mu, std::uint64_t seed);

    const PairDraw& classes_at(long t);
    PreferenceList preference_at(const CompatibilityGraph& g, long t, int slot, int klass) const;

    std::uint64_t seed() const { return seed_; }
    // number of cached pair draws (contiguous from t = -1 backwards)
    std::size_t drawn_count() const { return drawn_.size(); }

private:
    const ArrivalDistribution* mu_;
    std::uint64_t seed_;
    std::vector<PairDraw> drawn_;  // index k holds the draw at t = -1-k
};

struct CftpResult {
    Word sample;
    long scan_depth = 0;  // even-time pairs inspected into the past
    long reset_time = 0;  // even time where the chain was set to empty
};

// Coupling-from-the-past sampler: scans backward for a dictionary word in the
// arrival stream, resets to the empty buffer right after it, and replays
// forward to time zero with the recorded randomness.
class CftpSampler {
public:
    CftpSampler(FiniteBufferChain chain, std::vector<Word> dictionary,
                long depth_limit = 10'000'000);

    CftpResult sample(std::uint64_t seed) const;
    // same sample computed from an existing stream (exposes replay fidelity)
    CftpResult sample_with_stream(BackwardStream& stream) const;

    const FiniteBufferChain& chain() const { return chain_; }
    int pairs_per_word() const { return pairs_per_word_; }

private:
    FiniteBufferChain chain_;
    std::vector<Word> dictionary_;
    int pairs_per_word_ = 0;
    long depth_limit_ = 0;
    bool use_packed_ = false;
    std::vector<unsigned __int128> packed_dictionary_;
};

struct MonteCarloResult {
    std::vector<Word> states;       // canonical W2(C)
    std::vector<double> histogram;  // normalized
    std::vector<std::uint64_t> counts;
    double mean_scan_depth = 0.0;
    long max_scan_depth = 0;
    std::uint64_t samples = 0;
};

// n_samples independent CFTP draws with replica seeds derived from the master
// seed; identical output for any worker count.
MonteCarloResult monte_carlo(const FiniteBufferChain& chain, const std::vector<Word>& dictionary,
                             std::uint64_t n_samples, std::uint64_t master_seed, int workers = 1);

// Runs all W2(C) states through random stream segments that end in a
// dictionary word: every state must reach the empty buffer at the word's end
// and stay identical afterwards. Throws CoalescenceFailed with a witness
// state otherwise.
bool coalescence_check(const FiniteBufferChain& chain, const std::vector<Word>& dictionary,
                       int n_trials, std::uint64_t seed);

}  // namespace matchsim
