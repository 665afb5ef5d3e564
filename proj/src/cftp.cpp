#include "matchsim/cftp.hpp"

#include <algorithm>
#include <map>
#include <thread>

#include "matchsim/erasing.hpp"

namespace matchsim {

BackwardStream::BackwardStream(const ArrivalDistribution& mu, std::uint64_t seed)
    : mu_(&mu), seed_(seed) {}

const PairDraw& BackwardStream::classes_at(long t) {
    if (t > -1) throw Error(errc::bad_input, "backward stream indexes times <= -1");
    std::size_t index = static_cast<std::size_t>(-1 - t);
    while (drawn_.size() <= index) {
        long draw_t = -1 - static_cast<long>(drawn_.size());
        PairDraw draw;
        draw.v0 = mu_->sample_class(stream_rng(seed_, draw_t, slot_class0).next_unit());
        draw.v1 = mu_->sample_class(stream_rng(seed_, draw_t, slot_class1).next_unit());
        drawn_.push_back(draw);
    }
    return drawn_[index];
}

PreferenceList BackwardStream::preference_at(const CompatibilityGraph& g, long t, int slot,
                                             int klass) const {
    Rng rng = stream_rng(seed_, t, slot == 0 ? slot_pref0 : slot_pref1);
    return draw_preference(g, klass, rng);
}

namespace {

unsigned __int128 pack_word(const Word& w) {
    unsigned __int128 packed = 0;
    for (std::size_t k = 0; k < w.size(); ++k)
        packed |= static_cast<unsigned __int128>(w[k]) << (5 * k);
    return packed;
}

}  // namespace

CftpSampler::CftpSampler(FiniteBufferChain chain, std::vector<Word> dictionary, long depth_limit)
    : chain_(std::move(chain)), dictionary_(std::move(dictionary)), depth_limit_(depth_limit) {
    if (dictionary_.empty()) throw Error(errc::empty_dictionary, "dictionary is empty");
    std::size_t length = dictionary_.front().size();
    if (length == 0 || length % 2 != 0)
        throw Error(errc::bad_input, "dictionary words must have positive even length");
    for (const Word& w : dictionary_) {
        if (w.size() != length)
            throw Error(errc::bad_input, "dictionary words must share one length");
        if (!is_strong_erasing_word(chain_.graph, chain_.policy, chain_.capacity, w))
            throw Error(errc::uncertified_word,
                        word_to_string(w) + " is not " + std::to_string(2 * chain_.capacity) +
                            "-strong for " + chain_.policy.describe());
    }
    pairs_per_word_ = static_cast<int>(length / 2);
    std::sort(dictionary_.begin(), dictionary_.end());
    dictionary_.erase(std::unique(dictionary_.begin(), dictionary_.end()), dictionary_.end());

    use_packed_ = 5 * length <= 128;
    if (use_packed_) {
        for (const Word& w : dictionary_) packed_dictionary_.push_back(pack_word(w));
        std::sort(packed_dictionary_.begin(), packed_dictionary_.end());
    }
}

CftpResult CftpSampler::sample(std::uint64_t seed) const {
    BackwardStream stream(chain_.mu, seed);
    return sample_with_stream(stream);
}

CftpResult CftpSampler::sample_with_stream(BackwardStream& stream) const {
    const int p = pairs_per_word_;
    const std::size_t window_len = static_cast<std::size_t>(2 * p);
    const unsigned __int128 mask =
        window_len * 5 == 128 ? ~static_cast<unsigned __int128>(0)
                              : (static_cast<unsigned __int128>(1) << (5 * window_len)) - 1;

    // window holds the classes of the arrivals at even times [i, i+p),
    // chronological order, earliest in the low bits when packed
    long i = -p;
    Word window(window_len, 0);
    unsigned __int128 packed = 0;
    for (long t = -p; t <= -1; ++t) {
        const PairDraw& draw = stream.classes_at(t);
        std::size_t base = static_cast<std::size_t>(2 * (t + p));
        window[base] = draw.v0;
        window[base + 1] = draw.v1;
    }
    if (use_packed_) packed = pack_word(window);

    auto window_hits = [&]() {
        if (use_packed_)
            return std::binary_search(packed_dictionary_.begin(), packed_dictionary_.end(),
                                      packed);
        return std::binary_search(dictionary_.begin(), dictionary_.end(), window);
    };

    while (!window_hits()) {
        --i;
        if (-i > depth_limit_)
            throw Error(errc::depth_limit,
                        "no dictionary word within " + std::to_string(depth_limit_) + " pairs");
        const PairDraw& draw = stream.classes_at(i);
        if (use_packed_) {
            packed = (packed << 10) & mask;
            packed |= static_cast<unsigned __int128>(draw.v0) |
                      (static_cast<unsigned __int128>(draw.v1) << 5);
        } else {
            window.pop_back();
            window.pop_back();
            window.insert(window.begin(), {draw.v0, draw.v1});
        }
    }

    CftpResult result;
    result.scan_depth = -i;
    result.reset_time = i + p;

    const bool needs_prefs = chain_.policy.sigma_dependent();
    Word state;
    state.reserve(2 * chain_.capacity + 1);
    for (long t = result.reset_time; t < 0; ++t) {
        const PairDraw& draw = stream.classes_at(t);
        ArrivalEvent e0{draw.v0, std::nullopt};
        ArrivalEvent e1{draw.v1, std::nullopt};
        if (needs_prefs) {
            e0.pref = stream.preference_at(chain_.graph, t, 0, draw.v0);
            e1.pref = stream.preference_at(chain_.graph, t, 1, draw.v1);
        }
        pair_transition_inplace(chain_, state, e0, e1, nullptr);
    }
    result.sample = std::move(state);
    return result;
}

MonteCarloResult monte_carlo(const FiniteBufferChain& chain, const std::vector<Word>& dictionary,
                             std::uint64_t n_samples, std::uint64_t master_seed, int workers) {
    if (n_samples < 1) throw Error(errc::bad_input, "need at least one sample");
    CftpSampler sampler(chain, dictionary);

    MonteCarloResult result;
    result.states = enumerate_w2(chain.graph, chain.capacity);
    result.samples = n_samples;
    std::map<Word, std::size_t> index;
    for (std::size_t k = 0; k < result.states.size(); ++k) index[result.states[k]] = k;

    int thread_count = std::max(1, workers);
    std::vector<std::vector<std::uint64_t>> counts(
        thread_count, std::vector<std::uint64_t>(result.states.size(), 0));
    std::vector<std::uint64_t> depth_sums(thread_count, 0);
    std::vector<long> depth_maxes(thread_count, 0);

    auto run_range = [&](int worker, std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t rep = begin; rep < end; ++rep) {
            CftpResult draw = sampler.sample(replica_seed(master_seed, rep));
            counts[worker][index.at(draw.sample)] += 1;
            depth_sums[worker] += static_cast<std::uint64_t>(draw.scan_depth);
            depth_maxes[worker] = std::max(depth_maxes[worker], draw.scan_depth);
        }
    };

    if (thread_count == 1) {
        run_range(0, 0, n_samples);
    } else {
        std::vector<std::thread> pool;
        std::uint64_t chunk = (n_samples + thread_count - 1) / thread_count;
        for (int w = 0; w < thread_count; ++w) {
            std::uint64_t begin = chunk * static_cast<std::uint64_t>(w);
            std::uint64_t end = std::min(n_samples, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_range, w, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    result.counts.assign(result.states.size(), 0);
    std::uint64_t depth_sum = 0;
    for (int w = 0; w < thread_count; ++w) {
        for (std::size_t k = 0; k < result.counts.size(); ++k) result.counts[k] += counts[w][k];
        depth_sum += depth_sums[w];
        result.max_scan_depth = std::max(result.max_scan_depth, depth_maxes[w]);
    }
    result.histogram.assign(result.counts.size(), 0.0);
    for (std::size_t k = 0; k < result.counts.size(); ++k)
        result.histogram[k] =
            static_cast<double>(result.counts[k]) / static_cast<double>(n_samples);
    result.mean_scan_depth = static_cast<double>(depth_sum) / static_cast<double>(n_samples);
    return result;
}

bool coalescence_check(const FiniteBufferChain& chain, const std::vector<Word>& dictionary,
                       int n_trials, std::uint64_t seed) {
    if (dictionary.empty()) throw Error(errc::empty_dictionary, "dictionary is empty");
    if (chain.capacity == 0) return true;  // single state
    std::vector<Word> states = enumerate_w2(chain.graph, chain.capacity);
    const bool needs_prefs = chain.policy.sigma_dependent();

    for (int trial = 0; trial < n_trials; ++trial) {
        Rng rng(replica_seed(seed, static_cast<std::uint64_t>(trial)));
        const Word& word = dictionary[rng.next_below(static_cast<std::uint32_t>(dictionary.size()))];
        int prefix_pairs = static_cast<int>(rng.next_below(21));
        int suffix_pairs = static_cast<int>(rng.next_below(11));

        // one shared event sequence for every initial state
        std::vector<std::pair<ArrivalEvent, ArrivalEvent>> segment;
        auto push_pair = [&](int v0, int v1) {
            ArrivalEvent e0{v0, std::nullopt}, e1{v1, std::nullopt};
            if (needs_prefs) {
                e0.pref = draw_preference(chain.graph, v0, rng);
                e1.pref = draw_preference(chain.graph, v1, rng);
            }
            segment.emplace_back(std::move(e0), std::move(e1));
        };
        for (int k = 0; k < prefix_pairs; ++k)
            push_pair(chain.mu.sample_class(rng.next_unit()), chain.mu.sample_class(rng.next_unit()));
        std::size_t word_end = segment.size() + word.size() / 2;
        for (std::size_t k = 0; k < word.size(); k += 2) push_pair(word[k], word[k + 1]);
        for (int k = 0; k < suffix_pairs; ++k)
            push_pair(chain.mu.sample_class(rng.next_unit()), chain.mu.sample_class(rng.next_unit()));

        std::optional<Word> reference;
        for (const Word& start : states) {
            Word state = start;
            for (std::size_t k = 0; k < segment.size(); ++k) {
                pair_transition_inplace(chain, state, segment[k].first, segment[k].second, nullptr);
                if (k + 1 == word_end && !state.empty())
                    throw Error(errc::coalescence_failed,
                                "trial " + std::to_string(trial) + ": witness state " +
                                    word_to_string(start) + " ends the word at " +
                                    word_to_string(state) + " instead of the empty buffer");
            }
            if (!reference) {
                reference = state;
            } else if (state != *reference) {
                throw Error(errc::coalescence_failed,
                            "trial " + std::to_string(trial) + ": witness state " +
                                word_to_string(start) + " diverges after the word");
            }
        }
    }
    return true;
}

}  // namespace matchsim
