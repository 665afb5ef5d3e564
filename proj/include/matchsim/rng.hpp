#pragma once

#include <cstdint>
#include <vector>

namespace matchsim {

// splitmix64 step (Steele, Lea, Flood 2014). Used both as a plain generator
// and as a mixing function for key derivation.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) {
    std::uint64_t s = x;
    return splitmix64_next(s);
}

inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ 0x2545f4914f6cdd1dULL ^ mix64(b));
}

// Small deterministic generator. Every stream in the project is an Rng seeded
// by a derived key, so any draw can be regenerated from (seed, time, slot)
// without storing state.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // uniform in [0,1) with 53-bit resolution
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [0, bound)
    std::uint32_t next_below(std::uint32_t bound) {
        return static_cast<std::uint32_t>(next_u64() % bound);
    }

    // in-place Fisher-Yates
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = next_below(static_cast<std::uint32_t>(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t state_;
};

// Stream slots used with stream_rng; keeps (seed, t, slot) derivations from
// colliding across draw kinds.
enum stream_slot : std::uint32_t {
    slot_class0 = 0,   // class of the first arrival of the pair at even time t
    slot_class1 = 1,   // class of the second arrival
    slot_pref0 = 2,    // preference draw of the first arrival
    slot_pref1 = 3,    // preference draw of the second arrival
    slot_single = 4,   // class at single-arrival time t (original time scale)
    slot_single_pref = 5,
};

// Generator for the draw at time index t, slot s, of the stream with the
// given seed. Identical inputs give bit-identical draws.
inline Rng stream_rng(std::uint64_t seed, std::int64_t t, std::uint32_t slot) {
    std::uint64_t key = mix_key(seed, static_cast<std::uint64_t>(t));
    return Rng(mix_key(key, slot));
}

// Seed for an independent replica stream derived from a master seed.
inline std::uint64_t replica_seed(std::uint64_t master_seed, std::uint64_t replica) {
    return mix_key(master_seed ^ 0x9e3779b97f4a7c15ULL, replica);
}

}  // namespace matchsim
