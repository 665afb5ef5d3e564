#pragma once

#include <cstdint>
#include <vector>

#include "matchsim/policy.hpp"

namespace matchsim {

// Even-time chain with a buffer of size 2C: arrivals come in pairs, and when
// the buffer is full an unmatched first item is blocked (held as the youngest
// in line) until the second arrival resolves the pair.
struct FiniteBufferChain {
    CompatibilityGraph graph;
    PolicySpec policy;
    int capacity = 1;  // C; the buffer holds at most 2C items
    ArrivalDistribution mu;

    FiniteBufferChain(CompatibilityGraph g, PolicySpec p, int c, ArrivalDistribution m);
};

// One even-time step. Events carry explicit preference lists or draw them
// from rng, exactly as in apply_arrival.
Word pair_transition(const FiniteBufferChain& chain, const Word& u, const ArrivalEvent& first,
                     const ArrivalEvent& second, Rng* rng);

// allocation-free variant for hot loops
void pair_transition_inplace(const FiniteBufferChain& chain, Word& u, const ArrivalEvent& first,
                             const ArrivalEvent& second, Rng* rng);

// all possible next states for the class pair (v0, v1), with exact
// probabilities under nu_phi (tie-breaks are uniform over candidates)
std::vector<std::pair<Word, double>> pair_transition_outcomes(const FiniteBufferChain& chain,
                                                              const Word& u, int v0, int v1);

struct TransitionMatrix {
    std::vector<Word> states;   // canonical W2(C) order
    std::vector<double> probs;  // row-major, states.size() x states.size()

    std::size_t size() const { return states.size(); }
    double at(std::size_t row, std::size_t col) const { return probs[row * states.size() + col]; }
    int index_of(const Word& state) const;
};

TransitionMatrix build_transition_matrix(const FiniteBufferChain& chain,
                                         std::size_t max_states = 20000);

struct StationaryDistribution {
    std::vector<Word> states;
    std::vector<double> probs;

    double prob_of(const Word& state) const;
};

// Unique left fixed point of an irreducible row-stochastic matrix; dense
// solve up to 2000 states, power iteration beyond. Residual under 1e-9.
StationaryDistribution solve_stationary(const TransitionMatrix& matrix);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);

struct ReturnTimeEstimate {
    double mean = 0.0;          // over uncensored replications
    double ci_halfwidth = 0.0;  // 95% normal interval
    double std_error = 0.0;
    int censored_count = 0;
    int replications = 0;
};

// Monte Carlo estimate of the first visit time to the empty buffer on the
// even time scale, finite- or infinite-buffer dynamics.
ReturnTimeEstimate estimate_return_time(const FiniteBufferChain& chain, bool finite_buffer,
                                        const Word& start, int n_reps, long horizon,
                                        std::uint64_t seed);

std::string distribution_to_text(const StationaryDistribution& dist);

}  // namespace matchsim
