#include "matchsim/finite_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

namespace matchsim {

FiniteBufferChain::FiniteBufferChain(CompatibilityGraph g, PolicySpec p, int c,
                                     ArrivalDistribution m)
    : graph(std::move(g)), policy(std::move(p)), capacity(c), mu(std::move(m)) {
    if (capacity < 1) throw Error(errc::bad_input, "capacity must be >= 1");
    if (mu.size() != graph.num_classes())
        throw Error(errc::dimension_mismatch, "mu length does not match class count");
    policy.validate(graph);
}

namespace {

Word erase_at(const Word& q, int pos) {
    Word out = q;
    out.erase(out.begin() + pos);
    return out;
}

}  // namespace

void pair_transition_inplace(const FiniteBufferChain& chain, Word& u, const ArrivalEvent& first,
                             const ArrivalEvent& second, Rng* rng) {
    const auto& g = chain.graph;
    int cap = 2 * chain.capacity;
    if (static_cast<int>(u.size()) > cap)
        throw Error(errc::overflow, "state exceeds buffer capacity");

    const std::vector<int>* pref0 = first.pref ? &first.pref->order : nullptr;
    const std::vector<int>* pref1 = second.pref ? &second.pref->order : nullptr;

    auto advance = [&](int klass, const std::vector<int>* pref) {
        std::optional<int> pos = select_match(g, chain.policy, u, klass, pref, rng);
        if (pos)
            u.erase(u.begin() + *pos);
        else
            u.push_back(klass);
    };

    if (static_cast<int>(u.size()) < cap) {
        // room for both arrivals; plain double application
        advance(first.klass, pref0);
        advance(second.klass, pref1);
        return;
    }

    std::optional<int> pos0 = select_match(g, chain.policy, u, first.klass, pref0, rng);
    if (pos0) {
        // (1a)/(1b): the freed spot takes the second item if it stays
        u.erase(u.begin() + *pos0);
        advance(second.klass, pref1);
        return;
    }

    // full buffer, first item blocked as the youngest in line
    u.push_back(first.klass);
    std::optional<int> pos1 = select_match(g, chain.policy, u, second.klass, pref1, rng);
    if (!pos1 || *pos1 + 1 == static_cast<int>(u.size())) {
        u.pop_back();  // (2c) both discarded / (2a) the pair leaves together
        return;
    }
    u.erase(u.begin() + *pos1);  // (2b) blocked item keeps the youngest spot
}

Word pair_transition(const FiniteBufferChain& chain, const Word& u, const ArrivalEvent& first,
                     const ArrivalEvent& second, Rng* rng) {
    Word next = u;
    pair_transition_inplace(chain, next, first, second, rng);
    return next;
}

std::vector<std::pair<Word, double>> pair_transition_outcomes(const FiniteBufferChain& chain,
                                                              const Word& u, int v0, int v1) {
    const auto& g = chain.graph;
    const auto& policy = chain.policy;
    int cap = 2 * chain.capacity;
    if (static_cast<int>(u.size()) > cap)
        throw Error(errc::overflow, "state exceeds buffer capacity");

    // stage 1: intermediate queues after the first arrival, with the blocked
    // flag when the buffer was full and the first item went unmatched
    struct Stage {
        Word queue;
        bool blocked;
        double weight;
    };
    std::vector<Stage> stages;
    std::vector<int> choices0 = candidate_positions(g, policy, u, v0);
    if (choices0.empty()) {
        if (static_cast<int>(u.size()) < cap) {
            Word grown = u;
            grown.push_back(v0);
            stages.push_back({std::move(grown), false, 1.0});
        } else {
            stages.push_back({u, true, 1.0});
        }
    } else {
        double w = 1.0 / static_cast<double>(choices0.size());
        for (int pos : choices0) stages.push_back({erase_at(u, pos), false, w});
    }

    std::map<Word, double> accum;
    for (const auto& stage : stages) {
        if (!stage.blocked) {
            std::vector<int> choices1 = candidate_positions(g, policy, stage.queue, v1);
            if (choices1.empty()) {
                Word grown = stage.queue;
                grown.push_back(v1);
                accum[std::move(grown)] += stage.weight;
            } else {
                double w = stage.weight / static_cast<double>(choices1.size());
                for (int pos : choices1) accum[erase_at(stage.queue, pos)] += w;
            }
            continue;
        }
        Word extended = stage.queue;
        extended.push_back(v0);
        std::vector<int> choices1 = candidate_positions(g, policy, extended, v1);
        if (choices1.empty()) {
            accum[stage.queue] += stage.weight;  // (2c)
            continue;
        }
        double w = stage.weight / static_cast<double>(choices1.size());
        for (int pos : choices1) {
            if (pos == static_cast<int>(stage.queue.size())) {
                accum[stage.queue] += w;  // (2a)
            } else {
                Word next = erase_at(stage.queue, pos);
                next.push_back(v0);
                accum[std::move(next)] += w;  // (2b)
            }
        }
    }
    return {accum.begin(), accum.end()};
}

int TransitionMatrix::index_of(const Word& state) const {
    for (std::size_t k = 0; k < states.size(); ++k)
        if (states[k] == state) return static_cast<int>(k);
    return -1;
}

TransitionMatrix build_transition_matrix(const FiniteBufferChain& chain, std::size_t max_states) {
    TransitionMatrix matrix;
    matrix.states = enumerate_w2(chain.graph, chain.capacity, max_states);
    std::size_t m = matrix.states.size();
    matrix.probs.assign(m * m, 0.0);

    std::map<Word, int> index;
    for (std::size_t k = 0; k < m; ++k) index[matrix.states[k]] = static_cast<int>(k);

    int n = chain.graph.num_classes();
    for (std::size_t row = 0; row < m; ++row) {
        for (int v0 = 1; v0 <= n; ++v0) {
            for (int v1 = 1; v1 <= n; ++v1) {
                double pv = chain.mu.prob(v0) * chain.mu.prob(v1);
                for (auto& [next, w] : pair_transition_outcomes(chain, matrix.states[row], v0, v1))
                    matrix.probs[row * m + index.at(next)] += pv * w;
            }
        }
    }
    return matrix;
}

namespace {

bool strongly_connected(const TransitionMatrix& matrix) {
    std::size_t m = matrix.size();
    auto reach = [&](bool forward) {
        std::vector<bool> seen(m, false);
        std::deque<std::size_t> queue{0};
        seen[0] = true;
        std::size_t count = 1;
        while (!queue.empty()) {
            std::size_t u = queue.front();
            queue.pop_front();
            for (std::size_t v = 0; v < m; ++v) {
                double p = forward ? matrix.at(u, v) : matrix.at(v, u);
                if (p > 0.0 && !seen[v]) {
                    seen[v] = true;
                    ++count;
                    queue.push_back(v);
                }
            }
        }
        return count == m;
    };
    return reach(true) && reach(false);
}

double stationary_residual(const TransitionMatrix& matrix, const std::vector<double>& pi) {
    std::size_t m = matrix.size();
    double worst = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += pi[i] * matrix.at(i, j);
        worst = std::max(worst, std::abs(acc - pi[j]));
    }
    return worst;
}

// pi^T (P - I) = 0 with sum(pi) = 1, Gaussian elimination with partial pivots
std::vector<double> dense_stationary(const TransitionMatrix& matrix) {
    std::size_t m = matrix.size();
    std::vector<double> a(m * m, 0.0);
    std::vector<double> b(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) a[j * m + i] = matrix.at(i, j) - (i == j ? 1.0 : 0.0);
    for (std::size_t j = 0; j < m; ++j) a[(m - 1) * m + j] = 1.0;  // normalization row
    b[m - 1] = 1.0;

    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < m; ++row)
            if (std::abs(a[row * m + col]) > std::abs(a[pivot * m + col])) pivot = row;
        if (std::abs(a[pivot * m + col]) < 1e-14)
            throw Error(errc::no_convergence, "singular stationary system");
        if (pivot != col) {
            for (std::size_t j = 0; j < m; ++j) std::swap(a[pivot * m + j], a[col * m + j]);
            std::swap(b[pivot], b[col]);
        }
        for (std::size_t row = col + 1; row < m; ++row) {
            double f = a[row * m + col] / a[col * m + col];
            if (f == 0.0) continue;
            for (std::size_t j = col; j < m; ++j) a[row * m + j] -= f * a[col * m + j];
            b[row] -= f * b[col];
        }
    }
    std::vector<double> pi(m, 0.0);
    for (std::size_t row = m; row-- > 0;) {
        double acc = b[row];
        for (std::size_t j = row + 1; j < m; ++j) acc -= a[row * m + j] * pi[j];
        pi[row] = acc / a[row * m + row];
    }
    return pi;
}

std::vector<double> power_iteration(const TransitionMatrix& matrix) {
    std::size_t m = matrix.size();
    std::vector<double> pi(m, 1.0 / static_cast<double>(m));
    std::vector<double> next(m, 0.0);
    for (long iter = 0; iter < 2'000'000; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            if (pi[i] == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j) next[j] += pi[i] * matrix.at(i, j);
        }
        double diff = 0.0;
        for (std::size_t j = 0; j < m; ++j) diff = std::max(diff, std::abs(next[j] - pi[j]));
        pi.swap(next);
        if (diff < 1e-13) return pi;
    }
    throw Error(errc::no_convergence, "power iteration did not converge");
}

}  // namespace

StationaryDistribution solve_stationary(const TransitionMatrix& matrix) {
    if (matrix.size() == 0) throw Error(errc::bad_input, "empty matrix");
    if (!strongly_connected(matrix))
        throw Error(errc::not_irreducible, "transition matrix is not irreducible");

    std::vector<double> pi =
        matrix.size() <= 2000 ? dense_stationary(matrix) : power_iteration(matrix);

    // clean tiny negatives from elimination and renormalize
    double sum = 0.0;
    for (double& p : pi) {
        if (p < 0.0 && p > -1e-12) p = 0.0;
        sum += p;
    }
    for (double& p : pi) p /= sum;

    if (stationary_residual(matrix, pi) >= 1e-9)
        throw Error(errc::no_convergence, "stationary residual above 1e-9");
    return {matrix.states, pi};
}

double StationaryDistribution::prob_of(const Word& state) const {
    for (std::size_t k = 0; k < states.size(); ++k)
        if (states[k] == state) return probs[k];
    throw Error(errc::out_of_range, "state not in distribution: " + word_to_string(state));
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw Error(errc::dimension_mismatch, "vector lengths differ");
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) acc += std::abs(p[k] - q[k]);
    return 0.5 * acc;
}

ReturnTimeEstimate estimate_return_time(const FiniteBufferChain& chain, bool finite_buffer,
                                        const Word& start, int n_reps, long horizon,
                                        std::uint64_t seed) {
    if (horizon < 1) throw Error(errc::bad_input, "horizon must be >= 1");
    ReturnTimeEstimate est;
    est.replications = n_reps;
    double sum = 0.0, sum_sq = 0.0;
    int done = 0;
    for (int rep = 0; rep < n_reps; ++rep) {
        Rng rng(replica_seed(seed, static_cast<std::uint64_t>(rep)));
        Word state = start;
        long steps = 0;
        bool censored = true;
        auto advance = [&](int klass) {
            std::optional<int> pos =
                select_match(chain.graph, chain.policy, state, klass, nullptr, &rng);
            if (pos)
                state.erase(state.begin() + *pos);
            else
                state.push_back(klass);
        };
        while (steps < horizon) {
            int v0 = chain.mu.sample_class(rng.next_unit());
            int v1 = chain.mu.sample_class(rng.next_unit());
            ArrivalEvent e0{v0, std::nullopt}, e1{v1, std::nullopt};
            if (finite_buffer) {
                pair_transition_inplace(chain, state, e0, e1, &rng);
            } else {
                advance(v0);
                advance(v1);
            }
            ++steps;
            if (state.empty()) {
                censored = false;
                break;
            }
        }
        if (censored) {
            ++est.censored_count;
        } else {
            sum += static_cast<double>(steps);
            sum_sq += static_cast<double>(steps) * static_cast<double>(steps);
            ++done;
        }
    }
    if (done > 0) {
        est.mean = sum / done;
        if (done > 1) {
            double var = (sum_sq - sum * sum / done) / (done - 1);
            est.std_error = std::sqrt(std::max(var, 0.0) / done);
            est.ci_halfwidth = 1.96 * est.std_error;
        }
    }
    return est;
}

std::string distribution_to_text(const StationaryDistribution& dist) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t k = 0; k < dist.states.size(); ++k)
        out << word_to_string(dist.states[k]) << ' ' << dist.probs[k] << '\n';
    return out.str();
}

}  // namespace matchsim
