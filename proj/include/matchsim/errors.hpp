#pragma once

#include <stdexcept>
#include <string>

namespace matchsim {

enum class errc {
    self_loop,
    out_of_range,
    disconnected,
    too_large,
    inadmissible_state,
    policy_not_class_admissible,
    domain_too_large,
    odd_length,
    bipartite_graph,
    verification_failed,
    not_an_odd_cycle,
    not_complete_multipartite,
    no_base_words,
    none_found,
    overflow,
    not_irreducible,
    no_convergence,
    dimension_mismatch,
    empty_dictionary,
    uncertified_word,
    depth_limit,
    coalescence_failed,
    not_stabilized,
    not_perfect,
    not_fcfm,
    io_error,
    bad_input,
};

const char* errc_name(errc code);

// All recoverable failures surface as this exception; code() keeps them
// machine-distinguishable for the CLI exit-code mapping.
class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const { return code_; }

private:
    errc code_;
};

inline const char* errc_name(errc code) {
    switch (code) {
        case errc::self_loop: return "SelfLoop";
        case errc::out_of_range: return "OutOfRange";
        case errc::disconnected: return "Disconnected";
        case errc::too_large: return "TooLarge";
        case errc::inadmissible_state: return "InadmissibleState";
        case errc::policy_not_class_admissible: return "PolicyNotClassAdmissible";
        case errc::domain_too_large: return "DomainTooLarge";
        case errc::odd_length: return "OddLength";
        case errc::bipartite_graph: return "BipartiteGraph";
        case errc::verification_failed: return "VerificationFailed";
        case errc::not_an_odd_cycle: return "NotAnOddCycle";
        case errc::not_complete_multipartite: return "NotCompleteMultipartite";
        case errc::no_base_words: return "NoBaseWords";
        case errc::none_found: return "NoneFound";
        case errc::overflow: return "Overflow";
        case errc::not_irreducible: return "NotIrreducible";
        case errc::no_convergence: return "NoConvergence";
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::empty_dictionary: return "EmptyDictionary";
        case errc::uncertified_word: return "UncertifiedWord";
        case errc::depth_limit: return "DepthLimit";
        case errc::coalescence_failed: return "CoalescenceFailed";
        case errc::not_stabilized: return "NotStabilized";
        case errc::not_perfect: return "NotPerfect";
        case errc::not_fcfm: return "NotFcfm";
        case errc::io_error: return "IoError";
        case errc::bad_input: return "BadInput";
    }
    return "UnknownError";
}

}  // namespace matchsim
