#pragma once

// Explicit-state reference semantics. Everything here walks the full
// 2^n-state graph and exists to be checked against, not to be fast.
//
// States are encoded as integers with x1 as the most significant bit, so
// integer order equals lexicographic order of the bit strings.

#include <cstdint>
#include <span>
#include <vector>

#include "bnctl/model.hpp"

namespace bnctl::oracle {

using StateCode = std::uint32_t;

inline constexpr std::size_t kMaxGraphVars = 20;
inline constexpr std::size_t kMaxValidityVars = 16;

StateCode encode(const State& s);
State decode(StateCode code, std::size_t n);

/// Asynchronous transition graph restricted to value-changing updates.
class ExplicitTS {
public:
    std::size_t num_vars() const { return n_; }
    std::size_t num_states() const { return offsets_.size() - 1; }
    std::span<const StateCode> successors(StateCode s) const {
        return {targets_.data() + offsets_[s], targets_.data() + offsets_[s + 1]};
    }
    std::size_t num_edges() const { return targets_.size(); }

private:
    friend ExplicitTS build_ts(const BooleanNetwork& network);
    std::size_t n_ = 0;
    std::vector<std::size_t> offsets_;
    std::vector<StateCode> targets_;
};

/// Throws std::length_error above kMaxGraphVars variables.
ExplicitTS build_ts(const BooleanNetwork& network);

/// Terminal SCCs, each sorted, ordered by (size, smallest state).
std::vector<std::vector<StateCode>> explicit_attractors(const ExplicitTS& ts);

/// Sorted states with a path into `target`.
std::vector<StateCode> explicit_weak_basin(const ExplicitTS& ts, std::span<const StateCode> target);

/// Sorted states from which no target-avoiding path reaches a terminal SCC
/// of the target-absorbed graph that is disjoint from `target`.
std::vector<StateCode> explicit_strong_basin(const ExplicitTS& ts, std::span<const StateCode> target);

/// Direct validity check of a temporary target control on explicit graphs.
/// Throws std::length_error above kMaxValidityVars variables.
bool oracle_is_valid_ttc(const BooleanNetwork& network, const Control& control,
                         std::span<const StateCode> target_attractor);

struct RandomNetSpec {
    std::size_t n = 5;
    std::size_t max_in_degree = 3;
    std::uint64_t seed = 0;
    // operator mix
    double and_weight = 1.0;
    double or_weight = 1.0;
    double negation_probability = 0.3;
    double constant_probability = 0.05;   // f_i = 0 or 1
    double identity_probability = 0.05;   // f_i = x_i
    /// Every function is the identity of its own variable.
    bool identity_only = false;
};

/// Reproducible from the spec; each f_i mentions between 1 and K distinct
/// parents unless it is a constant. Throws std::invalid_argument if n or K is 0.
BooleanNetwork random_network(const RandomNetSpec& spec);

}  // namespace bnctl::oracle
