#pragma once

// Asynchronous transition semantics over decision diagrams.
//
// Variable i can move in state s exactly when f_i(s) != s[i]; the set of such
// states is kept as U_i. Self-loops of the asynchronous update are never
// represented: post/pre only follow value-changing transitions, and every
// fixpoint below is phrased over those.

#include <cstdint>
#include <vector>

#include "bnctl/diagram.hpp"
#include "bnctl/model.hpp"

namespace bnctl::dynamics {

using bdd::StateSet;

class TransitionModel {
public:
    /// Encodes `network` into `mgr`; the manager must outlive the model.
    TransitionModel(const BooleanNetwork& network, bdd::Manager& mgr);

    const BooleanNetwork& network() const { return network_; }
    bdd::Manager& manager() const { return *mgr_; }
    std::size_t size() const { return update_.size(); }

    /// U_i = { s | f_i(s) != s[i] }.
    const StateSet& update_set(VarIndex i) const { return update_.at(i); }

    /// Model of G|C, sharing the unpinned update sets with this one.
    TransitionModel under_control(const Control& control) const;

    /// All value-changing successors of P.
    StateSet post(const StateSet& p) const;
    /// All states with a value-changing successor in P.
    StateSet pre(const StateSet& p) const;
    /// Least fixpoint containing P and closed under post.
    StateSet reach_forward(const StateSet& p) const;
    /// Least fixpoint containing P and closed under pre.
    StateSet reach_backward(const StateSet& p) const;

private:
    TransitionModel(BooleanNetwork network, bdd::Manager* mgr, std::vector<StateSet> update)
        : network_(std::move(network)), mgr_(mgr), update_(std::move(update)) {}

    BooleanNetwork network_;
    bdd::Manager* mgr_;
    std::vector<StateSet> update_;
};

enum class AttractorKind { Singleton, Cyclic };

struct Attractor {
    StateSet states;
    AttractorKind kind = AttractorKind::Singleton;
    bdd::BigCount size;
    State min_state;  // lexicographically smallest member
};

/// Terminal SCCs of the transition system, sorted by (size, smallest state).
/// The descent picks states with seeds derived from `seed`; the returned set
/// and its order do not depend on it.
std::vector<Attractor> attractors(const TransitionModel& model, std::uint64_t seed = 0);

/// True iff A is nonempty, closed under post and strongly connected.
bool is_attractor(const TransitionModel& model, const StateSet& a);

/// States with at least one path into A. Throws std::invalid_argument if A is empty.
StateSet weak_basin(const TransitionModel& model, const StateSet& a);

/// States from which every fair path visits Target, with Target absorbing.
/// For an attractor this is its strong basin.
StateSet strong_basin(const TransitionModel& model, const StateSet& target);

}  // namespace bnctl::dynamics
