#include "bnctl/dynamics.hpp"

#include <algorithm>
#include <stdexcept>

namespace bnctl::dynamics {

TransitionModel::TransitionModel(const BooleanNetwork& network, bdd::Manager& mgr)
    : network_(network), mgr_(&mgr) {
    if (mgr.num_vars() != network.size()) throw std::invalid_argument("manager arity does not match network");
    update_.reserve(network.size());
    for (VarIndex i = 0; i < network.size(); ++i) {
        StateSet f = mgr.from_expression(network.function(i));
        update_.push_back(mgr.exclusive_or(f, mgr.literal(i, true)));
    }
}

TransitionModel TransitionModel::under_control(const Control& control) const {
    control.check_arity(size());
    std::vector<StateSet> update = update_;
    // a pinned variable moves only toward its pinned value
    for (VarIndex i : control.zero_set()) update[i] = mgr_->literal(i, true);
    for (VarIndex i : control.one_set()) update[i] = mgr_->literal(i, false);
    return TransitionModel(network_under_control(network_, control), mgr_, std::move(update));
}

StateSet TransitionModel::post(const StateSet& p) const {
    StateSet out = mgr_->empty();
    for (VarIndex i = 0; i < size(); ++i) out |= mgr_->flip(p & update_[i], i);
    return out;
}

StateSet TransitionModel::pre(const StateSet& p) const {
    StateSet out = mgr_->empty();
    for (VarIndex i = 0; i < size(); ++i) out |= update_[i] & mgr_->flip(p, i);
    return out;
}

// Both reachability loops apply one variable at a time and reuse the grown set
// immediately; the fixpoint is the same as iterating post/pre as a whole.
StateSet TransitionModel::reach_forward(const StateSet& p) const {
    StateSet z = p;
    for (;;) {
        StateSet before = z;
        for (VarIndex i = 0; i < size(); ++i) z |= mgr_->flip(z & update_[i], i);
        if (z == before) return z;
    }
}

StateSet TransitionModel::reach_backward(const StateSet& p) const {
    StateSet z = p;
    for (;;) {
        StateSet before = z;
        for (VarIndex i = 0; i < size(); ++i) z |= update_[i] & mgr_->flip(z, i);
        if (z == before) return z;
    }
}

namespace {

std::uint64_t splitmix(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

std::vector<Attractor> attractors(const TransitionModel& model, std::uint64_t seed) {
    bdd::Manager& mgr = model.manager();
    std::vector<Attractor> found;
    StateSet remaining = mgr.full();
    std::uint64_t rng = seed;
    while (!remaining.is_empty()) {
        State s = mgr.pick_state(remaining, splitmix(rng));
        StateSet forward = model.reach_forward(mgr.from_state(s));
        for (;;) {
            // F is terminal iff F = fwd(t) and every state of it reaches t back
            State t = mgr.pick_state(forward, splitmix(rng));
            StateSet t_set = mgr.from_state(t);
            forward = model.reach_forward(t_set);
            StateSet backward = model.reach_backward(t_set) & forward;
            if (backward == forward) break;
            // states of F that cannot reach t lead strictly deeper
            State deeper = mgr.pick_state(forward - backward, splitmix(rng));
            forward = model.reach_forward(mgr.from_state(deeper));
        }
        Attractor a;
        a.size = mgr.count_states(forward);
        a.kind = a.size == 1 ? AttractorKind::Singleton : AttractorKind::Cyclic;
        a.min_state = mgr.min_state(forward);
        remaining -= model.reach_backward(forward);
        a.states = std::move(forward);
        found.push_back(std::move(a));
    }
    std::sort(found.begin(), found.end(), [](const Attractor& x, const Attractor& y) {
        if (x.size != y.size) return x.size < y.size;
        return x.min_state < y.min_state;
    });
    return found;
}

bool is_attractor(const TransitionModel& model, const StateSet& a) {
    if (a.is_empty()) return false;
    if (!model.post(a).subset_of(a)) return false;
    bdd::Manager& mgr = model.manager();
    return model.reach_forward(mgr.from_state(mgr.pick_state(a))) == a;
}

StateSet weak_basin(const TransitionModel& model, const StateSet& a) {
    if (a.is_empty()) throw std::invalid_argument("weak_basin of an empty set");
    return model.reach_backward(a);
}

StateSet strong_basin(const TransitionModel& model, const StateSet& target) {
    if (target.is_empty()) return target;
    // Target states have no outgoing moves in the absorbed system, so plain
    // backward reachability already equals the absorbed weak basin.
    StateSet z = model.reach_backward(target);
    for (;;) {
        StateSet escaping = (model.pre(~z) & z) - target;
        if (escaping.is_empty()) return z;
        z -= escaping;
    }
}

}  // namespace bnctl::dynamics
