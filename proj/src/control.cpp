#include "bnctl/control.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace bnctl::control {

std::vector<Schema> partition_schemata(bdd::Manager& mgr, const StateSet& p) {
    if (p.is_empty()) throw std::invalid_argument("partition_schemata of the empty set");
    std::vector<Schema> out;
    StateSet remaining = p;
    while (!remaining.is_empty()) {
        Schema cube = mgr.largest_cube(remaining);
        remaining -= mgr.from_schema(cube);
        out.push_back(std::move(cube));
    }
    return out;
}

ControlCandidate candidate_from_schema(const Schema& schema, const NodeClassification& cls,
                                       std::size_t schema_index) {
    ControlCandidate out;
    out.schema_index = schema_index;
    out.full = schema.support();
    std::vector<VarIndex> ess_zero, ess_one, red_zero, red_one;
    for (VarIndex i : out.full.zero_set()) {
        if (cls.is_non_specified(i)) ess_zero.push_back(i);
        else if (!cls.is_input(i)) red_zero.push_back(i);
    }
    for (VarIndex i : out.full.one_set()) {
        if (cls.is_non_specified(i)) ess_one.push_back(i);
        else if (!cls.is_input(i)) red_one.push_back(i);
    }
    out.essential = Control(std::move(ess_zero), std::move(ess_one));
    out.reducible = Control(std::move(red_zero), std::move(red_one));
    return out;
}

Verdict verify_temporary_verdict(const TransitionModel& model, const Control& control, const StateSet& sb) {
    bdd::Manager& mgr = model.manager();
    control.check_arity(model.size());
    StateSet phi = mgr.from_schema(Schema::of_control(model.size(), control));
    if (phi.subset_of(sb)) return Verdict::ValidImmediate;
    StateSet remaining = mgr.restrict(sb, control);
    if (remaining.is_empty()) return Verdict::Invalid;
    TransitionModel controlled = model.under_control(control);
    StateSet basin = dynamics::strong_basin(controlled, remaining);
    return phi.subset_of(basin) ? Verdict::Valid : Verdict::Invalid;
}

std::optional<std::size_t> ControlResult::min_size() const {
    std::optional<std::size_t> best;
    for (const auto& c : controls)
        if (!best || c.control.size() < *best) best = c.control.size();
    return best;
}

namespace {

// Calls visit(subset) for every k-subset of `items` in lexicographic order
// of index tuples; stops early when visit returns false.
template <typename Visit>
void for_each_subset(const std::vector<Literal>& items, std::size_t k, Visit&& visit) {
    if (k > items.size()) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t j = 0; j < k; ++j) idx[j] = j;
    std::vector<Literal> subset(k);
    for (;;) {
        for (std::size_t j = 0; j < k; ++j) subset[j] = items[idx[j]];
        if (!visit(subset)) return;
        std::size_t j = k;
        while (j > 0 && idx[j - 1] == items.size() - k + (j - 1)) --j;
        if (j == 0) return;
        ++idx[j - 1];
        for (std::size_t t = j; t < k; ++t) idx[t] = idx[t - 1] + 1;
    }
}

void require_attractor(const TransitionModel& model, const StateSet& target) {
    if (!dynamics::is_attractor(model, target)) throw std::invalid_argument("target is not an attractor");
}

}  // namespace

ControlResult temporary_target_control(const TransitionModel& model, const StateSet& target,
                                       const SearchOptions& options) {
    require_attractor(model, target);
    bdd::Manager& mgr = model.manager();
    const std::size_t n = model.size();

    ControlResult result;
    result.mode = Mode::Temporary;

    const NodeClassification cls = classify_input_nodes(model.network());
    const StateSet sb = dynamics::strong_basin(model, target);
    const StateSet wb = dynamics::weak_basin(model, target);
    result.schemata = partition_schemata(mgr, wb);
    const std::size_t m = result.schemata.size();
    std::vector<bool> skip(m, false);
    std::size_t zeta = std::min(options.max_size.value_or(n), n);

    std::map<Control, bool> checked;

    for (std::size_t i = 0; i < m; ++i) {
        if (skip[i]) continue;
        const ControlCandidate cand = candidate_from_schema(result.schemata[i], cls, i);
        const std::vector<Literal> reducible = cand.reducible.literals();
        const std::size_t essential_size = cand.essential.size();

        bool found = false;
        for (std::size_t k = 0; !found; ++k) {
            if (essential_size > zeta || k > std::min(zeta - essential_size, reducible.size())) break;
            for_each_subset(reducible, k, [&](const std::vector<Literal>& subset) {
                Control candidate = Control::from_literals(subset).merged(cand.essential);
                bool valid;
                if (auto it = checked.find(candidate); it != checked.end()) {
                    valid = it->second;
                } else {
                    Verdict verdict = verify_temporary_verdict(model, candidate, sb);
                    ++result.verifications;
                    valid = verdict != Verdict::Invalid;
                    checked.emplace(candidate, valid);
                    if (valid) {
                        const std::size_t control_index = result.controls.size();
                        result.controls.push_back(
                            {candidate, i, Mode::Temporary, verdict == Verdict::ValidImmediate});
                        zeta = std::min(zeta, candidate.size());
                        const Schema phi = Schema::of_control(n, candidate);
                        for (std::size_t z = i + 1; z < m; ++z) {
                            if (!skip[z] && result.schemata[z].subset_of(phi)) {
                                skip[z] = true;
                                result.skipped.push_back({z, control_index});
                            }
                        }
                    }
                }
                found = found || valid;
                return !(found && !options.all_results);
            });
        }
    }
    result.zeta = zeta;
    return result;
}

ControlResult instantaneous_target_control(const TransitionModel& model, const StateSet& target) {
    require_attractor(model, target);
    ControlResult result;
    result.mode = Mode::Instantaneous;
    const StateSet sb = dynamics::strong_basin(model, target);
    result.schemata = partition_schemata(model.manager(), sb);
    std::set<Control> seen;
    std::size_t zeta = model.size();
    for (std::size_t i = 0; i < result.schemata.size(); ++i) {
        Control c = result.schemata[i].support();
        if (!seen.insert(c).second) continue;
        zeta = std::min(zeta, c.size());
        result.controls.push_back({std::move(c), i, Mode::Instantaneous, true});
    }
    result.zeta = zeta;
    return result;
}

}  // namespace bnctl::control
