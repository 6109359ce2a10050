#pragma once

// Temporary and instantaneous target control by schema partitioning.
//
// The weak basin of the target is covered by disjoint cubes (schemata), each
// taken as a largest cube of what is left. The fixed literals of a schema are
// a candidate control; non-specified input nodes in it are kept, specified
// inputs are dropped, and the remaining literals are searched by ascending
// subset size until a subset passes verification.

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "bnctl/diagram.hpp"
#include "bnctl/dynamics.hpp"
#include "bnctl/model.hpp"

namespace bnctl::control {

using bdd::StateSet;
using dynamics::TransitionModel;

/// Greedy cube cover: repeatedly take the largest cube of what is left.
/// Throws std::invalid_argument on an empty set.
std::vector<Schema> partition_schemata(bdd::Manager& mgr, const StateSet& p);

struct ControlCandidate {
    std::size_t schema_index = 0;
    Control full;       // support variables of the schema
    Control essential;  // support ∩ non-specified inputs
    Control reducible;  // support minus all inputs
};

ControlCandidate candidate_from_schema(const Schema& schema, const NodeClassification& cls,
                                       std::size_t schema_index = 0);

enum class Verdict {
    Invalid,
    ValidImmediate,  // every intermediate state already lies in the strong basin
    Valid,           // valid after holding the control in the controlled system
};

/// Checks a control against the strong basin `sb` of the target attractor of
/// the uncontrolled model.
Verdict verify_temporary_verdict(const TransitionModel& model, const Control& control, const StateSet& sb);

inline bool verify_temporary(const TransitionModel& model, const Control& control, const StateSet& sb) {
    return verify_temporary_verdict(model, control, sb) != Verdict::Invalid;
}

enum class Mode { Temporary, Instantaneous };

struct FoundControl {
    Control control;
    std::size_t schema_index = 0;
    Mode mode = Mode::Temporary;
    /// Set when the intermediate states already sit in the strong basin, i.e.
    /// applying the control once would suffice.
    bool instantaneous_sufficient = false;
};

/// Schema `schema_index` was skipped because it lies inside the intermediate
/// states of controls[by_control].
struct SkipRecord {
    std::size_t schema_index = 0;
    std::size_t by_control = 0;
};

struct ControlResult {
    Mode mode = Mode::Temporary;
    std::vector<FoundControl> controls;
    std::size_t zeta = 0;
    std::vector<Schema> schemata;
    std::vector<SkipRecord> skipped;
    std::size_t verifications = 0;  // Verify calls, memo hits excluded

    std::optional<std::size_t> min_size() const;
};

struct SearchOptions {
    /// Initial size threshold; the network size when absent.
    std::optional<std::size_t> max_size;
    /// Keep every valid control of the first successful subset size of a
    /// schema instead of stopping at the first one.
    bool all_results = false;
};

/// Throws std::invalid_argument when `target` is not an attractor of `model`.
ControlResult temporary_target_control(const TransitionModel& model, const StateSet& target,
                                       const SearchOptions& options = {});

/// Supports of the strong-basin schemata, deduplicated.
ControlResult instantaneous_target_control(const TransitionModel& model, const StateSet& target);

}  // namespace bnctl::control
