#pragma once

// Reduced ordered binary decision diagrams over a fixed set of n state
// variables. A StateSet is a reference-counted handle to a canonical root, so
// two handles of one manager are equal iff they denote the same set of states.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bnctl/model.hpp"

namespace bnctl::bdd {

using NodeId = std::uint32_t;
using BigCount = boost::multiprecision::cpp_int;

class Manager;

class StateSet {
public:
    StateSet() = default;
    StateSet(const StateSet& other);
    StateSet(StateSet&& other) noexcept;
    StateSet& operator=(const StateSet& other);
    StateSet& operator=(StateSet&& other) noexcept;
    ~StateSet();

    Manager* manager() const { return mgr_; }
    NodeId id() const { return id_; }
    bool valid() const { return mgr_ != nullptr; }

    bool is_empty() const;
    bool is_full() const;

    StateSet operator|(const StateSet& other) const;
    StateSet operator&(const StateSet& other) const;
    StateSet operator-(const StateSet& other) const;
    StateSet operator~() const;
    StateSet& operator|=(const StateSet& other) { return *this = *this | other; }
    StateSet& operator&=(const StateSet& other) { return *this = *this & other; }
    StateSet& operator-=(const StateSet& other) { return *this = *this - other; }

    bool subset_of(const StateSet& other) const;
    bool intersects(const StateSet& other) const;
    bool contains(const State& s) const;

    /// Handle identity within one manager; false across managers.
    friend bool operator==(const StateSet& a, const StateSet& b) { return a.mgr_ == b.mgr_ && a.id_ == b.id_; }

private:
    friend class Manager;
    StateSet(Manager* mgr, NodeId id);

    Manager* mgr_ = nullptr;
    NodeId id_ = 0;
};

/// One decision node seen from outside: either a terminal or a test of `var`.
struct NodeView {
    bool terminal = false;
    bool value = false;  // terminal only
    VarIndex var = 0;
    StateSet low;
    StateSet high;
};

class Manager {
public:
    /// Identity order: variable i sits at level i.
    explicit Manager(std::size_t num_vars);
    /// `order[level]` is the variable tested at that level; must be a permutation.
    Manager(std::size_t num_vars, std::vector<VarIndex> order);

    Manager(const Manager&) = delete;
    Manager& operator=(const Manager&) = delete;

    std::size_t num_vars() const { return num_vars_; }
    const std::vector<VarIndex>& order() const { return var_at_level_; }
    std::uint32_t level_of(VarIndex var) const { return level_of_var_.at(var); }

    StateSet empty();
    StateSet full();
    StateSet literal(VarIndex var, bool value);
    StateSet from_state(const State& s);
    StateSet from_states(std::span<const State> states);
    StateSet from_schema(const Schema& cube);
    StateSet from_expression(const Expression& f);

    StateSet unite(const StateSet& a, const StateSet& b);
    StateSet intersect(const StateSet& a, const StateSet& b);
    StateSet difference(const StateSet& a, const StateSet& b);
    StateSet complement(const StateSet& a);
    StateSet exclusive_or(const StateSet& a, const StateSet& b);

    /// P with variable `var` fixed to `value` (result is independent of var).
    StateSet cofactor(const StateSet& p, VarIndex var, bool value);
    /// { s with bit `var` flipped : s in P }.
    StateSet flip(const StateSet& p, VarIndex var);
    /// P restricted to S|C.
    StateSet restrict(const StateSet& p, const Control& control);

    bool subset_of(const StateSet& a, const StateSet& b);
    bool intersects(const StateSet& a, const StateSet& b);
    bool contains(const StateSet& p, const State& s) const;

    BigCount count_states(const StateSet& p) const;

    /// Minimum-literal root-to-one path of P's diagram. Ties go to the low
    /// branch. Throws std::invalid_argument on an empty set.
    Schema largest_cube(const StateSet& p) const;

    /// Some member of P chosen by a walk seeded with `seed`.
    State pick_state(const StateSet& p, std::uint64_t seed = 0) const;
    /// Lexicographically smallest member in variable-index order.
    State min_state(const StateSet& p);

    /// Members in lexicographic order; throws std::length_error above `limit`.
    std::vector<State> states(const StateSet& p, std::size_t limit = 1u << 20) const;

    NodeView view(const StateSet& p);

    std::size_t node_count(const StateSet& p) const;
    std::size_t live_nodes() const { return nodes_.size() - free_.size(); }
    std::size_t collections() const { return collections_; }
    /// Drops every node not reachable from a live handle.
    void collect_garbage();

    std::string to_dot(const StateSet& p, std::span<const std::string> names) const;

private:
    friend class StateSet;

    struct Node {
        std::uint32_t level;
        NodeId low;
        NodeId high;
    };

    enum class Op : std::uint8_t { And, Or, Xor, Diff, Not, Cofactor0, Cofactor1, Flip };

    struct CacheEntry {
        NodeId a = 0;
        NodeId b = 0;
        NodeId result = 0;
        Op op = Op::And;
        bool used = false;
    };

    static constexpr NodeId kFalse = 0;
    static constexpr NodeId kTrue = 1;

    StateSet wrap(NodeId id) { return StateSet(this, id); }
    void check_owner(const StateSet& p) const;
    void maybe_collect();

    std::uint32_t level(NodeId id) const { return nodes_[id].level; }
    NodeId make(std::uint32_t level, NodeId low, NodeId high);
    void grow_table();

    bool cache_lookup(Op op, NodeId a, NodeId b, NodeId& result) const;
    void cache_store(Op op, NodeId a, NodeId b, NodeId result);

    NodeId apply(Op op, NodeId a, NodeId b);
    NodeId negate(NodeId a);
    NodeId cofactor_rec(NodeId p, std::uint32_t lvl, bool value);
    NodeId flip_rec(NodeId p, std::uint32_t lvl);
    NodeId build(const Expression& f);
    NodeId cube_of(const std::vector<std::pair<std::uint32_t, bool>>& lits);

    void ref(NodeId id) { ++refs_[id]; }
    void unref(NodeId id) { --refs_[id]; }

    std::size_t num_vars_;
    std::uint32_t terminal_level_;
    std::vector<VarIndex> var_at_level_;
    std::vector<std::uint32_t> level_of_var_;

    std::vector<Node> nodes_;
    std::vector<std::uint32_t> refs_;
    std::vector<NodeId> free_;
    std::vector<NodeId> table_;  // open addressing, 0 marks an empty bucket
    std::size_t table_used_ = 0;
    mutable std::vector<CacheEntry> cache_;
    std::size_t gc_threshold_;
    std::size_t collections_ = 0;
};

}  // namespace bnctl::bdd
