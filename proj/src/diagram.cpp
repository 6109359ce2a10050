#include "bnctl/diagram.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace bnctl::bdd {

namespace {

constexpr std::size_t kInitialTable = 1u << 12;
constexpr std::size_t kInitialCache = 1u << 16;
constexpr std::size_t kMaxCache = 1u << 22;
constexpr std::size_t kInitialGcThreshold = 1u << 20;
constexpr std::uint32_t kFreeLevel = std::numeric_limits<std::uint32_t>::max();

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = a * 0x9E3779B97F4A7C15ull;
    h ^= b + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
    h ^= c * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
    h ^= h >> 29;
    return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// StateSet

StateSet::StateSet(Manager* mgr, NodeId id) : mgr_(mgr), id_(id) {
    if (mgr_) mgr_->ref(id_);
}

StateSet::StateSet(const StateSet& other) : mgr_(other.mgr_), id_(other.id_) {
    if (mgr_) mgr_->ref(id_);
}

StateSet::StateSet(StateSet&& other) noexcept : mgr_(other.mgr_), id_(other.id_) {
    other.mgr_ = nullptr;
    other.id_ = 0;
}

StateSet& StateSet::operator=(const StateSet& other) {
    if (this != &other) {
        if (other.mgr_) other.mgr_->ref(other.id_);
        if (mgr_) mgr_->unref(id_);
        mgr_ = other.mgr_;
        id_ = other.id_;
    }
    return *this;
}

StateSet& StateSet::operator=(StateSet&& other) noexcept {
    if (this != &other) {
        if (mgr_) mgr_->unref(id_);
        mgr_ = other.mgr_;
        id_ = other.id_;
        other.mgr_ = nullptr;
        other.id_ = 0;
    }
    return *this;
}

StateSet::~StateSet() {
    if (mgr_) mgr_->unref(id_);
}

bool StateSet::is_empty() const {
    if (!mgr_) throw std::invalid_argument("operation on an unbound StateSet");
    return id_ == Manager::kFalse;
}

bool StateSet::is_full() const {
    if (!mgr_) throw std::invalid_argument("operation on an unbound StateSet");
    return id_ == Manager::kTrue;
}

static Manager& owner(const StateSet& s) {
    if (!s.manager()) throw std::invalid_argument("operation on an unbound StateSet");
    return *s.manager();
}

StateSet StateSet::operator|(const StateSet& other) const { return owner(*this).unite(*this, other); }
StateSet StateSet::operator&(const StateSet& other) const { return owner(*this).intersect(*this, other); }
StateSet StateSet::operator-(const StateSet& other) const { return owner(*this).difference(*this, other); }
StateSet StateSet::operator~() const { return owner(*this).complement(*this); }
bool StateSet::subset_of(const StateSet& other) const { return owner(*this).subset_of(*this, other); }
bool StateSet::intersects(const StateSet& other) const { return owner(*this).intersects(*this, other); }
bool StateSet::contains(const State& s) const { return owner(*this).contains(*this, s); }

// ---------------------------------------------------------------------------
// Manager: construction and node store

Manager::Manager(std::size_t num_vars) : Manager(num_vars, [num_vars] {
    std::vector<VarIndex> order(num_vars);
    for (std::size_t i = 0; i < num_vars; ++i) order[i] = i;
    return order;
}()) {}

Manager::Manager(std::size_t num_vars, std::vector<VarIndex> order)
    : num_vars_(num_vars), terminal_level_(static_cast<std::uint32_t>(num_vars)),
      var_at_level_(std::move(order)), level_of_var_(num_vars, kFreeLevel),
      gc_threshold_(kInitialGcThreshold) {
    if (num_vars == 0) throw std::invalid_argument("manager needs at least one variable");
    if (var_at_level_.size() != num_vars) throw std::invalid_argument("variable order must list every variable");
    for (std::size_t lvl = 0; lvl < num_vars; ++lvl) {
        VarIndex v = var_at_level_[lvl];
        if (v >= num_vars || level_of_var_[v] != kFreeLevel)
            throw std::invalid_argument("variable order must be a permutation");
        level_of_var_[v] = static_cast<std::uint32_t>(lvl);
    }
    nodes_.push_back({terminal_level_, kFalse, kFalse});
    nodes_.push_back({terminal_level_, kTrue, kTrue});
    refs_.assign(2, 1);  // terminals are permanently live
    table_.assign(kInitialTable, 0);
    cache_.assign(kInitialCache, {});
}

void Manager::check_owner(const StateSet& p) const {
    if (p.mgr_ != this) throw std::invalid_argument("StateSet belongs to a different manager");
}

void Manager::maybe_collect() {
    if (live_nodes() > gc_threshold_) collect_garbage();
}

NodeId Manager::make(std::uint32_t lvl, NodeId low, NodeId high) {
    if (low == high) return low;
    std::size_t mask = table_.size() - 1;
    std::size_t h = mix(lvl, low, high) & mask;
    while (NodeId id = table_[h]) {
        const Node& n = nodes_[id];
        if (n.level == lvl && n.low == low && n.high == high) return id;
        h = (h + 1) & mask;
    }
    NodeId id;
    if (!free_.empty()) {
        id = free_.back();
        free_.pop_back();
        nodes_[id] = {lvl, low, high};
        refs_[id] = 0;
    } else {
        id = static_cast<NodeId>(nodes_.size());
        nodes_.push_back({lvl, low, high});
        refs_.push_back(0);
    }
    table_[h] = id;
    if (++table_used_ * 2 > table_.size()) grow_table();
    return id;
}

void Manager::grow_table() {
    std::size_t size = table_.size();
    while (table_used_ * 2 > size / 2) size *= 2;
    table_.assign(size, 0);
    std::size_t mask = size - 1;
    table_used_ = 0;
    for (NodeId id = 2; id < nodes_.size(); ++id) {
        const Node& n = nodes_[id];
        if (n.level == kFreeLevel) continue;
        std::size_t h = mix(n.level, n.low, n.high) & mask;
        while (table_[h]) h = (h + 1) & mask;
        table_[h] = id;
        ++table_used_;
    }
    if (cache_.size() < std::min(size, kMaxCache)) cache_.assign(std::min(size, kMaxCache), {});
}

void Manager::collect_garbage() {
    std::vector<bool> marked(nodes_.size(), false);
    marked[kFalse] = marked[kTrue] = true;
    std::vector<NodeId> stack;
    for (NodeId id = 2; id < nodes_.size(); ++id)
        if (refs_[id] > 0 && nodes_[id].level != kFreeLevel) stack.push_back(id);
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        if (marked[id]) continue;
        marked[id] = true;
        stack.push_back(nodes_[id].low);
        stack.push_back(nodes_[id].high);
    }
    for (NodeId id = 2; id < nodes_.size(); ++id) {
        if (!marked[id] && nodes_[id].level != kFreeLevel) {
            nodes_[id].level = kFreeLevel;
            free_.push_back(id);
        }
    }
    // Reuse low ids first so the store stays compact.
    std::sort(free_.begin(), free_.end(), std::greater<>());
    std::size_t size = kInitialTable;
    std::size_t live = live_nodes();
    while (live * 2 > size / 2) size *= 2;
    table_used_ = 0;
    table_.assign(size, 0);
    std::size_t mask = size - 1;
    for (NodeId id = 2; id < nodes_.size(); ++id) {
        const Node& n = nodes_[id];
        if (n.level == kFreeLevel) continue;
        std::size_t h = mix(n.level, n.low, n.high) & mask;
        while (table_[h]) h = (h + 1) & mask;
        table_[h] = id;
        ++table_used_;
    }
    std::fill(cache_.begin(), cache_.end(), CacheEntry{});
    gc_threshold_ = std::max(kInitialGcThreshold, 2 * live);
    ++collections_;
}

bool Manager::cache_lookup(Op op, NodeId a, NodeId b, NodeId& result) const {
    const CacheEntry& e = cache_[mix(static_cast<std::uint64_t>(op), a, b) & (cache_.size() - 1)];
    if (e.used && e.op == op && e.a == a && e.b == b) {
        result = e.result;
        return true;
    }
    return false;
}

void Manager::cache_store(Op op, NodeId a, NodeId b, NodeId result) {
    cache_[mix(static_cast<std::uint64_t>(op), a, b) & (cache_.size() - 1)] = {a, b, result, op, true};
}

// ---------------------------------------------------------------------------
// Recursive kernels. These never collect garbage, so unreferenced
// intermediates stay valid until the public entry point returns.

NodeId Manager::negate(NodeId a) {
    if (a == kFalse) return kTrue;
    if (a == kTrue) return kFalse;
    NodeId r;
    if (cache_lookup(Op::Not, a, 0, r)) return r;
    Node n = nodes_[a];
    NodeId low = negate(n.low);
    NodeId high = negate(n.high);
    r = make(n.level, low, high);
    cache_store(Op::Not, a, 0, r);
    return r;
}

NodeId Manager::apply(Op op, NodeId a, NodeId b) {
    switch (op) {
    case Op::And:
        if (a == kFalse || b == kFalse) return kFalse;
        if (a == kTrue) return b;
        if (b == kTrue || a == b) return a;
        if (a > b) std::swap(a, b);
        break;
    case Op::Or:
        if (a == kTrue || b == kTrue) return kTrue;
        if (a == kFalse) return b;
        if (b == kFalse || a == b) return a;
        if (a > b) std::swap(a, b);
        break;
    case Op::Xor:
        if (a == kFalse) return b;
        if (b == kFalse) return a;
        if (a == b) return kFalse;
        if (a == kTrue) return negate(b);
        if (b == kTrue) return negate(a);
        if (a > b) std::swap(a, b);
        break;
    case Op::Diff:
        if (a == kFalse || b == kTrue || a == b) return kFalse;
        if (b == kFalse) return a;
        if (a == kTrue) return negate(b);
        break;
    default: throw std::logic_error("apply: not a binary operator");
    }
    NodeId r;
    if (cache_lookup(op, a, b, r)) return r;
    Node na = nodes_[a];
    Node nb = nodes_[b];
    std::uint32_t top = std::min(na.level, nb.level);
    NodeId a0 = na.level == top ? na.low : a, a1 = na.level == top ? na.high : a;
    NodeId b0 = nb.level == top ? nb.low : b, b1 = nb.level == top ? nb.high : b;
    NodeId low = apply(op, a0, b0);
    NodeId high = apply(op, a1, b1);
    r = make(top, low, high);
    cache_store(op, a, b, r);
    return r;
}

NodeId Manager::cofactor_rec(NodeId p, std::uint32_t lvl, bool value) {
    Node n = nodes_[p];
    if (n.level > lvl) return p;
    if (n.level == lvl) return value ? n.high : n.low;
    Op op = value ? Op::Cofactor1 : Op::Cofactor0;
    NodeId r;
    if (cache_lookup(op, p, lvl, r)) return r;
    NodeId low = cofactor_rec(n.low, lvl, value);
    NodeId high = cofactor_rec(n.high, lvl, value);
    r = make(n.level, low, high);
    cache_store(op, p, lvl, r);
    return r;
}

NodeId Manager::flip_rec(NodeId p, std::uint32_t lvl) {
    Node n = nodes_[p];
    if (n.level > lvl) return p;
    if (n.level == lvl) return make(lvl, n.high, n.low);
    NodeId r;
    if (cache_lookup(Op::Flip, p, lvl, r)) return r;
    NodeId low = flip_rec(n.low, lvl);
    NodeId high = flip_rec(n.high, lvl);
    r = make(n.level, low, high);
    cache_store(Op::Flip, p, lvl, r);
    return r;
}

NodeId Manager::cube_of(const std::vector<std::pair<std::uint32_t, bool>>& lits) {
    auto sorted = lits;
    std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    NodeId node = kTrue;
    for (const auto& [lvl, value] : sorted) node = value ? make(lvl, kFalse, node) : make(lvl, node, kFalse);
    return node;
}

NodeId Manager::build(const Expression& f) {
    switch (f.kind()) {
    case Expression::Kind::Const: return f.value() ? kTrue : kFalse;
    case Expression::Kind::Var:
        if (f.index() >= num_vars_) throw std::out_of_range("expression variable out of range");
        return make(level_of_var_[f.index()], kFalse, kTrue);
    case Expression::Kind::Not: return negate(build(f.child()));
    case Expression::Kind::And: {
        NodeId l = build(f.left());
        return apply(Op::And, l, build(f.right()));
    }
    case Expression::Kind::Or: {
        NodeId l = build(f.left());
        return apply(Op::Or, l, build(f.right()));
    }
    }
    return kFalse;
}

// ---------------------------------------------------------------------------
// Public set algebra

StateSet Manager::empty() { return wrap(kFalse); }
StateSet Manager::full() { return wrap(kTrue); }

StateSet Manager::literal(VarIndex var, bool value) {
    if (var >= num_vars_) throw std::out_of_range("literal variable out of range");
    maybe_collect();
    return wrap(cube_of({{level_of_var_[var], value}}));
}

StateSet Manager::from_state(const State& s) {
    if (s.size() != num_vars_) throw std::invalid_argument("state length does not match manager");
    maybe_collect();
    std::vector<std::pair<std::uint32_t, bool>> lits;
    for (VarIndex v = 0; v < num_vars_; ++v) lits.emplace_back(level_of_var_[v], s[v]);
    return wrap(cube_of(lits));
}

StateSet Manager::from_states(std::span<const State> states) {
    maybe_collect();
    NodeId acc = kFalse;
    std::vector<std::pair<std::uint32_t, bool>> lits;
    for (const State& s : states) {
        if (s.size() != num_vars_) throw std::invalid_argument("state length does not match manager");
        lits.clear();
        for (VarIndex v = 0; v < num_vars_; ++v) lits.emplace_back(level_of_var_[v], s[v]);
        acc = apply(Op::Or, acc, cube_of(lits));
    }
    return wrap(acc);
}

StateSet Manager::from_schema(const Schema& cube) {
    if (cube.size() != num_vars_) throw std::invalid_argument("schema length does not match manager");
    maybe_collect();
    std::vector<std::pair<std::uint32_t, bool>> lits;
    for (VarIndex v = 0; v < num_vars_; ++v)
        if (cube[v] != Trit::DontCare) lits.emplace_back(level_of_var_[v], cube[v] == Trit::One);
    return wrap(cube_of(lits));
}

StateSet Manager::from_expression(const Expression& f) {
    maybe_collect();
    return wrap(build(f));
}

StateSet Manager::unite(const StateSet& a, const StateSet& b) {
    check_owner(a), check_owner(b);
    maybe_collect();
    return wrap(apply(Op::Or, a.id_, b.id_));
}

StateSet Manager::intersect(const StateSet& a, const StateSet& b) {
    check_owner(a), check_owner(b);
    maybe_collect();
    return wrap(apply(Op::And, a.id_, b.id_));
}

StateSet Manager::difference(const StateSet& a, const StateSet& b) {
    check_owner(a), check_owner(b);
    maybe_collect();
    return wrap(apply(Op::Diff, a.id_, b.id_));
}

StateSet Manager::complement(const StateSet& a) {
    check_owner(a);
    maybe_collect();
    return wrap(negate(a.id_));
}

StateSet Manager::exclusive_or(const StateSet& a, const StateSet& b) {
    check_owner(a), check_owner(b);
    maybe_collect();
    return wrap(apply(Op::Xor, a.id_, b.id_));
}

StateSet Manager::cofactor(const StateSet& p, VarIndex var, bool value) {
    check_owner(p);
    if (var >= num_vars_) throw std::out_of_range("cofactor variable out of range");
    maybe_collect();
    return wrap(cofactor_rec(p.id_, level_of_var_[var], value));
}

StateSet Manager::flip(const StateSet& p, VarIndex var) {
    check_owner(p);
    if (var >= num_vars_) throw std::out_of_range("flip variable out of range");
    maybe_collect();
    return wrap(flip_rec(p.id_, level_of_var_[var]));
}

StateSet Manager::restrict(const StateSet& p, const Control& control) {
    check_owner(p);
    control.check_arity(num_vars_);
    maybe_collect();
    std::vector<std::pair<std::uint32_t, bool>> lits;
    for (VarIndex v : control.zero_set()) lits.emplace_back(level_of_var_[v], false);
    for (VarIndex v : control.one_set()) lits.emplace_back(level_of_var_[v], true);
    return wrap(apply(Op::And, p.id_, cube_of(lits)));
}

bool Manager::subset_of(const StateSet& a, const StateSet& b) {
    check_owner(a), check_owner(b);
    maybe_collect();
    return apply(Op::Diff, a.id_, b.id_) == kFalse;
}

bool Manager::intersects(const StateSet& a, const StateSet& b) {
    check_owner(a), check_owner(b);
    maybe_collect();
    return apply(Op::And, a.id_, b.id_) != kFalse;
}

bool Manager::contains(const StateSet& p, const State& s) const {
    check_owner(p);
    if (s.size() != num_vars_) throw std::invalid_argument("state length does not match manager");
    NodeId id = p.id_;
    while (id > kTrue) {
        const Node& n = nodes_[id];
        id = s[var_at_level_[n.level]] ? n.high : n.low;
    }
    return id == kTrue;
}

// ---------------------------------------------------------------------------
// Queries

BigCount Manager::count_states(const StateSet& p) const {
    check_owner(p);
    std::unordered_map<NodeId, BigCount> memo;
    auto rec = [&](auto&& self, NodeId id) -> BigCount {
        if (id == kFalse) return 0;
        if (id == kTrue) return 1;
        if (auto it = memo.find(id); it != memo.end()) return it->second;
        const Node n = nodes_[id];
        BigCount low = self(self, n.low) << (level(n.low) - n.level - 1);
        BigCount high = self(self, n.high) << (level(n.high) - n.level - 1);
        BigCount total = low + high;
        memo.emplace(id, total);
        return total;
    };
    return rec(rec, p.id_) << level(p.id_);
}

Schema Manager::largest_cube(const StateSet& p) const {
    check_owner(p);
    if (p.id_ == kFalse) throw std::invalid_argument("largest_cube of the empty set");
    constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();
    std::unordered_map<NodeId, std::uint32_t> cost;
    auto rec = [&](auto&& self, NodeId id) -> std::uint32_t {
        if (id == kFalse) return kInf;
        if (id == kTrue) return 0;
        if (auto it = cost.find(id); it != cost.end()) return it->second;
        const Node n = nodes_[id];
        std::uint32_t best = std::min(self(self, n.low), self(self, n.high));
        std::uint32_t c = best == kInf ? kInf : best + 1;
        cost.emplace(id, c);
        return c;
    };
    rec(rec, p.id_);
    std::vector<Trit> marks(num_vars_, Trit::DontCare);
    NodeId id = p.id_;
    while (id > kTrue) {
        const Node& n = nodes_[id];
        bool take_low = rec(rec, n.low) <= rec(rec, n.high);
        marks[var_at_level_[n.level]] = take_low ? Trit::Zero : Trit::One;
        id = take_low ? n.low : n.high;
    }
    return Schema(std::move(marks));
}

State Manager::pick_state(const StateSet& p, std::uint64_t seed) const {
    check_owner(p);
    if (p.id_ == kFalse) throw std::invalid_argument("pick_state of the empty set");
    std::mt19937_64 rng(seed);
    State s(num_vars_);
    NodeId id = p.id_;
    for (std::uint32_t lvl = 0; lvl < terminal_level_; ++lvl) {
        bool bit;
        if (level(id) == lvl) {
            const Node& n = nodes_[id];
            if (n.low == kFalse) bit = true;
            else if (n.high == kFalse) bit = false;
            else bit = (rng() & 1u) != 0;
            id = bit ? n.high : n.low;
        } else {
            bit = (rng() & 1u) != 0;
        }
        s.set(var_at_level_[lvl], bit);
    }
    return s;
}

State Manager::min_state(const StateSet& p) {
    check_owner(p);
    if (p.id_ == kFalse) throw std::invalid_argument("min_state of the empty set");
    maybe_collect();
    State s(num_vars_);
    NodeId cur = p.id_;
    for (VarIndex v = 0; v < num_vars_; ++v) {
        NodeId low = cofactor_rec(cur, level_of_var_[v], false);
        if (low != kFalse) {
            cur = low;
        } else {
            s.set(v, true);
            cur = cofactor_rec(cur, level_of_var_[v], true);
        }
    }
    return s;
}

std::vector<State> Manager::states(const StateSet& p, std::size_t limit) const {
    if (count_states(p) > limit) throw std::length_error("state set too large to enumerate");
    std::vector<State> out;
    State s(num_vars_);
    auto rec = [&](auto&& self, NodeId id, std::uint32_t lvl) -> void {
        if (id == kFalse) return;
        if (lvl == terminal_level_) {
            out.push_back(s);
            return;
        }
        VarIndex v = var_at_level_[lvl];
        NodeId low = id, high = id;
        if (level(id) == lvl) low = nodes_[id].low, high = nodes_[id].high;
        s.set(v, false);
        self(self, low, lvl + 1);
        s.set(v, true);
        self(self, high, lvl + 1);
    };
    rec(rec, p.id_, 0);
    std::sort(out.begin(), out.end());
    return out;
}

NodeView Manager::view(const StateSet& p) {
    check_owner(p);
    NodeView out;
    if (p.id_ <= kTrue) {
        out.terminal = true;
        out.value = p.id_ == kTrue;
        return out;
    }
    const Node n = nodes_[p.id_];
    out.var = var_at_level_[n.level];
    out.low = wrap(n.low);
    out.high = wrap(n.high);
    return out;
}

std::size_t Manager::node_count(const StateSet& p) const {
    check_owner(p);
    std::unordered_set<NodeId> seen;
    std::vector<NodeId> stack{p.id_};
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        if (!seen.insert(id).second || id <= kTrue) continue;
        stack.push_back(nodes_[id].low);
        stack.push_back(nodes_[id].high);
    }
    return seen.size();
}

std::string Manager::to_dot(const StateSet& p, std::span<const std::string> names) const {
    check_owner(p);
    std::ostringstream out;
    out << "digraph bdd {\n  n0 [shape=box,label=\"0\"];\n  n1 [shape=box,label=\"1\"];\n";
    std::unordered_set<NodeId> seen;
    std::vector<NodeId> stack{p.id_};
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        if (id <= kTrue || !seen.insert(id).second) continue;
        const Node& n = nodes_[id];
        VarIndex v = var_at_level_[n.level];
        std::string label = v < names.size() ? names[v] : "x" + std::to_string(v + 1);
        out << "  n" << id << " [label=\"" << label << "\"];\n";
        out << "  n" << id << " -> n" << n.low << " [style=dashed];\n";
        out << "  n" << id << " -> n" << n.high << ";\n";
        stack.push_back(n.low);
        stack.push_back(n.high);
    }
    out << "}\n";
    return out.str();
}

}  // namespace bnctl::bdd
