#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bnctl {

using VarIndex = std::size_t;

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

/// A point of {0,1}^n. Bit i is the value of variable i (0-based internally).
/// Ordering is lexicographic over the bit string x1 x2 ... xn.
class State {
public:
    State() = default;
    explicit State(std::size_t n, bool value = false) : bits_(n, value) {}
    explicit State(std::vector<bool> bits) : bits_(std::move(bits)) {}

    /// Parses "0110"; throws std::invalid_argument on any other character.
    static State from_string(std::string_view text);

    std::size_t size() const { return bits_.size(); }
    bool operator[](VarIndex i) const { return bits_[i]; }
    void set(VarIndex i, bool value) { bits_[i] = value; }
    void flip(VarIndex i) { bits_[i] = !bits_[i]; }

    std::string to_string() const;
    const std::vector<bool>& bits() const { return bits_; }

    friend bool operator==(const State&, const State&) = default;
    friend auto operator<=>(const State& a, const State& b) { return a.bits_ <=> b.bits_; }

private:
    std::vector<bool> bits_;
};

std::size_t hamming_distance(const State& a, const State& b);

// ---------------------------------------------------------------------------
// Expression
// ---------------------------------------------------------------------------

/// Immutable Boolean expression tree over variable indices.
class Expression {
public:
    enum class Kind : std::uint8_t { Const, Var, Not, And, Or };

    static Expression constant(bool value);
    static Expression var(VarIndex index);
    static Expression negate(Expression child);
    static Expression conj(Expression left, Expression right);
    static Expression disj(Expression left, Expression right);

    Kind kind() const;
    bool value() const;                // Const only
    VarIndex index() const;            // Var only
    const Expression& child() const;   // Not
    const Expression& left() const;    // And/Or
    const Expression& right() const;   // And/Or

    bool is_constant() const { return kind() == Kind::Const; }
    bool is_var(VarIndex i) const { return kind() == Kind::Var && index() == i; }

    bool eval(const State& s) const;

    /// Sorted, deduplicated variable indices referenced syntactically.
    std::vector<VarIndex> support() const;

    /// Applies x&0=0, x|1=1, x&1=x, x|0=x, x&!x=0, x|!x=1, x&x=x, x|x=x, !!x=x
    /// and constant folding until nothing changes.
    Expression simplified() const;

    friend bool operator==(const Expression& a, const Expression& b);

private:
    struct Node;
    explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct Expression::Node {
    Kind kind = Kind::Const;
    bool value = false;
    VarIndex index = 0;
    std::vector<Expression> children;
};

inline Expression::Kind Expression::kind() const { return node_->kind; }
inline bool Expression::value() const { return node_->value; }
inline VarIndex Expression::index() const { return node_->index; }
inline const Expression& Expression::child() const { return node_->children[0]; }
inline const Expression& Expression::left() const { return node_->children[0]; }
inline const Expression& Expression::right() const { return node_->children[1]; }

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

class BooleanNetwork {
public:
    /// Throws std::invalid_argument when the invariants are violated: sizes
    /// differ, n = 0, duplicate or empty names, out-of-range variable refs.
    BooleanNetwork(std::vector<std::string> names, std::vector<Expression> functions);

    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(VarIndex i) const { return names_.at(i); }
    const std::vector<Expression>& functions() const { return functions_; }
    const Expression& function(VarIndex i) const { return functions_.at(i); }

    /// Index of `name`, or throws std::out_of_range.
    VarIndex index_of(std::string_view name) const;

    /// Number of dependency-graph edges: pairs (j, i) where f_i references x_j.
    std::size_t edge_count() const;

    friend bool operator==(const BooleanNetwork&, const BooleanNetwork&) = default;

private:
    std::vector<std::string> names_;
    std::vector<Expression> functions_;
};

// ---------------------------------------------------------------------------
// Control, schema, classification
// ---------------------------------------------------------------------------

/// A single pinned variable.
struct Literal {
    VarIndex index = 0;
    bool value = false;
    friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// Pair of disjoint index sets (zero set, one set). Stored sorted, so two
/// controls compare equal iff they pin the same variables to the same values.
class Control {
public:
    Control() = default;
    /// Throws std::invalid_argument if the sets intersect.
    Control(std::vector<VarIndex> zero, std::vector<VarIndex> one);
    static Control from_literals(std::span<const Literal> literals);

    const std::vector<VarIndex>& zero_set() const { return zero_; }
    const std::vector<VarIndex>& one_set() const { return one_; }
    std::size_t size() const { return zero_.size() + one_.size(); }
    bool empty() const { return size() == 0; }

    /// Literals sorted by variable index.
    std::vector<Literal> literals() const;

    /// Union of two controls; throws std::invalid_argument on a conflict.
    Control merged(const Control& other) const;

    /// Throws std::out_of_range unless every index is < n.
    void check_arity(std::size_t n) const;

    friend auto operator<=>(const Control&, const Control&) = default;

private:
    std::vector<VarIndex> zero_;
    std::vector<VarIndex> one_;
};

/// s' with s'[i]=0 for i in zero set, 1 for i in one set, s[i] otherwise.
State apply_control(const Control& control, const State& s);

/// G|C: pinned variables get constant functions.
BooleanNetwork network_under_control(const BooleanNetwork& network, const Control& control);

/// Off-set / on-set / don't-care marking of a cube of states.
enum class Trit : std::uint8_t { Zero, One, DontCare };

class Schema {
public:
    Schema() = default;
    explicit Schema(std::vector<Trit> marks) : marks_(std::move(marks)) {}
    /// Every index not in `zero` or `one` is don't-care.
    static Schema from_sets(std::size_t n, std::span<const VarIndex> zero, std::span<const VarIndex> one);
    /// The intermediate states C(S) of a control.
    static Schema of_control(std::size_t n, const Control& control);
    /// Parses "0*1"; throws std::invalid_argument.
    static Schema from_string(std::string_view pattern);

    std::size_t size() const { return marks_.size(); }
    Trit operator[](VarIndex i) const { return marks_[i]; }
    const std::vector<Trit>& marks() const { return marks_; }

    std::vector<VarIndex> zero_set() const;
    std::vector<VarIndex> one_set() const;
    std::vector<VarIndex> dont_care_set() const;

    /// Support variables (zero set, one set) as a control.
    Control support() const;
    std::size_t literal_count() const;

    bool contains(const State& s) const;
    bool subset_of(const Schema& other) const;

    std::string to_string() const;

    friend bool operator==(const Schema&, const Schema&) = default;

private:
    std::vector<Trit> marks_;
};

/// (s[i1], ..., s[ik]) for the ascending indices of `indices`.
std::string projection(const State& s, std::span<const VarIndex> indices);

struct NodeClassification {
    std::vector<VarIndex> inputs;         // I
    std::vector<VarIndex> specified;      // I^s: function simplifies to a constant
    std::vector<VarIndex> non_specified;  // I^ns: function simplifies to the identity

    bool is_input(VarIndex i) const;
    bool is_non_specified(VarIndex i) const;
};

NodeClassification classify_input_nodes(const BooleanNetwork& network);

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Parses the `targets, factors` model format.
BooleanNetwork parse_network(std::string_view text);
BooleanNetwork load_network(const std::string& path);

/// Inverse of parse_network up to whitespace and redundant parentheses.
std::string to_bnet(const BooleanNetwork& network);
std::string to_string(const Expression& expr, std::span<const std::string> names);

}  // namespace bnctl
