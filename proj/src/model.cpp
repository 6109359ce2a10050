#include "bnctl/model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace bnctl {

// ---------------------------------------------------------------------------
// State

State State::from_string(std::string_view text) {
    std::vector<bool> bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1')
            throw std::invalid_argument("state string must contain only 0/1: " + std::string(text));
        bits.push_back(c == '1');
    }
    return State(std::move(bits));
}

std::string State::to_string() const {
    std::string out;
    out.reserve(bits_.size());
    for (bool b : bits_) out.push_back(b ? '1' : '0');
    return out;
}

std::size_t hamming_distance(const State& a, const State& b) {
    if (a.size() != b.size()) throw std::invalid_argument("hamming_distance: length mismatch");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

// ---------------------------------------------------------------------------
// Expression

Expression Expression::constant(bool value) {
    static const Expression zero{std::make_shared<const Node>(Node{Kind::Const, false, 0, {}})};
    static const Expression one{std::make_shared<const Node>(Node{Kind::Const, true, 0, {}})};
    return value ? one : zero;
}

Expression Expression::var(VarIndex index) {
    return Expression{std::make_shared<const Node>(Node{Kind::Var, false, index, {}})};
}

Expression Expression::negate(Expression child) {
    return Expression{std::make_shared<const Node>(Node{Kind::Not, false, 0, {std::move(child)}})};
}

Expression Expression::conj(Expression left, Expression right) {
    return Expression{
        std::make_shared<const Node>(Node{Kind::And, false, 0, {std::move(left), std::move(right)}})};
}

Expression Expression::disj(Expression left, Expression right) {
    return Expression{
        std::make_shared<const Node>(Node{Kind::Or, false, 0, {std::move(left), std::move(right)}})};
}

bool Expression::eval(const State& s) const {
    switch (kind()) {
    case Kind::Const: return value();
    case Kind::Var: return s[index()];
    case Kind::Not: return !child().eval(s);
    case Kind::And: return left().eval(s) && right().eval(s);
    case Kind::Or: return left().eval(s) || right().eval(s);
    }
    return false;
}

namespace {

void collect_support(const Expression& e, std::vector<VarIndex>& out) {
    switch (e.kind()) {
    case Expression::Kind::Const: break;
    case Expression::Kind::Var: out.push_back(e.index()); break;
    case Expression::Kind::Not: collect_support(e.child(), out); break;
    case Expression::Kind::And:
    case Expression::Kind::Or:
        collect_support(e.left(), out);
        collect_support(e.right(), out);
        break;
    }
}

bool is_negation_of(const Expression& a, const Expression& b) {
    return (a.kind() == Expression::Kind::Not && a.child() == b) ||
           (b.kind() == Expression::Kind::Not && b.child() == a);
}

// One bottom-up rewriting pass.
Expression simplify_once(const Expression& e) {
    using Kind = Expression::Kind;
    switch (e.kind()) {
    case Kind::Const:
    case Kind::Var: return e;
    case Kind::Not: {
        Expression c = simplify_once(e.child());
        if (c.is_constant()) return Expression::constant(!c.value());
        if (c.kind() == Kind::Not) return c.child();
        return Expression::negate(c);
    }
    case Kind::And:
    case Kind::Or: {
        const bool is_and = e.kind() == Kind::And;
        Expression l = simplify_once(e.left());
        Expression r = simplify_once(e.right());
        // absorbing element: 0 for and, 1 for or
        if ((l.is_constant() && l.value() != is_and) || (r.is_constant() && r.value() != is_and))
            return Expression::constant(!is_and);
        if (l.is_constant()) return r;
        if (r.is_constant()) return l;
        if (l == r) return l;
        if (is_negation_of(l, r)) return Expression::constant(!is_and);
        return is_and ? Expression::conj(l, r) : Expression::disj(l, r);
    }
    }
    return e;
}

}  // namespace

std::vector<VarIndex> Expression::support() const {
    std::vector<VarIndex> out;
    collect_support(*this, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Expression Expression::simplified() const {
    Expression current = *this;
    for (;;) {
        Expression next = simplify_once(current);
        if (next == current) return next;
        current = std::move(next);
    }
}

bool operator==(const Expression& a, const Expression& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
    case Expression::Kind::Const: return a.value() == b.value();
    case Expression::Kind::Var: return a.index() == b.index();
    case Expression::Kind::Not: return a.child() == b.child();
    case Expression::Kind::And:
    case Expression::Kind::Or: return a.left() == b.left() && a.right() == b.right();
    }
    return false;
}

// ---------------------------------------------------------------------------
// BooleanNetwork

BooleanNetwork::BooleanNetwork(std::vector<std::string> names, std::vector<Expression> functions)
    : names_(std::move(names)), functions_(std::move(functions)) {
    if (names_.empty()) throw std::invalid_argument("network must have at least one variable");
    if (names_.size() != functions_.size())
        throw std::invalid_argument("network needs exactly one function per variable");
    std::set<std::string_view> seen;
    for (const auto& name : names_) {
        if (name.empty()) throw std::invalid_argument("variable names must be nonempty");
        if (!seen.insert(name).second) throw std::invalid_argument("duplicate variable name: " + name);
    }
    for (const auto& f : functions_)
        for (VarIndex j : f.support())
            if (j >= names_.size()) throw std::invalid_argument("function references unknown variable index");
}

VarIndex BooleanNetwork::index_of(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw std::out_of_range("unknown variable: " + std::string(name));
    return static_cast<VarIndex>(it - names_.begin());
}

std::size_t BooleanNetwork::edge_count() const {
    std::size_t edges = 0;
    for (const auto& f : functions_) edges += f.support().size();
    return edges;
}

// ---------------------------------------------------------------------------
// Control

namespace {

std::vector<VarIndex> sorted_unique(std::vector<VarIndex> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

Control::Control(std::vector<VarIndex> zero, std::vector<VarIndex> one)
    : zero_(sorted_unique(std::move(zero))), one_(sorted_unique(std::move(one))) {
    std::vector<VarIndex> both;
    std::set_intersection(zero_.begin(), zero_.end(), one_.begin(), one_.end(), std::back_inserter(both));
    if (!both.empty()) throw std::invalid_argument("control zero and one sets must be disjoint");
}

Control Control::from_literals(std::span<const Literal> literals) {
    std::vector<VarIndex> zero, one;
    for (const auto& lit : literals) (lit.value ? one : zero).push_back(lit.index);
    return Control(std::move(zero), std::move(one));
}

std::vector<Literal> Control::literals() const {
    std::vector<Literal> out;
    out.reserve(size());
    for (VarIndex i : zero_) out.push_back({i, false});
    for (VarIndex i : one_) out.push_back({i, true});
    std::sort(out.begin(), out.end());
    return out;
}

Control Control::merged(const Control& other) const {
    std::vector<VarIndex> zero = zero_, one = one_;
    zero.insert(zero.end(), other.zero_.begin(), other.zero_.end());
    one.insert(one.end(), other.one_.begin(), other.one_.end());
    return Control(std::move(zero), std::move(one));
}

void Control::check_arity(std::size_t n) const {
    if ((!zero_.empty() && zero_.back() >= n) || (!one_.empty() && one_.back() >= n))
        throw std::out_of_range("control index out of range");
}

State apply_control(const Control& control, const State& s) {
    control.check_arity(s.size());
    State out = s;
    for (VarIndex i : control.zero_set()) out.set(i, false);
    for (VarIndex i : control.one_set()) out.set(i, true);
    return out;
}

BooleanNetwork network_under_control(const BooleanNetwork& network, const Control& control) {
    control.check_arity(network.size());
    std::vector<Expression> functions = network.functions();
    for (VarIndex i : control.zero_set()) functions[i] = Expression::constant(false);
    for (VarIndex i : control.one_set()) functions[i] = Expression::constant(true);
    return BooleanNetwork(network.names(), std::move(functions));
}

// ---------------------------------------------------------------------------
// Schema

Schema Schema::from_sets(std::size_t n, std::span<const VarIndex> zero, std::span<const VarIndex> one) {
    std::vector<Trit> marks(n, Trit::DontCare);
    auto mark = [&](VarIndex i, Trit t) {
        if (i >= n) throw std::out_of_range("schema index out of range");
        if (marks[i] != Trit::DontCare) throw std::invalid_argument("schema sets must be disjoint");
        marks[i] = t;
    };
    for (VarIndex i : zero) mark(i, Trit::Zero);
    for (VarIndex i : one) mark(i, Trit::One);
    return Schema(std::move(marks));
}

Schema Schema::of_control(std::size_t n, const Control& control) {
    return from_sets(n, control.zero_set(), control.one_set());
}

Schema Schema::from_string(std::string_view pattern) {
    std::vector<Trit> marks;
    for (char c : pattern) {
        switch (c) {
        case '0': marks.push_back(Trit::Zero); break;
        case '1': marks.push_back(Trit::One); break;
        case '*': marks.push_back(Trit::DontCare); break;
        default: throw std::invalid_argument("schema pattern must contain only 0/1/*");
        }
    }
    return Schema(std::move(marks));
}

namespace {

std::vector<VarIndex> indices_marked(const std::vector<Trit>& marks, Trit t) {
    std::vector<VarIndex> out;
    for (std::size_t i = 0; i < marks.size(); ++i)
        if (marks[i] == t) out.push_back(i);
    return out;
}

}  // namespace

std::vector<VarIndex> Schema::zero_set() const { return indices_marked(marks_, Trit::Zero); }
std::vector<VarIndex> Schema::one_set() const { return indices_marked(marks_, Trit::One); }
std::vector<VarIndex> Schema::dont_care_set() const { return indices_marked(marks_, Trit::DontCare); }

Control Schema::support() const { return Control(zero_set(), one_set()); }

std::size_t Schema::literal_count() const {
    return static_cast<std::size_t>(std::count_if(marks_.begin(), marks_.end(),
                                                  [](Trit t) { return t != Trit::DontCare; }));
}

bool Schema::contains(const State& s) const {
    if (s.size() != marks_.size()) throw std::invalid_argument("schema/state length mismatch");
    for (std::size_t i = 0; i < marks_.size(); ++i) {
        if (marks_[i] == Trit::Zero && s[i]) return false;
        if (marks_[i] == Trit::One && !s[i]) return false;
    }
    return true;
}

bool Schema::subset_of(const Schema& other) const {
    if (size() != other.size()) throw std::invalid_argument("schema length mismatch");
    for (std::size_t i = 0; i < marks_.size(); ++i)
        if (other.marks_[i] != Trit::DontCare && other.marks_[i] != marks_[i]) return false;
    return true;
}

std::string Schema::to_string() const {
    std::string out;
    for (Trit t : marks_) out.push_back(t == Trit::Zero ? '0' : t == Trit::One ? '1' : '*');
    return out;
}

std::string projection(const State& s, std::span<const VarIndex> indices) {
    std::vector<VarIndex> sorted(indices.begin(), indices.end());
    std::sort(sorted.begin(), sorted.end());
    std::string out;
    for (VarIndex i : sorted) {
        if (i >= s.size()) throw std::out_of_range("projection index out of range");
        out.push_back(s[i] ? '1' : '0');
    }
    return out;
}

// ---------------------------------------------------------------------------
// Classification

bool NodeClassification::is_input(VarIndex i) const {
    return std::binary_search(inputs.begin(), inputs.end(), i);
}

bool NodeClassification::is_non_specified(VarIndex i) const {
    return std::binary_search(non_specified.begin(), non_specified.end(), i);
}

NodeClassification classify_input_nodes(const BooleanNetwork& network) {
    NodeClassification out;
    for (VarIndex i = 0; i < network.size(); ++i) {
        Expression f = network.function(i).simplified();
        if (f.is_constant()) {
            out.specified.push_back(i);
            out.inputs.push_back(i);
        } else if (f.is_var(i)) {
            out.non_specified.push_back(i);
            out.inputs.push_back(i);
        }
        // A function of x_i alone that is neither constant nor x_i (i.e. !x_i)
        // oscillates on its own and is treated as a non-input.
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parser

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         message),
      line_(line), column_(column) {}

namespace {

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct SourceLine {
    std::size_t number;     // 1-based
    std::string_view text;  // comment stripped
};

std::vector<SourceLine> significant_lines(std::string_view text) {
    std::vector<SourceLine> out;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        ++number;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t\r") != std::string_view::npos) out.push_back({number, line});
        if (end == text.size()) break;
        pos = end + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Recursive-descent parser for one expression.
//   or   := and ('|' and)*
//   and  := unary ('&' unary)*
//   unary:= '!' unary | '(' or ')' | name | '0' | '1'
class ExpressionParser {
public:
    ExpressionParser(std::string_view text, std::size_t line, std::size_t column_offset,
                     const std::vector<std::string>& names)
        : text_(text), line_(line), offset_(column_offset), names_(names) {}

    Expression parse() {
        Expression e = parse_or();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(line_, offset_ + pos_ + 1, message);
    }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expression parse_or() {
        Expression e = parse_and();
        while (accept('|')) e = Expression::disj(std::move(e), parse_and());
        return e;
    }

    Expression parse_and() {
        Expression e = parse_unary();
        while (accept('&')) e = Expression::conj(std::move(e), parse_unary());
        return e;
    }

    Expression parse_unary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        char c = text_[pos_];
        if (c == '!') {
            ++pos_;
            return Expression::negate(parse_unary());
        }
        if (c == '(') {
            ++pos_;
            Expression e = parse_or();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (c == '0' || c == '1') {
            ++pos_;
            if (pos_ < text_.size() && is_name_char(text_[pos_])) fail("malformed constant");
            return Expression::constant(c == '1');
        }
        if (is_name_start(c)) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
            std::string_view name = text_.substr(start, pos_ - start);
            auto it = std::find(names_.begin(), names_.end(), name);
            if (it == names_.end()) {
                pos_ = start;
                fail("undeclared variable '" + std::string(name) + "'");
            }
            return Expression::var(static_cast<VarIndex>(it - names_.begin()));
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    std::string_view text_;
    std::size_t line_;
    std::size_t offset_;
    const std::vector<std::string>& names_;
    std::size_t pos_ = 0;
};

}  // namespace

BooleanNetwork parse_network(std::string_view text) {
    auto lines = significant_lines(text);
    if (lines.empty()) throw ParseError(1, 1, "missing 'targets, factors' header");

    {
        const auto& header = lines.front();
        auto comma = header.text.find(',');
        bool ok = comma != std::string_view::npos && trim(header.text.substr(0, comma)) == "targets" &&
                  trim(header.text.substr(comma + 1)) == "factors";
        if (!ok) throw ParseError(header.number, 1, "expected header 'targets, factors'");
    }

    struct Row {
        SourceLine line;
        std::size_t expr_offset;
        std::string_view expr;
    };
    std::vector<std::string> names;
    std::vector<Row> rows;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto& line = lines[k];
        auto comma = line.text.find(',');
        if (comma == std::string_view::npos) throw ParseError(line.number, 1, "expected '<name>, <expression>'");
        std::string_view raw_name = line.text.substr(0, comma);
        std::string_view name = trim(raw_name);
        std::size_t name_col = raw_name.find_first_not_of(" \t") + 1;
        if (name.empty()) throw ParseError(line.number, 1, "missing target name");
        if (!is_name_start(name.front()) || !std::all_of(name.begin(), name.end(), is_name_char))
            throw ParseError(line.number, name_col, "invalid variable name '" + std::string(name) + "'");
        if (std::find(names.begin(), names.end(), name) != names.end())
            throw ParseError(line.number, name_col, "duplicate declaration of '" + std::string(name) + "'");
        names.emplace_back(name);
        rows.push_back({line, comma + 1, line.text.substr(comma + 1)});
    }
    if (names.empty()) throw ParseError(lines.front().number, 1, "model declares no variables");

    std::vector<Expression> functions;
    functions.reserve(rows.size());
    for (const auto& row : rows)
        functions.push_back(ExpressionParser(row.expr, row.line.number, row.expr_offset, names).parse());
    return BooleanNetwork(std::move(names), std::move(functions));
}

BooleanNetwork load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_network(buffer.str());
}

namespace {

int precedence(Expression::Kind kind) {
    switch (kind) {
    case Expression::Kind::Or: return 1;
    case Expression::Kind::And: return 2;
    case Expression::Kind::Not: return 3;
    default: return 4;
    }
}

void print(const Expression& e, std::span<const std::string> names, std::string& out) {
    auto sub = [&](const Expression& child, bool parens) {
        if (parens) out.push_back('(');
        print(child, names, out);
        if (parens) out.push_back(')');
    };
    switch (e.kind()) {
    case Expression::Kind::Const: out.push_back(e.value() ? '1' : '0'); break;
    case Expression::Kind::Var: out += names[e.index()]; break;
    case Expression::Kind::Not:
        out.push_back('!');
        sub(e.child(), precedence(e.child().kind()) < precedence(Expression::Kind::Not));
        break;
    case Expression::Kind::And:
    case Expression::Kind::Or: {
        int p = precedence(e.kind());
        // operators are left-associative, so a right child of equal precedence needs parentheses
        sub(e.left(), precedence(e.left().kind()) < p);
        out += e.kind() == Expression::Kind::And ? " & " : " | ";
        sub(e.right(), precedence(e.right().kind()) <= p);
        break;
    }
    }
}

}  // namespace

std::string to_string(const Expression& expr, std::span<const std::string> names) {
    std::string out;
    print(expr, names, out);
    return out;
}

std::string to_bnet(const BooleanNetwork& network) {
    std::string out = "targets, factors\n";
    for (VarIndex i = 0; i < network.size(); ++i) {
        out += network.name(i);
        out += ", ";
        out += to_string(network.function(i), network.names());
        out.push_back('\n');
    }
    return out;
}

}  // namespace bnctl
