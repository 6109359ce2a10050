#include "bnctl/oracle.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <stdexcept>

namespace bnctl::oracle {

StateCode encode(const State& s) {
    StateCode code = 0;
    for (std::size_t i = 0; i < s.size(); ++i) code = (code << 1) | (s[i] ? 1u : 0u);
    return code;
}

State decode(StateCode code, std::size_t n) {
    State s(n);
    for (std::size_t i = 0; i < n; ++i) s.set(i, (code >> (n - 1 - i)) & 1u);
    return s;
}

ExplicitTS build_ts(const BooleanNetwork& network) {
    const std::size_t n = network.size();
    if (n > kMaxGraphVars) throw std::length_error("explicit graph limited to 20 variables");
    ExplicitTS ts;
    ts.n_ = n;
    const StateCode states = StateCode{1} << n;
    ts.offsets_.reserve(states + 1);
    ts.offsets_.push_back(0);
    for (StateCode code = 0; code < states; ++code) {
        State s = decode(code, n);
        for (std::size_t i = 0; i < n; ++i) {
            if (network.function(i).eval(s) != s[i]) ts.targets_.push_back(code ^ (StateCode{1} << (n - 1 - i)));
        }
        ts.offsets_.push_back(ts.targets_.size());
    }
    return ts;
}

namespace {

// Iterative Tarjan. `active` limits which states keep their outgoing edges
// (absorbed states have none). Returns component id per state and, per
// component, whether any edge leaves it.
struct SccResult {
    std::vector<std::uint32_t> component;
    std::vector<bool> terminal;
};

SccResult tarjan(const ExplicitTS& ts, const std::vector<bool>& absorbing) {
    const std::size_t count = ts.num_states();
    constexpr std::uint32_t kUnvisited = 0xFFFFFFFFu;
    std::vector<std::uint32_t> index(count, kUnvisited), low(count, 0), component(count, kUnvisited);
    std::vector<bool> on_stack(count, false);
    std::vector<StateCode> stack;
    std::vector<bool> terminal;
    std::uint32_t next_index = 0;

    auto succ = [&](StateCode v) -> std::span<const StateCode> {
        if (!absorbing.empty() && absorbing[v]) return {};
        return ts.successors(v);
    };

    struct Frame {
        StateCode v;
        std::size_t pos;
    };
    std::vector<Frame> call;
    for (StateCode root = 0; root < count; ++root) {
        if (index[root] != kUnvisited) continue;
        call.push_back({root, 0});
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            auto out = succ(f.v);
            if (f.pos < out.size()) {
                StateCode w = out[f.pos++];
                if (index[w] == kUnvisited) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            StateCode v = f.v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == index[v]) {
                auto id = static_cast<std::uint32_t>(terminal.size());
                StateCode w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    component[w] = id;
                } while (w != v);
                terminal.push_back(true);
            }
        }
    }
    for (StateCode v = 0; v < count; ++v)
        for (StateCode w : succ(v))
            if (component[w] != component[v]) terminal[component[v]] = false;
    return {std::move(component), std::move(terminal)};
}

std::vector<bool> membership(std::size_t count, std::span<const StateCode> states) {
    std::vector<bool> in(count, false);
    for (StateCode s : states) {
        if (s >= count) throw std::out_of_range("state code out of range");
        in[s] = true;
    }
    return in;
}

std::vector<std::vector<StateCode>> reverse_graph(const ExplicitTS& ts, const std::vector<bool>& absorbing) {
    std::vector<std::vector<StateCode>> rev(ts.num_states());
    for (StateCode v = 0; v < ts.num_states(); ++v) {
        if (!absorbing.empty() && absorbing[v]) continue;
        for (StateCode w : ts.successors(v)) rev[w].push_back(v);
    }
    return rev;
}

std::vector<bool> backward_closure(const std::vector<std::vector<StateCode>>& rev, std::vector<bool> seed) {
    std::deque<StateCode> queue;
    for (StateCode v = 0; v < seed.size(); ++v)
        if (seed[v]) queue.push_back(v);
    while (!queue.empty()) {
        StateCode v = queue.front();
        queue.pop_front();
        for (StateCode u : rev[v]) {
            if (!seed[u]) {
                seed[u] = true;
                queue.push_back(u);
            }
        }
    }
    return seed;
}

std::vector<StateCode> listed(const std::vector<bool>& in) {
    std::vector<StateCode> out;
    for (StateCode v = 0; v < in.size(); ++v)
        if (in[v]) out.push_back(v);
    return out;
}

}  // namespace

std::vector<std::vector<StateCode>> explicit_attractors(const ExplicitTS& ts) {
    SccResult scc = tarjan(ts, {});
    std::vector<std::vector<StateCode>> out(scc.terminal.size());
    for (StateCode v = 0; v < ts.num_states(); ++v)
        if (scc.terminal[scc.component[v]]) out[scc.component[v]].push_back(v);
    std::erase_if(out, [](const auto& c) { return c.empty(); });
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a.front() < b.front();
    });
    return out;
}

std::vector<StateCode> explicit_weak_basin(const ExplicitTS& ts, std::span<const StateCode> target) {
    return listed(backward_closure(reverse_graph(ts, {}), membership(ts.num_states(), target)));
}

std::vector<StateCode> explicit_strong_basin(const ExplicitTS& ts, std::span<const StateCode> target) {
    const std::vector<bool> in_target = membership(ts.num_states(), target);
    SccResult scc = tarjan(ts, in_target);
    std::vector<bool> bad(ts.num_states(), false);
    for (StateCode v = 0; v < ts.num_states(); ++v)
        if (!in_target[v] && scc.terminal[scc.component[v]]) bad[v] = true;
    std::vector<bool> doomed = backward_closure(reverse_graph(ts, in_target), std::move(bad));
    std::vector<StateCode> out;
    for (StateCode v = 0; v < ts.num_states(); ++v)
        if (!doomed[v]) out.push_back(v);
    return out;
}

bool oracle_is_valid_ttc(const BooleanNetwork& network, const Control& control,
                         std::span<const StateCode> target_attractor) {
    const std::size_t n = network.size();
    if (n > kMaxValidityVars) throw std::length_error("validity oracle limited to 16 variables");
    control.check_arity(n);

    const ExplicitTS ts = build_ts(network);
    std::vector<StateCode> strong = explicit_strong_basin(ts, target_attractor);

    auto in_subspace = [&](StateCode code) {
        for (VarIndex i : control.zero_set())
            if ((code >> (n - 1 - i)) & 1u) return false;
        for (VarIndex i : control.one_set())
            if (!((code >> (n - 1 - i)) & 1u)) return false;
        return true;
    };
    std::vector<StateCode> remaining;
    std::copy_if(strong.begin(), strong.end(), std::back_inserter(remaining), in_subspace);
    if (remaining.empty()) return false;

    const ExplicitTS controlled = build_ts(network_under_control(network, control));
    const std::vector<bool> in_basin =
        membership(controlled.num_states(), explicit_strong_basin(controlled, remaining));
    for (StateCode code = 0; code < ts.num_states(); ++code) {
        StateCode intermediate = encode(apply_control(control, decode(code, n)));
        if (!in_basin[intermediate]) return false;
    }
    return true;
}

BooleanNetwork random_network(const RandomNetSpec& spec) {
    if (spec.n == 0) throw std::invalid_argument("random network needs n >= 1");
    if (spec.max_in_degree == 0) throw std::invalid_argument("random network needs K >= 1");
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = spec.n;

    std::vector<std::string> names;
    std::vector<Expression> functions;
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back("v" + std::to_string(i + 1));
        if (spec.identity_only) {
            functions.push_back(Expression::var(i));
            continue;
        }
        double roll = unit(rng);
        if (roll < spec.constant_probability) {
            functions.push_back(Expression::constant(unit(rng) < 0.5));
            continue;
        }
        if (roll < spec.constant_probability + spec.identity_probability) {
            functions.push_back(Expression::var(i));
            continue;
        }
        const std::size_t max_k = std::min(spec.max_in_degree, n);
        const std::size_t k = std::uniform_int_distribution<std::size_t>(1, max_k)(rng);
        std::vector<VarIndex> pool(n);
        for (std::size_t j = 0; j < n; ++j) pool[j] = j;
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(k);
        std::sort(pool.begin(), pool.end());

        std::vector<Expression> terms;
        for (VarIndex p : pool) {
            Expression lit = Expression::var(p);
            terms.push_back(unit(rng) < spec.negation_probability ? Expression::negate(lit) : lit);
        }
        const double and_share = spec.and_weight / (spec.and_weight + spec.or_weight);
        while (terms.size() > 1) {
            std::size_t a = std::uniform_int_distribution<std::size_t>(0, terms.size() - 1)(rng);
            Expression left = terms[a];
            terms.erase(terms.begin() + static_cast<std::ptrdiff_t>(a));
            std::size_t b = std::uniform_int_distribution<std::size_t>(0, terms.size() - 1)(rng);
            Expression right = terms[b];
            Expression joined = unit(rng) < and_share ? Expression::conj(left, right) : Expression::disj(left, right);
            if (unit(rng) < spec.negation_probability / 3) joined = Expression::negate(joined);
            terms[b] = joined;
        }
        functions.push_back(terms.front());
    }
    return BooleanNetwork(std::move(names), std::move(functions));
}

}  // namespace bnctl::oracle
