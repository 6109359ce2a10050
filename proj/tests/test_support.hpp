#pragma once

#include <string>
#include <vector>

#include "bnctl/diagram.hpp"
#include "bnctl/model.hpp"
#include "bnctl/oracle.hpp"

namespace bnctl::testing {

inline BooleanNetwork example1() {
    return parse_network("targets, factors\nx1, x2\nx2, x1\nx3, x2 & x3\n");
}

inline std::vector<State> states_of(const std::vector<std::string>& bits) {
    std::vector<State> out;
    for (const auto& b : bits) out.push_back(State::from_string(b));
    return out;
}

inline bdd::StateSet set_of(bdd::Manager& mgr, const std::vector<std::string>& bits) {
    auto states = states_of(bits);
    return mgr.from_states(states);
}

inline std::vector<std::string> strings_of(bdd::Manager& mgr, const bdd::StateSet& p) {
    std::vector<std::string> out;
    for (const State& s : mgr.states(p)) out.push_back(s.to_string());
    return out;
}

inline std::vector<oracle::StateCode> codes_of(bdd::Manager& mgr, const bdd::StateSet& p) {
    std::vector<oracle::StateCode> out;
    for (const State& s : mgr.states(p)) out.push_back(oracle::encode(s));
    return out;  // states() is sorted lexicographically, which is code order
}

inline bdd::StateSet set_of_codes(bdd::Manager& mgr, const std::vector<oracle::StateCode>& codes) {
    std::vector<State> states;
    for (auto c : codes) states.push_back(oracle::decode(c, mgr.num_vars()));
    return mgr.from_states(states);
}

/// Controls of size <= max_size over n variables, in a fixed order.
inline std::vector<Control> all_controls(std::size_t n, std::size_t max_size) {
    std::vector<Control> out;
    std::vector<Literal> lits;
    auto rec = [&](auto&& self, VarIndex from) -> void {
        out.push_back(Control::from_literals(lits));
        if (lits.size() == max_size) return;
        for (VarIndex i = from; i < n; ++i) {
            for (bool v : {false, true}) {
                lits.push_back({i, v});
                self(self, i + 1);
                lits.pop_back();
            }
        }
    };
    rec(rec, 0);
    return out;
}

/// Random mix of sizes and operator weights used across the property suites.
inline oracle::RandomNetSpec random_spec(std::uint64_t seed, std::size_t n_min, std::size_t n_max,
                                         std::size_t k = 3) {
    oracle::RandomNetSpec spec;
    spec.seed = seed;
    spec.n = n_min + static_cast<std::size_t>(seed * 2654435761u % (n_max - n_min + 1));
    spec.max_in_degree = k;
    return spec;
}

}  // namespace bnctl::testing
