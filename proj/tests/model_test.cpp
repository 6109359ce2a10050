#include <gtest/gtest.h>

#include <random>

#include "bnctl/model.hpp"
#include "bnctl/oracle.hpp"
#include "test_support.hpp"

namespace bnctl {
namespace {

using testing::example1;

Expression v(VarIndex i) { return Expression::var(i); }

TEST(Parse, ExampleNetwork) {
    BooleanNetwork g = example1();
    ASSERT_EQ(g.size(), 3u);
    EXPECT_EQ(g.names(), (std::vector<std::string>{"x1", "x2", "x3"}));
    EXPECT_EQ(g.function(0), v(1));
    EXPECT_EQ(g.function(1), v(0));
    EXPECT_EQ(g.function(2), Expression::conj(v(1), v(2)));
    EXPECT_EQ(g.edge_count(), 4u);
}

TEST(Parse, SelfInput) {
    BooleanNetwork g = parse_network("targets, factors\na, a");
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g.function(0), v(0));
}

TEST(Parse, UndeclaredVariable) {
    try {
        parse_network("targets, factors\na, b");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_EQ(e.column(), 4u);
        EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos);
    }
}

TEST(Parse, DuplicateDeclaration) {
    try {
        parse_network("targets, factors\na, a\na, 1\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
    }
}

TEST(Parse, SyntaxErrorsCarryPosition) {
    struct Case {
        const char* text;
        std::size_t line;
        std::size_t column;
    };
    for (const Case& c : {Case{"targets, factors\na, (a & a\n", 2, 10}, Case{"targets, factors\na, a &\n", 2, 7},
                          Case{"targets, factors\na, a $ a\n", 2, 6}, Case{"targets, factors\na a\n", 2, 1},
                          Case{"targets factors\na, a\n", 1, 1}, Case{"# only a comment\n", 1, 1},
                          Case{"targets, factors\n1a, 1\n", 2, 1}, Case{"targets, factors\na, 12\n", 2, 5}}) {
        try {
            parse_network(c.text);
            ADD_FAILURE() << "accepted: " << c.text;
        } catch (const ParseError& e) {
            EXPECT_EQ(e.line(), c.line) << c.text;
            EXPECT_EQ(e.column(), c.column) << c.text;
        }
    }
}

TEST(Parse, CommentsWhitespaceAndConstants) {
    BooleanNetwork g = parse_network(
        "# header comes after comments\n"
        "\n"
        "targets, factors   # trailing\n"
        "  a ,\t1\n"
        "b, !a|0 # comment\r\n");
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g.function(0), Expression::constant(true));
    EXPECT_EQ(g.function(1), Expression::disj(Expression::negate(v(0)), Expression::constant(false)));
}

TEST(Parse, PrecedenceAndAssociativity) {
    BooleanNetwork g = parse_network("targets, factors\na, !a & b | c\nb, a | b & c\nc, a & b & c\n");
    EXPECT_EQ(g.function(0), Expression::disj(Expression::conj(Expression::negate(v(0)), v(1)), v(2)));
    EXPECT_EQ(g.function(1), Expression::disj(v(0), Expression::conj(v(1), v(2))));
    EXPECT_EQ(g.function(2), Expression::conj(Expression::conj(v(0), v(1)), v(2)));
}

TEST(Parse, ForwardReferencesResolve) {
    BooleanNetwork g = parse_network("targets, factors\na, c\nb, a\nc, b\n");
    EXPECT_EQ(g.function(0), v(2));
}

TEST(Eval, Examples) {
    BooleanNetwork g = example1();
    EXPECT_TRUE(g.function(2).eval(State::from_string("011")));
    EXPECT_FALSE(g.function(2).eval(State::from_string("001")));
    for (const char* s : {"000", "101", "111"})
        EXPECT_TRUE(Expression::constant(true).eval(State::from_string(s)));
}

TEST(Expression, SupportAndSimplify) {
    Expression e = Expression::disj(Expression::conj(v(2), v(0)), Expression::negate(v(2)));
    EXPECT_EQ(e.support(), (std::vector<VarIndex>{0, 2}));
    EXPECT_EQ(Expression::disj(v(0), Expression::negate(v(0))).simplified(), Expression::constant(true));
    EXPECT_EQ(Expression::conj(v(1), Expression::negate(v(1))).simplified(), Expression::constant(false));
    EXPECT_EQ(Expression::negate(Expression::negate(v(3))).simplified(), v(3));
    EXPECT_EQ(Expression::conj(v(1), Expression::constant(true)).simplified(), v(1));
    EXPECT_EQ(Expression::disj(Expression::conj(v(1), Expression::constant(false)), v(1)).simplified(), v(1));
    EXPECT_EQ(Expression::conj(v(1), v(1)).simplified(), v(1));
}

TEST(Network, RejectsBrokenInvariants) {
    EXPECT_THROW(BooleanNetwork({}, {}), std::invalid_argument);
    EXPECT_THROW(BooleanNetwork({"a"}, {}), std::invalid_argument);
    EXPECT_THROW(BooleanNetwork({"a", "a"}, {v(0), v(1)}), std::invalid_argument);
    EXPECT_THROW(BooleanNetwork({""}, {v(0)}), std::invalid_argument);
    EXPECT_THROW(BooleanNetwork({"a"}, {v(1)}), std::invalid_argument);
    BooleanNetwork g = example1();
    EXPECT_EQ(g.index_of("x3"), 2u);
    EXPECT_THROW(g.index_of("x4"), std::out_of_range);
}

TEST(State, StringsAndOrder) {
    State s = State::from_string("0110");
    EXPECT_EQ(s.to_string(), "0110");
    EXPECT_TRUE(State::from_string("011") < State::from_string("100"));
    EXPECT_THROW(State::from_string("01x"), std::invalid_argument);
    EXPECT_EQ(hamming_distance(State::from_string("0110"), State::from_string("1100")), 2u);
}

TEST(ApplyControl, Examples) {
    EXPECT_EQ(apply_control(Control({1}, {}), State::from_string("110")), State::from_string("100"));
    EXPECT_EQ(apply_control(Control(), State::from_string("101")), State::from_string("101"));
    EXPECT_EQ(apply_control(Control({0}, {2}), State::from_string("100")), State::from_string("001"));
    EXPECT_THROW(apply_control(Control({3}, {}), State::from_string("100")), std::out_of_range);
}

TEST(Control, Construction) {
    EXPECT_THROW(Control({1}, {1}), std::invalid_argument);
    Control c({2, 0}, {1});
    EXPECT_EQ(c.zero_set(), (std::vector<VarIndex>{0, 2}));
    EXPECT_EQ(c.size(), 3u);
    std::vector<Literal> lits{{2, false}, {1, true}, {0, false}};
    EXPECT_EQ(Control::from_literals(lits), c);
    EXPECT_EQ(c.literals(), (std::vector<Literal>{{0, false}, {1, true}, {2, false}}));
    EXPECT_EQ(Control({0}, {}).merged(Control({}, {1})), Control({0}, {1}));
    EXPECT_THROW(Control({0}, {}).merged(Control({}, {0})), std::invalid_argument);
}

TEST(NetworkUnderControl, Examples) {
    BooleanNetwork g = example1();
    BooleanNetwork gc = network_under_control(g, Control({1}, {}));
    EXPECT_EQ(gc.function(0), v(1));
    EXPECT_EQ(gc.function(1), Expression::constant(false));
    EXPECT_EQ(gc.function(2), Expression::conj(v(1), v(2)));
    EXPECT_EQ(network_under_control(g, Control()), g);
    BooleanNetwork gd = network_under_control(g, Control({0}, {2}));
    EXPECT_EQ(gd.function(0), Expression::constant(false));
    EXPECT_EQ(gd.function(1), v(0));
    EXPECT_EQ(gd.function(2), Expression::constant(true));
    EXPECT_EQ(gd.names(), g.names());
    EXPECT_THROW(network_under_control(g, Control({5}, {})), std::out_of_range);
}

TEST(Classify, Examples) {
    BooleanNetwork g2 = parse_network("targets, factors\nx1, x1\nx2, 1\nx3, x1 & x2\n");
    NodeClassification c = classify_input_nodes(g2);
    EXPECT_EQ(c.inputs, (std::vector<VarIndex>{0, 1}));
    EXPECT_EQ(c.non_specified, (std::vector<VarIndex>{0}));
    EXPECT_EQ(c.specified, (std::vector<VarIndex>{1}));

    NodeClassification e = classify_input_nodes(example1());
    EXPECT_TRUE(e.inputs.empty());
    EXPECT_TRUE(e.specified.empty());
    EXPECT_TRUE(e.non_specified.empty());

    NodeClassification t = classify_input_nodes(parse_network("targets, factors\nx1, x1 | !x1\n"));
    EXPECT_EQ(t.specified, (std::vector<VarIndex>{0}));
}

TEST(Classify, NegatedSelfLoopIsNotAnInput) {
    NodeClassification c = classify_input_nodes(parse_network("targets, factors\na, !a\nb, b & (a | !a)\n"));
    EXPECT_EQ(c.inputs, (std::vector<VarIndex>{1}));
    EXPECT_EQ(c.non_specified, (std::vector<VarIndex>{1}));
    EXPECT_FALSE(c.is_input(0));
    EXPECT_TRUE(c.is_non_specified(1));
}

TEST(Schema, ContainsAndProjection) {
    Schema w1 = Schema::from_string("0**");
    std::vector<std::string> members;
    for (unsigned code = 0; code < 8; ++code) {
        State s = oracle::decode(code, 3);
        if (w1.contains(s)) members.push_back(s.to_string());
    }
    EXPECT_EQ(members, (std::vector<std::string>{"000", "001", "010", "011"}));
    EXPECT_EQ(w1.zero_set(), (std::vector<VarIndex>{0}));
    EXPECT_EQ(w1.dont_care_set(), (std::vector<VarIndex>{1, 2}));
    EXPECT_EQ(w1.support(), Control({0}, {}));

    std::vector<VarIndex> b{1, 2};
    EXPECT_EQ(projection(State::from_string("011"), b), "11");
    std::vector<VarIndex> bad{3};
    EXPECT_THROW(projection(State::from_string("011"), bad), std::out_of_range);

    Schema all = Schema::from_string("***");
    for (unsigned code = 0; code < 8; ++code) EXPECT_TRUE(all.contains(oracle::decode(code, 3)));

    EXPECT_EQ(Schema::of_control(3, Control({0}, {2})).to_string(), "0*1");
    EXPECT_TRUE(Schema::from_string("01*").subset_of(Schema::from_string("0**")));
    EXPECT_FALSE(Schema::from_string("0**").subset_of(Schema::from_string("01*")));
    EXPECT_THROW(Schema::from_string("0?1"), std::invalid_argument);
}

TEST(Schema, CardinalityIsPowerOfDontCares) {
    // every schema exhaustively for small n, random schemata up to n = 16
    for (std::size_t n = 1; n <= 5; ++n) {
        std::size_t schemata = 1;
        for (std::size_t i = 0; i < n; ++i) schemata *= 3;
        for (std::size_t code = 0; code < schemata; ++code) {
            std::vector<Trit> marks;
            for (std::size_t i = 0, c = code; i < n; ++i, c /= 3) marks.push_back(static_cast<Trit>(c % 3));
            Schema w(marks);
            std::size_t count = 0;
            for (oracle::StateCode s = 0; s < (1u << n); ++s) count += w.contains(oracle::decode(s, n));
            EXPECT_EQ(count, std::size_t{1} << w.dont_care_set().size()) << w.to_string();
        }
    }
    std::mt19937_64 rng(7);
    for (std::size_t n = 6; n <= 16; ++n) {
        for (int rep = 0; rep < 3; ++rep) {
            std::vector<Trit> marks;
            for (std::size_t i = 0; i < n; ++i) marks.push_back(static_cast<Trit>(rng() % 3));
            Schema w(marks);
            std::size_t count = 0;
            for (oracle::StateCode s = 0; s < (1u << n); ++s) count += w.contains(oracle::decode(s, n));
            EXPECT_EQ(count, std::size_t{1} << w.dont_care_set().size()) << w.to_string();
        }
    }
}

Control random_control(std::size_t n, std::mt19937_64& rng) {
    std::vector<VarIndex> zero, one;
    for (VarIndex i = 0; i < n; ++i) {
        switch (rng() % 3) {
        case 0: zero.push_back(i); break;
        case 1: one.push_back(i); break;
        default: break;
        }
    }
    return Control(zero, one);
}

State random_state(std::size_t n, std::mt19937_64& rng) {
    State s(n);
    for (VarIndex i = 0; i < n; ++i) s.set(i, rng() & 1);
    return s;
}

TEST(ApplyControl, IdempotentAndWithinHammingBound) {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 2000; ++rep) {
        std::size_t n = 1 + rng() % 12;
        Control c = random_control(n, rng);
        State s = random_state(n, rng);
        State once = apply_control(c, s);
        EXPECT_EQ(apply_control(c, once), once);
        EXPECT_LE(hamming_distance(s, once), c.size());
        EXPECT_TRUE(Schema::of_control(n, c).contains(once));
    }
}

TEST(NetworkUnderControl, AgreesWithPinnedEvaluation) {
    std::mt19937_64 rng(5);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        BooleanNetwork g = oracle::random_network(testing::random_spec(seed, 2, 8));
        Control c = random_control(g.size(), rng);
        BooleanNetwork gc = network_under_control(g, c);
        for (oracle::StateCode code = 0; code < (1u << g.size()); ++code) {
            State s = oracle::decode(code, g.size());
            for (VarIndex i = 0; i < g.size(); ++i) {
                bool expected = g.function(i).eval(s);
                if (std::binary_search(c.zero_set().begin(), c.zero_set().end(), i)) expected = false;
                if (std::binary_search(c.one_set().begin(), c.one_set().end(), i)) expected = true;
                ASSERT_EQ(gc.function(i).eval(s), expected);
            }
        }
    }
}

TEST(TextFormat, RoundTripsRandomNetworks) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        oracle::RandomNetSpec spec = testing::random_spec(seed, 1, 12, 1 + seed % 4);
        BooleanNetwork g = oracle::random_network(spec);
        std::string text = to_bnet(g);
        BooleanNetwork back = parse_network(text);
        ASSERT_EQ(back, g) << text;
        EXPECT_EQ(to_bnet(back), text);
    }
}

TEST(TextFormat, RoundTripsNestedParentheses) {
    const char* text = "targets, factors\na, !(a | b) & (b | !c)\nb, a | (b | c)\nc, a & (b & c) | !!c\n";
    BooleanNetwork g = parse_network(text);
    EXPECT_EQ(parse_network(to_bnet(g)), g);
    EXPECT_EQ(to_string(g.function(1), g.names()), "a | (b | c)");
}

TEST(Classify, PartitionsInputsOnRandomNetworks) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        oracle::RandomNetSpec spec = testing::random_spec(seed, 1, 10);
        spec.identity_probability = 0.2;
        spec.constant_probability = 0.2;
        NodeClassification c = classify_input_nodes(oracle::random_network(spec));
        std::vector<VarIndex> joined = c.specified;
        joined.insert(joined.end(), c.non_specified.begin(), c.non_specified.end());
        std::sort(joined.begin(), joined.end());
        EXPECT_EQ(joined, c.inputs);
        EXPECT_EQ(std::adjacent_find(joined.begin(), joined.end()), joined.end());
    }
}

}  // namespace
}  // namespace bnctl
