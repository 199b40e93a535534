#include "rayner/cli.hpp"

#include "support/helpers.hpp"
#include "support/random_expr.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace rayner;
using namespace rayner::cli;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(const std::vector<std::string>& args)
{
    std::ostringstream out;
    std::ostringstream err;
    int code = run_command(args, out, err);
    return {code, out.str(), err.str()};
}

SessionConfig config_for(const std::string& group, const std::string& field)
{
    SessionConfig c;
    c.group = parse_group(group);
    c.field = parse_field(field);
    return c;
}

TermList eval_text(const std::string& text, const SessionConfig& c, const GroupElement& bound)
{
    return coefficients_up_to(to_series(parse_expression(text, c), c), Horizon(bound));
}

} // namespace

TEST(Parser, InverseOfSum)
{
    Ast a = parse_expression("inv(1 - t^(1) - t^(2))", SessionConfig{});
    EXPECT_EQ(a.kind, Ast::Kind::Inv);
    ASSERT_EQ(a.children.size(), 1U);
    EXPECT_EQ(a.children[0].kind, Ast::Kind::Sub);
    EXPECT_FALSE(a.exponent.has_value());
    EXPECT_TRUE(has_unwitnessed_inverse(a));
}

TEST(Parser, TruncationNode)
{
    Ast a = parse_expression("trunc(1 + 2*t^(1) + 3*t^(2), 2)", SessionConfig{});
    EXPECT_EQ(a.kind, Ast::Kind::Trunc);
    EXPECT_EQ(a.exponent->to_string(), "2");
}

TEST(Parser, WitnessedInverseAndTuples)
{
    SessionConfig c = config_for("Z^2", "Q");
    Ast a = parse_expression("inv(t^((1,-2)) + t^((2,0)); g0=(1,-2))", c);
    EXPECT_EQ(a.kind, Ast::Kind::Inv);
    EXPECT_EQ(a.exponent->to_string(), "(1,-2)");
    EXPECT_FALSE(has_unwitnessed_inverse(a));
}

TEST(Parser, ReportsColumnOfUnclosedExponent)
{
    try {
        parse_expression("t^(1/2", config_for("Q", "Q"));
        FAIL() << "expected a syntax error";
    } catch (const parse_error& e) {
        EXPECT_EQ(e.line(), 1U);
        EXPECT_EQ(e.column(), 7U);
    }
}

TEST(Parser, RejectsBadInput)
{
    EXPECT_THROW(parse_expression("1 +", SessionConfig{}), parse_error);
    EXPECT_THROW(parse_expression("foo(1)", SessionConfig{}), parse_error);
    EXPECT_THROW(parse_expression("t^(1/2)", SessionConfig{}), parse_error);
    EXPECT_THROW(parse_expression("1 2", SessionConfig{}), parse_error);
    EXPECT_THROW(parse_field("F4"), error);
    EXPECT_THROW(parse_field("R"), error);
    EXPECT_THROW(parse_group("Z^0"), error);
    EXPECT_THROW(parse_group("N"), error);
}

TEST(Parser, Descriptors)
{
    EXPECT_EQ(parse_group("Z^3"), GroupDescriptor::lex_product(3));
    EXPECT_EQ(parse_group("trivial"), GroupDescriptor::trivial());
    EXPECT_EQ(parse_field("F7"), FieldDescriptor::prime_field(7));
    EXPECT_EQ(parse_field("F3(x)"), FieldDescriptor::rational_functions(3));
    EXPECT_EQ(parse_exponent("-5/6", GroupDescriptor::rationals()).to_string(), "-5/6");
    EXPECT_EQ(parse_family("W(Z>=0)", GroupDescriptor::integers()).to_string(), "W(Z>=0)");
    EXPECT_EQ(parse_family("FIN(Z)", GroupDescriptor::integers()).kind, FamilyDescriptor::Kind::FIN);
    FamilyDescriptor e = parse_family("explicit{{},{0},{0,1}}", GroupDescriptor::integers());
    EXPECT_EQ(e.members.size(), 3U);
    EXPECT_EQ(parse_family("W(mon{2,3})", GroupDescriptor::integers()).region.kind, Region::Kind::SubmonoidGen);
}

TEST(Parser, RationalFunctionCoefficients)
{
    SessionConfig c = config_for("Z", "F3(x)");
    TermList list = eval_text("(x^2 + 1)/x*t^(1)", c, testing_support::z(3));
    EXPECT_EQ(to_text(list), "((x^2+1)/x)*t^(1)");
    EXPECT_THROW(to_series(parse_expression("x*t^(1)", SessionConfig{}), SessionConfig{}), precondition_violation);
}

TEST(Commands, FibonacciEval)
{
    CliResult r = run({"eval", "inv(1 - t^(1) - t^(2))", "--group", "Z", "--field", "Q", "--exp-bound", "6"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "1 + 1*t^(1) + 2*t^(2) + 3*t^(3) + 5*t^(4) + 8*t^(5) + 13*t^(6)\n");
}

TEST(Commands, ExitCodes)
{
    EXPECT_EQ(run({"eval", "t^(1/2", "--group", "Q"}).code, 2);
    EXPECT_EQ(run({"eval", "inv(1 - t^(1))"}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"check-family", "W(Z)", "--condition", "S9"}).code, 2);
    EXPECT_EQ(run({"eval", "t^(1)", "--field", "F4"}).code, 2);
    EXPECT_EQ(run({"vmin", "(1+t^(1))*(1-t^(1)) - 1 + t^(2)", "--exp-bound", "10"}).code, 3);
    EXPECT_EQ(run({"invert", "1 - t^((0,1))", "--group", "Z^2", "--exp-bound", "(1,0)", "--term-bound", "5"}).code, 3);
    EXPECT_EQ(run({"suite", "--filter", "fp-gap"}).code, 0);
    EXPECT_EQ(run({"suite", "--filter", "no-such"}).code, 2);
    EXPECT_EQ(run({"vmin", "3*t^(2) + t^(5)"}).code, 0);
}

TEST(Commands, Subcommands)
{
    EXPECT_EQ(run({"vmin", "3*t^(2) + t^(5)"}).out, "2\n");
    EXPECT_EQ(run({"trunc", "1 + 2*t^(1) + 3*t^(2)", "2"}).out, "1 + 2*t^(1)\n");
    EXPECT_EQ(run({"trunc", "1 + 2*t^(1) + 3*t^(2)", "2", "--inclusive"}).out, "1 + 2*t^(1) + 3*t^(2)\n");
    EXPECT_EQ(run({"support", "t^(2) + t^(3)", "--exp-bound", "10"}).out, "{2,3}\n");
    EXPECT_EQ(run({"invert", "1 - t^(1)", "--exp-bound", "3"}).out, "1 + 1*t^(1) + 1*t^(2) + 1*t^(3)\n");
    EXPECT_EQ(run({"invert", "2*t^(3) + t^(4)", "--g0", "3", "--exp-bound", "-1"}).out, "1/2*t^(-3) - 1/4*t^(-2) + 1/8*t^(-1)\n");
    CliResult check = run({"check-family", "W(Z>=0)", "--condition", "S1"});
    EXPECT_EQ(check.code, 0);
    EXPECT_NE(check.out.find("S1: fails"), std::string::npos);
    CliResult classify = run({"classify", "--field", "Q", "--family", "W(Z>=0)"});
    EXPECT_NE(classify.out.find("subring: yes"), std::string::npos);
    EXPECT_NE(classify.out.find("subfield: no"), std::string::npos);
}

TEST(Commands, ClassifyJson)
{
    CliResult r = run({"classify", "--field", "Q", "--family", "W(Z>=0)", "--json"});
    ASSERT_EQ(r.code, 0);
    json j = json::parse(r.out);
    EXPECT_EQ(j["flags"]["subring"]["value"], "yes");
    EXPECT_EQ(j["flags"]["subfield"]["value"], "no");
    EXPECT_TRUE(j["conditions"]["A3"].contains("witness"));
}

TEST(Commands, EvalJson)
{
    CliResult r = run({"eval", "1 - 2/3*t^(5/2)", "--group", "Q", "--exp-bound", "3", "--json"});
    ASSERT_EQ(r.code, 0);
    json j = json::parse(r.out);
    EXPECT_EQ(j["terms"][1]["exp"], "5/2");
    EXPECT_EQ(j["terms"][1]["coef"], "-2/3");
    EXPECT_EQ(j["complete"], true);
}

// Property: identical argv and seed give byte-identical JSON.
TEST(CommandsProperty, Deterministic)
{
    const std::vector<std::vector<std::string>> cases{
        {"suite", "--json", "--seed", "7"},
        {"classify", "--field", "F5", "--family", "explicit{{},{0},{1},{0,1}}", "--json"},
        {"check-family", "FIN(Z)", "--json"},
        {"eval", "inv(1 - t^(1/3) + t^(2))", "--group", "Q", "--exp-bound", "3", "--json"}};
    for (const auto& args : cases) {
        CliResult a = run(args);
        CliResult b = run(args);
        EXPECT_EQ(a.code, b.code);
        EXPECT_EQ(a.out, b.out) << args[0];
        EXPECT_FALSE(a.out.empty()) << args[0];
    }
}

// Property: parse ∘ print ∘ parse = parse on random expressions.
TEST(ParserProperty, PrintRoundTrip)
{
    testing_support::ExprGenerator<oracle::RationalOps> gen({}, 40, 16, 9);
    const SessionConfig c;
    for (int i = 0; i < 200; ++i) {
        const std::string text = gen.generate(3).text;
        Ast a = parse_expression(text, c);
        Ast b = parse_expression(print(a), c);
        ASSERT_EQ(a, b) << text << "\nprinted: " << print(a);
        ASSERT_EQ(print(a), print(b));
    }
    for (const std::string text : {"-(1 - t^(1))*x^3/(2 - x)", "inv(t^(1/2) - 3; g0=1/2) - -t^(-1)"}) {
        SessionConfig k = config_for("Q", "F5(x)");
        Ast a = parse_expression(text, k);
        ASSERT_EQ(a, parse_expression(print(a), k)) << text;
    }
}

// Property: printing an evaluated TermList and re-parsing it re-evaluates to the same TermList.
TEST(ParserProperty, TermListTextRoundTrip)
{
    struct Case {
        std::string group;
        std::string field;
        std::string text;
        std::string bound;
    };
    std::vector<Case> cases{{"Z", "Q", "inv(1 - t^(1) - t^(2))", "12"},
                            {"Q", "Q", "inv(3 - 2/5*t^(1/2) + t^(7/3))", "3"},
                            {"Z", "F3(x)", "inv(x - t^(1)*(x^2+1)/x)", "5"},
                            {"Z^2", "F5", "inv(2 - t^((0,1)) + t^((1,-3)))", "(0,6)"},
                            {"Z", "F2", "inv(1 + t^(1) + t^(2))", "15"}};
    testing_support::ExprGenerator<oracle::RationalOps> gen({}, 40, 17, 5);
    for (int i = 0; i < 100; ++i) {
        cases.push_back({"Z", "Q", gen.generate(3).text, "40"});
    }
    for (const auto& tc : cases) {
        SessionConfig c = config_for(tc.group, tc.field);
        const GroupElement bound = parse_exponent(tc.bound, c.group);
        TermList first = eval_text(tc.text, c, bound);
        TermList second = eval_text(to_text(first), c, bound);
        ASSERT_EQ(first.terms(), second.terms()) << tc.text << "\n" << to_text(first);
    }
}

// Property: evaluation of parsed expressions matches the dense oracle.
TEST(ParserProperty, OracleAgreement)
{
    const GroupElement bound = testing_support::z(40);
    testing_support::ExprGenerator<oracle::RationalOps> qgen({}, 40, 18, 5);
    for (int i = 0; i < 60; ++i) {
        auto e = qgen.generate(3);
        TermList list = eval_text(e.text, SessionConfig{}, bound);
        ASSERT_EQ(testing_support::dense_q(list, 40).c, e.value.c) << e.text;
    }
    for (std::uint64_t p : {2, 5}) {
        testing_support::ExprGenerator<oracle::ModPOps> pgen({p}, 40, 19 + p, 5);
        SessionConfig c = config_for("Z", "F" + std::to_string(p));
        for (int i = 0; i < 40; ++i) {
            auto e = pgen.generate(3);
            TermList list = eval_text(e.text, c, bound);
            ASSERT_EQ(testing_support::dense_p(list, 40, p).c, e.value.c) << e.text;
        }
    }
}

TEST(Golden, FibonacciFileMatchesCommand)
{
    std::ifstream in(std::string(RAYNER_GOLDEN_DIR) + "/cli/eval_fibonacci.out");
    std::stringstream expected;
    expected << in.rdbuf();
    CliResult r = run({"eval", "inv(1 - t^(1) - t^(2))", "--group", "Z", "--field", "Q", "--exp-bound", "6"});
    EXPECT_EQ(r.out, expected.str());
}
