#pragma once

// Command-line front end: expression and descriptor parsers plus the
// subcommand runner used by tools/rayner.cpp. Everything here is usable
// in-process so tests can drive the exact code path of the binary.

#include <cctype>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rayner/coefficients.hpp"
#include "rayner/error.hpp"
#include "rayner/exponents.hpp"
#include "rayner/json_io.hpp"
#include "rayner/series.hpp"
#include "rayner/supports.hpp"
#include "rayner/theorems.hpp"

namespace rayner::cli {

struct SessionConfig {
    GroupDescriptor group = GroupDescriptor::integers();
    FieldDescriptor field = FieldDescriptor::rationals();
    std::optional<GroupElement> exp_bound;
    std::size_t term_bound = 10000;
    bool json_output = false;
    std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Lexer

struct Token {
    enum class Kind { Number, Ident, Symbol, End };
    Kind kind = Kind::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string input) : input_(std::move(input)) { advance(); }

    const Token& peek() const noexcept { return current_; }

    Token take()
    {
        Token t = current_;
        advance();
        return t;
    }

    bool accept(const std::string& symbol)
    {
        if (current_.kind == Token::Kind::Symbol && current_.text == symbol) {
            advance();
            return true;
        }
        return false;
    }

    bool accept_ident(const std::string& name)
    {
        if (current_.kind == Token::Kind::Ident && current_.text == name) {
            advance();
            return true;
        }
        return false;
    }

    void expect(const std::string& symbol)
    {
        if (!accept(symbol)) {
            fail("expected '" + symbol + "'");
        }
    }

    [[noreturn]] void fail(const std::string& what) const { fail_at(current_, what); }

    [[noreturn]] static void fail_at(const Token& t, const std::string& what)
    {
        const std::string found = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
        throw parse_error(what + ", found " + found, t.line, t.column);
    }

private:
    void advance()
    {
        while (pos_ < input_.size() && std::isspace(static_cast<unsigned char>(input_[pos_]))) {
            step();
        }
        current_ = Token{};
        current_.line = line_;
        current_.column = column_;
        if (pos_ >= input_.size()) {
            return;
        }
        const char c = input_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            current_.kind = Token::Kind::Number;
            while (pos_ < input_.size() && std::isdigit(static_cast<unsigned char>(input_[pos_]))) {
                current_.text += input_[pos_];
                step();
            }
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            current_.kind = Token::Kind::Ident;
            while (pos_ < input_.size() && std::isalnum(static_cast<unsigned char>(input_[pos_]))) {
                current_.text += input_[pos_];
                step();
            }
            return;
        }
        current_.kind = Token::Kind::Symbol;
        current_.text = std::string(1, c);
        step();
        if (c == '>' && pos_ < input_.size() && input_[pos_] == '=') {
            current_.text += '=';
            step();
        }
        static const std::string symbols = "+-*/^(),;={}>";
        if (current_.text.size() == 1 && symbols.find(c) == std::string::npos) {
            throw parse_error("unexpected character '" + current_.text + "'", current_.line, current_.column);
        }
    }

    void step()
    {
        if (input_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    std::string input_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
    Token current_;
};

// ---------------------------------------------------------------------------
// Exponents and descriptors

namespace detail {

inline BigInt parse_int(const Token& t) { return BigInt(t.text); }

inline BigRational parse_signed_rational(Lexer& lex)
{
    const bool negative = lex.accept("-");
    if (lex.peek().kind != Token::Kind::Number) {
        lex.fail("expected a number");
    }
    BigRational value(parse_int(lex.take()));
    if (lex.accept("/")) {
        if (lex.peek().kind != Token::Kind::Number) {
            lex.fail("expected a denominator");
        }
        const Token den = lex.take();
        if (parse_int(den) == 0) {
            Lexer::fail_at(den, "zero denominator");
        }
        value /= BigRational(parse_int(den));
    }
    return negative ? BigRational(-value) : value;
}

} // namespace detail

/// Exponent as written, before it is checked against a group.
struct RawExponent {
    Token start;
    std::vector<BigRational> coords;
};

/// `3`, `-5/2`, or a tuple `(1,-2)`.
inline RawExponent parse_raw_exponent(Lexer& lex)
{
    RawExponent raw{lex.peek(), {}};
    if (lex.accept("(")) {
        raw.coords.push_back(detail::parse_signed_rational(lex));
        while (lex.accept(",")) {
            raw.coords.push_back(detail::parse_signed_rational(lex));
        }
        lex.expect(")");
    } else {
        raw.coords.push_back(detail::parse_signed_rational(lex));
    }
    return raw;
}

/// Checks shape and integrality; `0` is the only exponent of the trivial group.
inline GroupElement make_exponent(RawExponent raw, const GroupDescriptor& group)
{
    try {
        if (group.is_trivial()) {
            if (raw.coords.size() != 1 || raw.coords[0] != 0) {
                throw precondition_violation("the trivial group has only the exponent 0");
            }
            return GroupElement(group);
        }
        if (group.kind() != GroupDescriptor::Kind::LexProduct && raw.coords.size() != 1) {
            throw precondition_violation("tuple exponent in " + group.name());
        }
        return GroupElement(group, std::move(raw.coords));
    } catch (const error& e) {
        throw parse_error(std::string("invalid exponent for ") + group.name() + " (" + e.what() + ")", raw.start.line,
                          raw.start.column);
    }
}

inline GroupElement parse_exponent(Lexer& lex, const GroupDescriptor& group)
{
    return make_exponent(parse_raw_exponent(lex), group);
}

inline GroupElement parse_exponent(const std::string& text, const GroupDescriptor& group)
{
    Lexer lex(text);
    GroupElement g = parse_exponent(lex, group);
    if (lex.peek().kind != Token::Kind::End) {
        lex.fail("unexpected trailing input");
    }
    return g;
}

/// `Z`, `Q`, `Z^n`, `trivial`.
inline GroupDescriptor parse_group(Lexer& lex)
{
    const Token t = lex.peek();
    if (lex.accept_ident("Z")) {
        if (lex.accept("^")) {
            if (lex.peek().kind != Token::Kind::Number) {
                lex.fail("expected a rank");
            }
            const Token n = lex.take();
            const BigInt rank = detail::parse_int(n);
            if (rank < 1 || rank > static_cast<long long>(max_lex_rank)) {
                Lexer::fail_at(n, "rank must lie in 1.." + std::to_string(max_lex_rank));
            }
            return GroupDescriptor::lex_product(static_cast<std::size_t>(rank));
        }
        return GroupDescriptor::integers();
    }
    if (lex.accept_ident("Q")) {
        return GroupDescriptor::rationals();
    }
    if (lex.accept_ident("trivial")) {
        return GroupDescriptor::trivial();
    }
    Lexer::fail_at(t, "unknown group");
}

inline GroupDescriptor parse_group(const std::string& text)
{
    Lexer lex(text);
    GroupDescriptor g = parse_group(lex);
    if (lex.peek().kind != Token::Kind::End) {
        lex.fail("unexpected trailing input");
    }
    return g;
}

/// `Q`, `F<p>`, `F<p>(x)`.
inline FieldDescriptor parse_field(const std::string& text)
{
    Lexer lex(text);
    const Token t = lex.take();
    if (t.kind == Token::Kind::Ident && t.text == "Q" && lex.peek().kind == Token::Kind::End) {
        return FieldDescriptor::rationals();
    }
    if (t.kind != Token::Kind::Ident || t.text.size() < 2 || t.text[0] != 'F'
        || !std::all_of(t.text.begin() + 1, t.text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        Lexer::fail_at(t, "unknown field (expected Q, Fp or Fp(x))");
    }
    const std::string digits = t.text.substr(1);
    if (digits.size() > 10) {
        Lexer::fail_at(t, "characteristic too large");
    }
    const std::uint64_t p = std::stoull(digits);
    bool rational_functions = false;
    if (lex.accept("(")) {
        if (!lex.accept_ident("x")) {
            lex.fail("expected 'x'");
        }
        lex.expect(")");
        rational_functions = true;
    }
    if (lex.peek().kind != Token::Kind::End) {
        lex.fail("unexpected trailing input");
    }
    try {
        return rational_functions ? FieldDescriptor::rational_functions(p) : FieldDescriptor::prime_field(p);
    } catch (const error& e) {
        Lexer::fail_at(t, e.what());
    }
}

namespace detail {

inline std::vector<GroupElement> parse_element_set(Lexer& lex, const GroupDescriptor& group)
{
    lex.expect("{");
    std::vector<GroupElement> out;
    if (lex.accept("}")) {
        return out;
    }
    out.push_back(parse_exponent(lex, group));
    while (lex.accept(",")) {
        out.push_back(parse_exponent(lex, group));
    }
    lex.expect("}");
    return out;
}

inline Region parse_region(Lexer& lex, const GroupDescriptor& fallback)
{
    if (lex.accept_ident("mon")) {
        return Region::submonoid(fallback, parse_element_set(lex, fallback));
    }
    if (lex.accept_ident("grp")) {
        return Region::subgroup(fallback, parse_element_set(lex, fallback));
    }
    if (lex.accept_ident("set")) {
        return Region::finite_set(fallback, parse_element_set(lex, fallback));
    }
    GroupDescriptor g = parse_group(lex);
    if (lex.accept(">=")) {
        const Token z = lex.take();
        if (z.text != "0") {
            Lexer::fail_at(z, "expected 0");
        }
        return Region::nonneg_cone(g);
    }
    if (lex.accept(">")) {
        const Token z = lex.take();
        if (z.text != "0") {
            Lexer::fail_at(z, "expected 0");
        }
        return Region::pos_cone(g);
    }
    return Region::whole(g);
}

} // namespace detail

/**
 * `W(region)`, `FIN(region)` or `explicit{{...},...}`. Regions naming a group
 * (`Z>=0`) carry it; generator lists and explicit families use @p group.
 */
inline FamilyDescriptor parse_family(const std::string& text, const GroupDescriptor& group)
{
    Lexer lex(text);
    FamilyDescriptor out;
    const Token head = lex.peek();
    if (lex.accept_ident("W") || lex.accept_ident("FIN")) {
        lex.expect("(");
        Region r = detail::parse_region(lex, group);
        lex.expect(")");
        out = head.text == "W" ? FamilyDescriptor::well_ordered(std::move(r)) : FamilyDescriptor::finite_subsets(std::move(r));
    } else if (lex.accept_ident("explicit")) {
        lex.expect("{");
        std::vector<SupportSet> members;
        if (!lex.accept("}")) {
            do {
                members.push_back(SupportSet::finite(group, detail::parse_element_set(lex, group)));
            } while (lex.accept(","));
            lex.expect("}");
        }
        out = FamilyDescriptor::explicit_family(group, std::move(members));
    } else {
        lex.fail("expected W(...), FIN(...) or explicit{...}");
    }
    if (lex.peek().kind != Token::Kind::End) {
        lex.fail("unexpected trailing input");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Expressions

struct Ast {
    enum class Kind { Number, Variable, Monomial, Add, Sub, Neg, Mul, Div, Inv, Trunc };

    Kind kind = Kind::Number;
    BigInt number = 0;
    std::size_t power = 1;
    std::optional<GroupElement> exponent;
    std::vector<Ast> children;
    std::size_t column = 1;

    /// Structural equality (source positions ignored).
    friend bool operator==(const Ast& a, const Ast& b)
    {
        return a.kind == b.kind && a.number == b.number && a.power == b.power && a.exponent == b.exponent
               && a.children == b.children;
    }
};

namespace detail {

class ExpressionParser {
public:
    ExpressionParser(const std::string& input, const GroupDescriptor& group) : lex_(input), group_(group) {}

    Ast parse()
    {
        Ast e = expr();
        if (lex_.peek().kind != Token::Kind::End) {
            lex_.fail("unexpected input after expression");
        }
        return e;
    }

private:
    static Ast node(Ast::Kind kind, std::size_t column, std::vector<Ast> children = {})
    {
        Ast a;
        a.kind = kind;
        a.column = column;
        a.children = std::move(children);
        return a;
    }

    Ast expr()
    {
        Ast left = term();
        while (true) {
            const Token t = lex_.peek();
            if (lex_.accept("+")) {
                left = node(Ast::Kind::Add, t.column, {std::move(left), term()});
            } else if (lex_.accept("-")) {
                left = node(Ast::Kind::Sub, t.column, {std::move(left), term()});
            } else {
                return left;
            }
        }
    }

    Ast term()
    {
        Ast left = unary();
        while (true) {
            const Token t = lex_.peek();
            if (lex_.accept("*")) {
                left = node(Ast::Kind::Mul, t.column, {std::move(left), unary()});
            } else if (lex_.accept("/")) {
                left = node(Ast::Kind::Div, t.column, {std::move(left), unary()});
            } else {
                return left;
            }
        }
    }

    Ast unary()
    {
        const Token t = lex_.peek();
        if (lex_.accept("-")) {
            return node(Ast::Kind::Neg, t.column, {unary()});
        }
        return factor();
    }

    Ast factor()
    {
        const Token t = lex_.peek();
        if (t.kind == Token::Kind::Number) {
            lex_.take();
            Ast a = node(Ast::Kind::Number, t.column);
            a.number = parse_int(t);
            return a;
        }
        if (lex_.accept("(")) {
            Ast inner = expr();
            lex_.expect(")");
            return inner;
        }
        if (lex_.accept_ident("t")) {
            lex_.expect("^");
            lex_.expect("(");
            Ast a = node(Ast::Kind::Monomial, t.column);
            RawExponent raw = parse_raw_exponent(lex_);
            lex_.expect(")");
            a.exponent = make_exponent(std::move(raw), group_);
            return a;
        }
        if (lex_.accept_ident("x")) {
            Ast a = node(Ast::Kind::Variable, t.column);
            if (lex_.accept("^")) {
                if (lex_.peek().kind != Token::Kind::Number) {
                    lex_.fail("expected a power of x");
                }
                const Token n = lex_.take();
                if (n.text.size() > 6) {
                    Lexer::fail_at(n, "power of x too large");
                }
                a.power = std::stoul(n.text);
            }
            return a;
        }
        if (lex_.accept_ident("inv")) {
            lex_.expect("(");
            Ast a = node(Ast::Kind::Inv, t.column, {expr()});
            if (lex_.accept(";")) {
                if (!lex_.accept_ident("g0")) {
                    lex_.fail("expected 'g0'");
                }
                lex_.expect("=");
                RawExponent raw = parse_raw_exponent(lex_);
                lex_.expect(")");
                a.exponent = make_exponent(std::move(raw), group_);
                return a;
            }
            lex_.expect(")");
            return a;
        }
        if (lex_.accept_ident("trunc")) {
            lex_.expect("(");
            Ast a = node(Ast::Kind::Trunc, t.column, {expr()});
            lex_.expect(",");
            RawExponent raw = parse_raw_exponent(lex_);
            lex_.expect(")");
            a.exponent = make_exponent(std::move(raw), group_);
            return a;
        }
        if (t.kind == Token::Kind::Ident) {
            Lexer::fail_at(t, "unknown identifier");
        }
        lex_.fail("expected a number, t^(...), x, inv(...), trunc(...) or '('");
    }

    Lexer lex_;
    GroupDescriptor group_;
};

inline int precedence(Ast::Kind k)
{
    switch (k) {
    case Ast::Kind::Add:
    case Ast::Kind::Sub:
        return 1;
    case Ast::Kind::Mul:
    case Ast::Kind::Div:
        return 2;
    case Ast::Kind::Neg:
        return 3;
    default:
        return 4;
    }
}

inline std::string exponent_text(const GroupElement& g)
{
    return g.to_string();
}

} // namespace detail

inline Ast parse_expression(const std::string& input, const SessionConfig& config)
{
    return detail::ExpressionParser(input, config.group).parse();
}

/// Canonical text with minimal parentheses; re-parses to an equal Ast.
inline std::string print(const Ast& a)
{
    auto wrap = [](const Ast& child, bool paren) { return paren ? "(" + print(child) + ")" : print(child); };
    const int p = detail::precedence(a.kind);
    switch (a.kind) {
    case Ast::Kind::Number:
        return a.number.str();
    case Ast::Kind::Variable:
        return a.power == 1 ? std::string("x") : "x^" + std::to_string(a.power);
    case Ast::Kind::Monomial:
        return "t^(" + detail::exponent_text(*a.exponent) + ")";
    case Ast::Kind::Add:
    case Ast::Kind::Sub:
    case Ast::Kind::Mul:
    case Ast::Kind::Div: {
        static const char* ops[] = {" + ", " - ", "*", "/"};
        const char* op = a.kind == Ast::Kind::Add ? ops[0] : a.kind == Ast::Kind::Sub ? ops[1] : a.kind == Ast::Kind::Mul ? ops[2] : ops[3];
        return wrap(a.children[0], detail::precedence(a.children[0].kind) < p) + op
               + wrap(a.children[1], detail::precedence(a.children[1].kind) <= p);
    }
    case Ast::Kind::Neg:
        return "-" + wrap(a.children[0], detail::precedence(a.children[0].kind) < p);
    case Ast::Kind::Inv:
        return "inv(" + print(a.children[0]) + (a.exponent ? "; g0=" + detail::exponent_text(*a.exponent) : "") + ")";
    case Ast::Kind::Trunc:
        return "trunc(" + print(a.children[0]) + ", " + detail::exponent_text(*a.exponent) + ")";
    }
    return "?";
}

/// True when some inv(...) lacks a g0 witness.
inline bool has_unwitnessed_inverse(const Ast& a)
{
    if (a.kind == Ast::Kind::Inv && !a.exponent) {
        return true;
    }
    return std::any_of(a.children.begin(), a.children.end(), has_unwitnessed_inverse);
}

/// Largest possible support exponent when the expansion is visibly finite.
inline std::optional<GroupElement> static_top(const Ast& a, const GroupDescriptor& group)
{
    switch (a.kind) {
    case Ast::Kind::Number:
    case Ast::Kind::Variable:
        return group_zero(group);
    case Ast::Kind::Monomial:
        return *a.exponent;
    case Ast::Kind::Neg:
        return static_top(a.children[0], group);
    case Ast::Kind::Add:
    case Ast::Kind::Sub: {
        auto l = static_top(a.children[0], group);
        auto r = static_top(a.children[1], group);
        if (!l || !r) {
            return std::nullopt;
        }
        return max_of(*l, *r);
    }
    case Ast::Kind::Mul: {
        auto l = static_top(a.children[0], group);
        auto r = static_top(a.children[1], group);
        if (!l || !r) {
            return std::nullopt;
        }
        return *l + *r;
    }
    case Ast::Kind::Div:
    case Ast::Kind::Inv: {
        // Only inverses of single monomials stay finite.
        const Ast& den = a.kind == Ast::Kind::Div ? a.children[1] : a.children[0];
        std::optional<GroupElement> e;
        const Ast* cur = &den;
        while (cur->kind == Ast::Kind::Neg) {
            cur = &cur->children[0];
        }
        if (cur->kind == Ast::Kind::Number || cur->kind == Ast::Kind::Variable) {
            e = group_zero(group);
        } else if (cur->kind == Ast::Kind::Monomial) {
            e = *cur->exponent;
        } else if (cur->kind == Ast::Kind::Mul
                   && (cur->children[0].kind == Ast::Kind::Number || cur->children[0].kind == Ast::Kind::Variable)
                   && cur->children[1].kind == Ast::Kind::Monomial) {
            e = *cur->children[1].exponent;
        }
        if (!e) {
            return std::nullopt;
        }
        if (a.kind == Ast::Kind::Inv) {
            return -*e;
        }
        auto l = static_top(a.children[0], group);
        if (!l) {
            return std::nullopt;
        }
        return *l - *e;
    }
    case Ast::Kind::Trunc:
        return static_top(a.children[0], group);
    }
    return std::nullopt;
}

/// Builds the lazy series for an Ast; raises precondition_violation on invalid constructs.
inline Series to_series(const Ast& a, const SessionConfig& config)
{
    const auto& group = config.group;
    const auto& field = config.field;
    switch (a.kind) {
    case Ast::Kind::Number:
        return Series::constant(FieldElement::from_rational(field, BigRational(a.number)), group);
    case Ast::Kind::Variable: {
        if (field.kind() != FieldDescriptor::Kind::RationalFunctions) {
            throw precondition_violation("'x' at column " + std::to_string(a.column) + " needs a field F_p(x), not " + field.name());
        }
        FieldElement v = FieldElement::one(field);
        for (std::size_t i = 0; i < a.power; ++i) {
            v = v * FieldElement::variable(field);
        }
        return Series::constant(v, group);
    }
    case Ast::Kind::Monomial:
        return Series::t(field, *a.exponent);
    case Ast::Kind::Add:
        return to_series(a.children[0], config) + to_series(a.children[1], config);
    case Ast::Kind::Sub:
        return to_series(a.children[0], config) - to_series(a.children[1], config);
    case Ast::Kind::Neg:
        return -to_series(a.children[0], config);
    case Ast::Kind::Mul:
        return to_series(a.children[0], config) * to_series(a.children[1], config);
    case Ast::Kind::Div:
        return to_series(a.children[0], config) * to_series(a.children[1], config).inverse();
    case Ast::Kind::Inv:
        return to_series(a.children[0], config).inverse(a.exponent);
    case Ast::Kind::Trunc:
        return to_series(a.children[0], config).truncated(*a.exponent);
    }
    throw precondition_violation("unhandled expression node");
}

// ---------------------------------------------------------------------------
// Rendering helpers

namespace detail {

/// `{1} -> {0,1,2,...}`: premises, then the set the condition forces into F.
inline std::string witness_text(const Witness& w)
{
    std::string out;
    for (const auto& p : w.premises) {
        out += (out.empty() ? "" : ", ") + p.to_string();
    }
    if (w.offending) {
        out += (out.empty() ? "" : " -> ") + w.offending->to_string();
    } else if (w.element) {
        out += (out.empty() ? "" : " -> ") + w.element->to_string();
    }
    return out;
}

inline std::string verdict_line(Condition c, const Verdict& v)
{
    std::string out = to_string(c) + ": " + to_string(v.outcome) + " - " + v.rule;
    if (v.witness) {
        out += "; witness " + witness_text(*v.witness);
        if (!v.witness->description.empty()) {
            out += " (" + v.witness->description + ")";
        }
    }
    return out;
}

inline std::string flag_line(const std::string& name, const Flag& f, const Classification& c)
{
    std::string out = name + ": " + to_string(f.value) + " - " + f.reason;
    if (!f.failing.empty()) {
        out += " [";
        bool first = true;
        for (auto cond : f.failing) {
            out += (first ? "" : ", ") + to_string(cond);
            first = false;
            const Verdict& v = c.conditions.at(cond);
            if (v.witness) {
                out += " " + witness_text(*v.witness);
            }
        }
        out += "]";
    }
    if (!f.missing_assumption.empty()) {
        out += " (needs " + f.missing_assumption + ")";
    }
    return out;
}

inline std::string report_line(const Report& r)
{
    std::string out = r.procedure + " " + r.parameters.dump() + ": " + to_string(r.status);
    if (!r.note.empty()) {
        out += " - " + r.note;
    }
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Runner

enum ExitCode : int { Success = 0, VerificationFailure = 1, UsageError = 2, BudgetExceeded = 3 };

/**
 * Runs one invocation (args exclude the program name). Results go to @p out,
 * diagnostics to @p err; the return value is the process exit code.
 */
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exact Hahn series arithmetic and k-hull classification", "rayner"};
    app.require_subcommand(1);

    std::string group_text = "Z";
    std::string field_text = "Q";
    std::string bound_text;
    std::size_t term_bound = 10000;
    bool json_output = false;
    std::uint64_t seed = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--group", group_text, "exponent group: Z, Q, Z^n or trivial")->capture_default_str();
        sub->add_option("--field", field_text, "coefficient field: Q, Fp or Fp(x)")->capture_default_str();
        sub->add_option("--exp-bound", bound_text, "exponent bound of the evaluation horizon");
        sub->add_option("--term-bound", term_bound, "maximum number of terms per evaluation")->capture_default_str();
        sub->add_flag("--json", json_output, "emit JSON");
        sub->add_option("--seed", seed, "seed for randomized searches")->capture_default_str();
    };

    std::string expression;
    std::string at_text;
    std::string g0_text;
    bool inclusive = false;
    std::string family_text;
    std::string condition_text = "all";
    std::string filter;

    auto* eval = app.add_subcommand("eval", "evaluate an expression up to the horizon");
    eval->add_option("expr", expression)->required();
    auto* invert_cmd = app.add_subcommand("invert", "expand the inverse of an expression");
    invert_cmd->add_option("expr", expression)->required();
    invert_cmd->add_option("--g0", g0_text, "min supp of the argument, skipping the zero search");
    auto* support = app.add_subcommand("support", "support of an expression up to the horizon");
    support->add_option("expr", expression)->required();
    auto* vmin_cmd = app.add_subcommand("vmin", "minimum of the support");
    vmin_cmd->add_option("expr", expression)->required();
    auto* trunc_cmd = app.add_subcommand("trunc", "truncation strictly below AT");
    trunc_cmd->add_option("expr", expression)->required();
    trunc_cmd->add_option("at", at_text)->required();
    trunc_cmd->add_flag("--inclusive", inclusive, "keep the term at AT as well");
    auto* check = app.add_subcommand("check-family", "check conditions S1..A5 for a family descriptor");
    check->add_option("family", family_text)->required();
    check->add_option("--condition", condition_text, "S1..S6, A1..A5 or all")->capture_default_str();
    auto* classify = app.add_subcommand("classify", "classify the k-hull of a family");
    classify->add_option("--family", family_text)->required();
    auto* suite = app.add_subcommand("suite", "run every verifier with default parameters");
    suite->add_option("--filter", filter, "run only the named verifier");
    for (auto* sub : {eval, invert_cmd, support, vmin_cmd, trunc_cmd, check, classify, suite}) {
        add_common(sub);
    }

    std::vector<std::string> argv_storage{"rayner"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_storage) {
        argv.push_back(s.data());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Success;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return UsageError;
    }

    try {
        SessionConfig config;
        config.group = parse_group(group_text);
        config.field = parse_field(field_text);
        config.term_bound = term_bound;
        config.json_output = json_output;
        config.seed = seed;
        if (term_bound == 0) {
            throw precondition_violation("--term-bound must be positive");
        }
        if (!bound_text.empty()) {
            config.exp_bound = parse_exponent(bound_text, config.group);
        }
        Budget budget;
        budget.seed = seed;
        budget.term_bound = term_bound;

        auto print_terms = [&](const TermList& list) {
            if (config.json_output) {
                out << to_json(list).dump() << "\n";
            } else {
                out << to_text(list) << "\n";
            }
            if (!list.complete()) {
                err << "note: term budget reached; exact through " << list.valid_through().to_string() << "\n";
                return BudgetExceeded;
            }
            return Success;
        };
        auto horizon_for = [&](const Ast& ast, bool needs_search) {
            if (config.exp_bound) {
                return Horizon(*config.exp_bound, config.term_bound);
            }
            if (has_unwitnessed_inverse(ast) || needs_search) {
                throw precondition_violation("inv(...) without a g0 witness needs --exp-bound");
            }
            auto top = static_top(ast, config.group);
            if (!top) {
                throw precondition_violation("the expansion may be infinite; pass --exp-bound");
            }
            return Horizon(*top, config.term_bound);
        };

        if (*eval || *support || *vmin_cmd || *trunc_cmd || *invert_cmd) {
            Ast ast = parse_expression(expression, config);
            Series s = to_series(ast, config);
            if (*eval) {
                Evaluator ev(horizon_for(ast, false));
                return print_terms(ev.evaluate(s));
            }
            if (*support) {
                const Horizon h = horizon_for(ast, false);
                TermList list = Evaluator(h).evaluate(s);
                SupportSet set = SupportSet::of(list);
                // A visibly finite expression whose top lies inside the horizon has a finite support.
                const auto top = static_top(ast, config.group);
                if (list.complete() && top && !(h.exp_bound < *top)) {
                    set = SupportSet::finite(config.group, list.support());
                }
                out << (config.json_output ? to_json(set).dump() : set.to_string()) << "\n";
                return set.budget_exhausted() ? BudgetExceeded : Success;
            }
            if (*vmin_cmd) {
                Horizon h = config.exp_bound ? Horizon(*config.exp_bound, config.term_bound) : horizon_for(ast, false);
                GroupElement v = Evaluator(h).vmin(s);
                out << (config.json_output ? json{{"vmin", v.to_string()}}.dump() : v.to_string()) << "\n";
                return Success;
            }
            if (*trunc_cmd) {
                GroupElement at = parse_exponent(at_text, config.group);
                Series t = s.truncated(at, inclusive ? TruncationMode::UpTo : TruncationMode::StrictlyBelow);
                Horizon h = config.exp_bound ? Horizon(*config.exp_bound, config.term_bound) : Horizon(at, config.term_bound);
                return print_terms(Evaluator(h).evaluate(t));
            }
            // invert
            std::optional<GroupElement> g0;
            if (!g0_text.empty()) {
                g0 = parse_exponent(g0_text, config.group);
            }
            Ast wrapped;
            wrapped.kind = Ast::Kind::Inv;
            wrapped.children.push_back(ast);
            wrapped.exponent = g0;
            Horizon h = horizon_for(wrapped, false);
            Series inv = g0 ? s.inverse(g0) : invert(s, h);
            return print_terms(Evaluator(h).evaluate(inv));
        }

        if (*check) {
            FamilyDescriptor f = parse_family(family_text, config.group);
            std::vector<Condition> conds;
            if (condition_text == "all") {
                conds.assign(all_conditions.begin(), all_conditions.end());
            } else if (auto c = parse_condition(condition_text)) {
                conds.push_back(*c);
            } else {
                throw precondition_violation("unknown condition '" + condition_text + "'");
            }
            json j = json::object();
            for (auto c : conds) {
                Verdict v = check_condition(f, c, budget);
                if (config.json_output) {
                    j[to_string(c)] = to_json(v);
                } else {
                    out << detail::verdict_line(c, v) << "\n";
                }
            }
            if (config.json_output) {
                out << json{{"family", f.to_string()}, {"conditions", j}}.dump() << "\n";
            }
            return Success;
        }

        if (*classify) {
            FamilyDescriptor f = parse_family(family_text, config.group);
            Classification c = classify_khull(config.field, f, budget);
            if (config.json_output) {
                out << to_json(c).dump(2) << "\n";
            } else {
                out << "k-hull of " << c.family << " over " << c.field << "\n";
                for (const auto& [name, flag] : c.flags()) {
                    out << detail::flag_line(name, *flag, c) << "\n";
                }
            }
            return Success;
        }

        if (*suite) {
            if (!filter.empty() && std::find(suite_names().begin(), suite_names().end(), filter) == suite_names().end()) {
                throw precondition_violation("unknown verifier '" + filter + "'");
            }
            std::vector<Report> reports = run_suite(filter, SuiteOptions{seed, term_bound});
            bool failed = false;
            json j = json::array();
            for (const auto& r : reports) {
                failed = failed || r.status == Report::Status::Fail;
                if (config.json_output) {
                    j.push_back(to_json(r));
                } else {
                    out << detail::report_line(r) << "\n";
                }
            }
            if (config.json_output) {
                out << j.dump(2) << "\n";
            }
            return failed ? VerificationFailure : Success;
        }
    } catch (const parse_error& e) {
        err << "syntax error: " << e.what() << "\n";
        return UsageError;
    } catch (const term_budget_exceeded& e) {
        err << "budget exceeded: " << e.what() << "\n";
        return BudgetExceeded;
    } catch (const zero_up_to_horizon& e) {
        err << "budget exceeded: " << e.what() << "\n";
        return BudgetExceeded;
    } catch (const unknown_within_budget& e) {
        err << "budget exceeded: " << e.what() << "\n";
        return BudgetExceeded;
    } catch (const field_too_small& e) {
        err << "verification failed: " << e.what() << "\n";
        return VerificationFailure;
    } catch (const hypothesis_not_met& e) {
        err << "verification failed: " << e.what() << "\n";
        return VerificationFailure;
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return UsageError;
    }
    return UsageError;
}

} // namespace rayner::cli
