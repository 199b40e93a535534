#pragma once

/**
 * @file theorems.hpp
 * @brief Classification of k-hulls and executable checks of the support
 *        identities behind it.
 *
 * classify_khull turns condition verdicts into structural flags: sufficient
 * directions always apply, converses only under their hypotheses (k != F2 for
 * the additive characterisation, char 0 or a large coefficient field for the
 * ring one, char 0 for the field ones). Verifiers return immutable Reports.
 */

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rayner/coefficients.hpp"
#include "rayner/error.hpp"
#include "rayner/exponents.hpp"
#include "rayner/json_io.hpp"
#include "rayner/series.hpp"
#include "rayner/supports.hpp"

namespace rayner {

// ---------------------------------------------------------------------------
// Reports

struct Report {
    enum class Status { Pass, Fail, HypothesisUnmet, BoundedPass };

    std::string procedure;
    json parameters = json::object();
    Status status = Status::Fail;
    std::optional<json> witness;
    std::string citation;
    std::string note;

    bool ok() const noexcept { return status == Status::Pass || status == Status::BoundedPass; }
};

inline std::string to_string(Report::Status s)
{
    switch (s) {
    case Report::Status::Pass:
        return "pass";
    case Report::Status::Fail:
        return "fail";
    case Report::Status::HypothesisUnmet:
        return "hypothesis-unmet";
    case Report::Status::BoundedPass:
        return "bounded-pass";
    }
    return "?";
}

inline json to_json(const Report& r)
{
    json out{{"procedure", r.procedure}, {"parameters", r.parameters}, {"status", to_string(r.status)}};
    if (r.witness) {
        out["witness"] = *r.witness;
    }
    out["citation"] = r.citation;
    if (!r.note.empty()) {
        out["note"] = r.note;
    }
    return out;
}

namespace detail {

inline json element_list(const std::vector<GroupElement>& v)
{
    json out = json::array();
    for (const auto& e : v) {
        out.push_back(e.to_string());
    }
    return out;
}

/// Elements of a and b up to @p window that are in one set but not the other.
inline std::pair<std::vector<GroupElement>, std::vector<GroupElement>> differences(const std::vector<GroupElement>& a,
                                                                                   const std::vector<GroupElement>& b,
                                                                                   const GroupElement& window)
{
    auto clip = [&](const std::vector<GroupElement>& v) {
        std::vector<GroupElement> out;
        for (const auto& e : v) {
            if (!(window < e)) {
                out.push_back(e);
            }
        }
        return out;
    };
    std::vector<GroupElement> x = clip(a);
    std::vector<GroupElement> y = clip(b);
    std::vector<GroupElement> only_a;
    std::vector<GroupElement> only_b;
    std::set_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(only_a));
    std::set_difference(y.begin(), y.end(), x.begin(), x.end(), std::back_inserter(only_b));
    return {only_a, only_b};
}

/// Exponent of a coefficient of the form x^e in F_p(x), if it is one.
inline std::optional<std::size_t> power_of_x(const FieldElement& c)
{
    if (c.field().kind() != FieldDescriptor::Kind::RationalFunctions) {
        return std::nullopt;
    }
    const auto& rf = std::get<RationalFunction>(c.value());
    if (rf.den.degree() != 0 || rf.num.is_zero() || !rf.num.is_monomial() || rf.num.lead() != 1) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(rf.num.degree());
}

} // namespace detail

// ---------------------------------------------------------------------------
// Classification

struct Flag {
    Truth value = Truth::Unknown;
    std::string reason;
    /// Conditions whose failure settles a No.
    std::vector<Condition> failing;
    /// Hypothesis that would be needed to decide an Unknown.
    std::string missing_assumption;
};

struct Assumptions {
    std::uint64_t char_k = 0;
    bool k_is_f2 = false;
    bool k_large = false;
};

struct Classification {
    std::string field;
    std::string family;
    Flag additive_subgroup;
    Flag subring;
    Flag has_identity;
    Flag subfield;
    Flag hahn_field;
    Flag rayner_field;
    Flag restriction_closed;
    Flag truncation_closed;
    std::map<Condition, Verdict> conditions;
    Assumptions assumptions;

    std::vector<std::pair<std::string, const Flag*>> flags() const
    {
        return {{"additive_subgroup", &additive_subgroup}, {"subring", &subring},
                {"has_identity", &has_identity},           {"subfield", &subfield},
                {"hahn_field", &hahn_field},               {"rayner_field", &rayner_field},
                {"restriction_closed", &restriction_closed}, {"truncation_closed", &truncation_closed}};
    }
};

namespace detail {

struct ConditionTable {
    const std::map<Condition, Verdict>& v;

    bool holds(std::initializer_list<Condition> cs) const
    {
        return std::all_of(cs.begin(), cs.end(), [&](Condition c) { return v.at(c).holds(); });
    }

    std::vector<Condition> failing(std::initializer_list<Condition> cs) const
    {
        std::vector<Condition> out;
        for (auto c : cs) {
            if (v.at(c).fails()) {
                out.push_back(c);
            }
        }
        return out;
    }
};

inline Flag yes(std::string reason) { return Flag{Truth::Yes, std::move(reason), {}, {}}; }
inline Flag no(std::string reason, std::vector<Condition> failing) { return Flag{Truth::No, std::move(reason), std::move(failing), {}}; }
inline Flag unknown(std::string reason, std::string missing = {}) { return Flag{Truth::Unknown, std::move(reason), {}, std::move(missing)}; }

inline std::string names(const std::vector<Condition>& cs)
{
    std::string out;
    for (const auto& c : cs) {
        out += (out.empty() ? "" : ",") + to_string(c);
    }
    return out;
}

inline std::vector<Condition> merged(std::vector<Condition> a, const std::vector<Condition>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

} // namespace detail

/**
 * Structural flags of k((F)). Unknown flags name the hypothesis (k_is_F2,
 * char_k, k_large) that would decide them, or report an undecided condition.
 */
inline Classification classify_khull(const FieldDescriptor& field, const FamilyDescriptor& f, const Budget& budget = {})
{
    using C = Condition;
    Classification out;
    out.field = field.name();
    out.family = f.to_string();
    out.conditions = check_all_conditions(f, budget);
    out.assumptions = Assumptions{field.characteristic(), field.is_f2(), field.declared_large()};
    const detail::ConditionTable t{out.conditions};
    const bool char0 = field.characteristic() == 0;
    const bool ring_converse = char0 || field.declared_large();

    out.restriction_closed = t.holds({C::S2})   ? detail::yes("supports are closed under subsets")
                             : t.failing({C::S2}).empty() ? detail::unknown("subset closure undecided within budget")
                                                          : detail::no("a subset of a support is not a support", {C::S2});
    out.truncation_closed = t.holds({C::S6})   ? detail::yes("supports are closed under initial segments")
                            : t.failing({C::S6}).empty() ? detail::unknown("initial-segment closure undecided within budget")
                                                         : detail::no("an initial segment of a support is not a support", {C::S6});

    const std::vector<Condition> rayner_fail = t.failing({C::S2, C::S3, C::S5, C::A1, C::A3, C::A4});
    const bool rayner = t.holds({C::S2, C::S3, C::S5, C::A1, C::A3, C::A4});
    if (rayner) {
        out.rayner_field = detail::yes("S2, S3, S5, A1, A3 and A4 hold: F is a Rayner field family");
    } else if (!rayner_fail.empty()) {
        out.rayner_field = detail::no("not a Rayner field family; failing: " + detail::names(rayner_fail), rayner_fail);
    } else {
        out.rayner_field = detail::unknown("a Rayner condition is undecided within budget");
    }

    // 0 needs the empty set as a support; with F nonempty its absence breaks S2.
    const bool empty_member = f.kind != FamilyDescriptor::Kind::Explicit
                              || detail::explicit_member(f, SupportSet::empty(f.group));
    const std::vector<Condition> zero_fail{t.failing({C::S5}).empty() ? C::S2 : C::S5};

    // k ⊆ k((F)) exactly when both the empty set and {0} are supports.
    {
        if (!empty_member) {
            out.has_identity = detail::no("the empty set is not a support, so 0 is missing", zero_fail);
        } else if (t.holds({C::S4})) {
            out.has_identity = detail::yes("both the empty set and {0} are supports, so k is contained");
        } else if (!t.failing({C::S4}).empty()) {
            out.has_identity = detail::no("{0} is not a support, so 1 is missing", {C::S4});
        } else {
            out.has_identity = detail::unknown("S4 undecided within budget");
        }
    }

    // Additive subgroup.
    const std::vector<Condition> group_fail = t.failing({C::S2, C::S3, C::S5});
    if (t.holds({C::S2, C::S3, C::S5})) {
        out.additive_subgroup = detail::yes("S2, S3 and S5 hold: supports of sums and negatives stay in F");
    } else if (!empty_member) {
        out.additive_subgroup = detail::no("0 has empty support, which is not in F", zero_fail);
    } else if (!group_fail.empty() && !field.is_f2()) {
        out.additive_subgroup = detail::no("over k != F2 a subgroup needs S2, S3 and S5; failing: " + detail::names(group_fail), group_fail);
    } else if (!group_fail.empty()) {
        out.additive_subgroup = detail::unknown("failing " + detail::names(group_fail) + ", but the converse needs k != F2", "k_is_F2");
    } else {
        out.additive_subgroup = detail::unknown("a group condition is undecided within budget");
    }

    // Subring (identity tracked separately).
    const std::vector<Condition> ring_fail = t.failing({C::S2, C::S3, C::S5, C::A2});
    if (out.additive_subgroup.value == Truth::No) {
        out.subring = detail::no("not an additive subgroup", out.additive_subgroup.failing);
    } else if (t.holds({C::S2, C::S3, C::S5, C::A2})) {
        out.subring = detail::yes("S2, S3, S5 and A2 hold: product supports lie in sums of supports");
    } else if (t.holds({C::S2, C::S3, C::S5, C::A3, C::A4})) {
        out.subring = detail::yes("S2, S3, S5, A3 and A4 hold: a subring with identity");
    } else if (!ring_fail.empty() && ring_converse) {
        out.subring = detail::no(std::string("with non-cancelling coefficients a subring needs S2, S3, S5 and A2; failing: ")
                                     + detail::names(ring_fail),
                                 ring_fail);
    } else if (!ring_fail.empty()) {
        out.subring = detail::unknown("failing " + detail::names(ring_fail) + ", but the converse needs char k = 0 or a large k",
                                      "char_k = 0 or k_large");
    } else {
        out.subring = detail::unknown("a ring condition is undecided within budget");
    }

    // Subfield.
    const std::vector<Condition> field_fail = t.failing({C::S2, C::S3, C::S4, C::A2, C::A4, C::A5});
    const std::vector<Condition> necessary_fail = t.failing({C::S4, C::A5});
    if (rayner) {
        out.subfield = detail::yes("Rayner field family: S2, S3, S5, A1, A3 and A4 hold");
    } else if (t.holds({C::S2, C::S3, C::S4, C::A2, C::A4, C::A5})) {
        out.subfield = detail::yes("S2, S3, S4, A2, A4 and A5 hold: inverses have supports in F");
    } else if (out.subring.value == Truth::No) {
        out.subfield = detail::no("not a subring", detail::merged(out.subring.failing, rayner_fail));
    } else if (!necessary_fail.empty()) {
        out.subfield = detail::no("a field needs 1 and the inverse of every monomial; failing: "
                                      + detail::names(detail::merged(necessary_fail, rayner_fail)),
                                  detail::merged(necessary_fail, rayner_fail));
    } else if (!field_fail.empty() && char0) {
        out.subfield = detail::no("in characteristic 0 a subfield needs S2, S3, S4, A2, A4 and A5, or a Rayner family; failing: "
                                      + detail::names(detail::merged(field_fail, rayner_fail)),
                                  detail::merged(field_fail, rayner_fail));
    } else if (!field_fail.empty()) {
        out.subfield = detail::unknown("failing " + detail::names(field_fail) + ", but the converse needs char k = 0", "char_k = 0");
    } else {
        out.subfield = detail::unknown("a field condition is undecided within budget");
    }

    // Hahn field: a subfield containing every monomial.
    const std::vector<Condition> hahn_fail = t.failing({C::S1, C::S2, C::S3, C::A2, C::A4});
    if (t.holds({C::S1, C::S2, C::S3, C::A2, C::A4})) {
        out.hahn_field = detail::yes("S1, S2, S3, A2 and A4 hold");
    } else if (rayner) {
        out.hahn_field = detail::yes("every Rayner field is a Hahn field");
    } else if (!t.failing({C::S1}).empty()) {
        out.hahn_field = detail::no("a Hahn field contains every monomial, but some {g} is not a support", {C::S1});
    } else if (out.subfield.value == Truth::No) {
        out.hahn_field = detail::no("not a subfield", out.subfield.failing);
    } else if (!hahn_fail.empty() && char0) {
        out.hahn_field = detail::no("in characteristic 0 a Hahn field needs S1, S2, S3, A2 and A4; failing: " + detail::names(hahn_fail),
                                    hahn_fail);
    } else if (!hahn_fail.empty()) {
        out.hahn_field = detail::unknown("failing " + detail::names(hahn_fail) + ", but the converse needs char k = 0", "char_k = 0");
    } else {
        out.hahn_field = detail::unknown("a Hahn condition is undecided within budget");
    }
    return out;
}

inline json to_json(const Classification& c)
{
    json flags = json::object();
    for (const auto& [name, flag] : c.flags()) {
        json f{{"value", to_string(flag->value)}, {"reason", flag->reason}};
        if (!flag->failing.empty()) {
            json failing = json::array();
            json witnesses = json::object();
            for (auto cond : flag->failing) {
                failing.push_back(to_string(cond));
                const Verdict& v = c.conditions.at(cond);
                if (v.witness) {
                    witnesses[to_string(cond)] = to_json(*v.witness);
                }
            }
            f["failing"] = std::move(failing);
            f["witnesses"] = std::move(witnesses);
        }
        if (!flag->missing_assumption.empty()) {
            f["missing_assumption"] = flag->missing_assumption;
        }
        flags[name] = std::move(f);
    }
    json conditions = json::object();
    for (const auto& [cond, verdict] : c.conditions) {
        conditions[to_string(cond)] = to_json(verdict);
    }
    return json{{"field", c.field},
                {"family", c.family},
                {"assumptions", {{"char_k", c.assumptions.char_k}, {"k_is_F2", c.assumptions.k_is_f2}, {"k_large", c.assumptions.k_large}}},
                {"flags", std::move(flags)},
                {"conditions", std::move(conditions)}};
}

// ---------------------------------------------------------------------------
// Support identities

/**
 * supp(ab) = supp(a) ⊕ supp(b) up to the horizon, under either non-cancelling
 * route: (i) all coefficients positive rationals, or (ii) all coefficients
 * powers of x in F_p(x) with distinct exponent sums over the pairs hitting
 * each product exponent. Without a route the comparison is still reported.
 */
inline Report verify_product_support(const Series& a, const Series& b, const Horizon& h)
{
    if (a.group() != b.group() || a.field() != b.field()) {
        throw descriptor_mismatch("product support check on series over different descriptors");
    }
    Report r;
    r.procedure = "product-support";
    r.citation = "support of a product equals the sum of supports when coefficients cannot cancel";
    r.parameters = json{{"exp_bound", h.exp_bound.to_string()}, {"term_bound", h.term_bound}, {"field", a.field().name()}};

    Evaluator ev(h);
    TermList pab = ev.evaluate(a * b);
    TermList pa0 = ev.evaluate(a);
    TermList pb0 = ev.evaluate(b);
    if (pa0.empty() || pb0.empty()) {
        r.status = pab.empty() ? Report::Status::Pass : Report::Status::Fail;
        r.note = "a factor vanishes up to the horizon";
        return r;
    }
    const GroupElement va = pa0.terms().front().exponent;
    const GroupElement vb = pb0.terms().front().exponent;
    TermList pa = ev.evaluate(a, h.exp_bound - vb);
    TermList pb = ev.evaluate(b, h.exp_bound - va);

    std::string hypothesis;
    bool route_ok = false;
    if (a.field().kind() == FieldDescriptor::Kind::Rationals) {
        route_ok = true;
        for (const auto* list : {&pa, &pb}) {
            for (const auto& term : list->terms()) {
                if (!is_strictly_positive(term.coefficient)) {
                    route_ok = false;
                    hypothesis = "coefficient " + term.coefficient.to_string() + " at " + term.exponent.to_string() + " is not positive";
                }
            }
        }
        r.parameters["route"] = "positive rationals";
    } else if (a.field().kind() == FieldDescriptor::Kind::RationalFunctions) {
        r.parameters["route"] = "powers of x";
        route_ok = true;
        std::map<GroupElement, std::set<std::size_t>> degrees;
        for (const auto& x : pa.terms()) {
            auto ex = detail::power_of_x(x.coefficient);
            if (!ex) {
                route_ok = false;
                hypothesis = "coefficient " + x.coefficient.to_string() + " is not a power of x";
                break;
            }
            for (const auto& y : pb.terms()) {
                auto ey = detail::power_of_x(y.coefficient);
                if (!ey) {
                    route_ok = false;
                    hypothesis = "coefficient " + y.coefficient.to_string() + " is not a power of x";
                    break;
                }
                GroupElement target = x.exponent + y.exponent;
                if (h.exp_bound < target) {
                    continue;
                }
                if (!degrees[target].insert(*ex + *ey).second) {
                    route_ok = false;
                    hypothesis = "two pairs reach " + target.to_string() + " with the same power of x";
                }
            }
            if (!route_ok) {
                break;
            }
        }
    } else {
        hypothesis = "no non-cancellation route over " + a.field().name();
    }

    SupportSet lhs = SupportSet::of(pab);
    SupportSet rhs = minkowski_sum(SupportSet::of(pa), SupportSet::of(pb), h);
    GroupElement window = min_of(*lhs.known_through(), rhs.is_finite() ? h.exp_bound : *rhs.known_through());
    auto [extra, missing] = detail::differences(lhs.elements(), rhs.elements(), window);
    r.witness = json{{"supp_product", lhs.to_string()},
                     {"sum_of_supports", rhs.to_string()},
                     {"checked_through", window.to_string()},
                     {"missing_from_product", detail::element_list(missing)}};
    if (!extra.empty()) {
        (*r.witness)["outside_sum"] = detail::element_list(extra);
        r.status = Report::Status::Fail;
        r.note = "product support escapes the sum of supports";
        return r;
    }
    if (!route_ok) {
        r.status = Report::Status::HypothesisUnmet;
        r.note = hypothesis + (missing.empty() ? "" : "; cancellation removes " + std::to_string(missing.size()) + " exponent(s)");
        return r;
    }
    r.status = missing.empty() ? Report::Status::Pass : Report::Status::Fail;
    return r;
}

/**
 * supp((1-a)^-1) = ⊕ₙ supp(a) up to the horizon, for a with positive support
 * and positive rational coefficients. Outside that hypothesis the comparison
 * is still reported.
 */
inline Report verify_neumann_support(const Series& a, const Horizon& h)
{
    Report r;
    r.procedure = "neumann-support";
    r.citation = "the support of (1-a)^-1 is the finite-sum closure of supp(a) for positive coefficients";
    r.parameters = json{{"exp_bound", h.exp_bound.to_string()}, {"term_bound", h.term_bound}, {"field", a.field().name()}};

    Evaluator ev(h);
    TermList pa = ev.evaluate(a);
    std::string hypothesis;
    for (const auto& term : pa.terms()) {
        if (term.exponent.sign() <= 0) {
            r.status = Report::Status::HypothesisUnmet;
            r.note = "support point " + term.exponent.to_string() + " is not positive";
            return r;
        }
        if (a.field().kind() != FieldDescriptor::Kind::Rationals) {
            hypothesis = "coefficients are not ordered rationals";
        } else if (!is_strictly_positive(term.coefficient)) {
            hypothesis = "coefficient " + term.coefficient.to_string() + " at " + term.exponent.to_string() + " is not positive";
        }
    }
    Series inv = (Series::one(a.group(), a.field()) - a).inverse(group_zero(a.group()));
    TermList pinv = ev.evaluate(inv);
    SupportSet closure = finite_sums_closure(SupportSet::of(pa), h);
    SupportSet lhs = SupportSet::of(pinv);
    GroupElement window = min_of(*lhs.known_through(), closure.is_finite() ? h.exp_bound : *closure.known_through());
    auto [extra, missing] = detail::differences(lhs.elements(), closure.elements(), window);
    r.witness = json{{"supp_inverse", lhs.to_string()},
                     {"finite_sums", closure.to_string()},
                     {"checked_through", window.to_string()},
                     {"missing_from_inverse", detail::element_list(missing)}};
    if (!extra.empty()) {
        (*r.witness)["outside_closure"] = detail::element_list(extra);
        r.status = Report::Status::Fail;
        r.note = "inverse support escapes the finite-sum closure";
        return r;
    }
    if (!hypothesis.empty()) {
        r.status = Report::Status::HypothesisUnmet;
        r.note = hypothesis + (missing.empty() ? "" : "; strict inclusion observed");
        return r;
    }
    r.status = missing.empty() ? Report::Status::Pass : Report::Status::Fail;
    return r;
}

/**
 * Over F_p with a = t - t^p, the coefficient of (1-a)^-1 at p vanishes while
 * p lies in ⊕ₙ{1,p}: the support inclusion is strict.
 */
inline Report verify_fp_gap(std::uint64_t p, const Horizon& h)
{
    const FieldDescriptor field = FieldDescriptor::prime_field(p);
    const GroupDescriptor z = GroupDescriptor::integers();
    const auto pe = GroupElement::scalar(z, static_cast<long long>(p));
    Report r;
    r.procedure = "fp-gap";
    r.citation = "the coefficient of (1 - t + t^p)^-1 at p is -1 + 1 = 0 in F_p";
    r.parameters = json{{"p", p}, {"exp_bound", h.exp_bound.to_string()}};

    Series a = Series::t(field, GroupElement::scalar(z, 1)) - Series::t(field, pe);
    Series b = (Series::one(z, field) - a).inverse();
    Evaluator ev(Horizon(max_of(h.exp_bound, pe), h.term_bound));
    TermList pb = ev.evaluate(b);
    const FieldElement coef = pb.coefficient(pe);
    SupportSet closure = finite_sums_closure(SupportSet::finite(z, {GroupElement::scalar(z, 1), pe}), Horizon(pe, h.term_bound));
    const bool in_closure = closure.contains(pe) == Truth::Yes;
    r.witness = json{{"coefficient_at_p", coef.to_string()},
                     {"p_in_finite_sums", in_closure},
                     {"inverse_prefix", to_text(pb)}};
    r.status = coef.is_zero() && in_closure ? Report::Status::BoundedPass : Report::Status::Fail;
    r.note = "exact coefficient computation at the single exponent p";
    return r;
}

/**
 * With s = t^2 + t^3 over F2, searches all p, q in F2[X] of degree <= n, q != 0,
 * for t^2 q(s) = p(s) agreeing up to the horizon. No match is a bounded
 * confirmation that t^2 is not in F2(s), not a proof.
 */
inline Report refute_truncation_closure_F2(std::size_t max_degree, const Horizon& h)
{
    const GroupDescriptor z = GroupDescriptor::integers();
    if (h.exp_bound.group() != z) {
        throw descriptor_mismatch("the F2 truncation search runs over Z");
    }
    if (max_degree > 12) {
        throw term_budget_exceeded("degree " + std::to_string(max_degree) + " exceeds the exhaustive search budget (12)");
    }
    const BigRational bound_q = h.exp_bound.coords()[0];
    if (bound_q < 0) {
        throw precondition_violation("exponent bound must be nonnegative");
    }
    const auto bound = static_cast<std::size_t>(numerator(bound_q));
    const FieldDescriptor f2 = FieldDescriptor::prime_field(2);
    Report r;
    r.procedure = "truncation-f2";
    r.citation = "F2(t^2+t^3) does not contain t^2, so it is not truncation closed";
    r.parameters = json{{"max_degree", max_degree}, {"exp_bound", h.exp_bound.to_string()}};

    // Powers of s as bitsets over exponents 0..bound.
    const std::size_t words = bound / 64 + 1;
    using Bits = std::vector<std::uint64_t>;
    std::vector<Bits> powers;
    Evaluator ev(h);
    Series s = Series::t(f2, GroupElement::scalar(z, 2)) + Series::t(f2, GroupElement::scalar(z, 3));
    Series power = Series::one(z, f2);
    for (std::size_t i = 0; i <= max_degree; ++i) {
        Bits bits(words, 0);
        const TermList list = ev.evaluate(power);
        for (const auto& term : list.terms()) {
            const auto e = static_cast<std::size_t>(numerator(term.exponent.coords()[0]));
            bits[e / 64] |= std::uint64_t{1} << (e % 64);
        }
        powers.push_back(std::move(bits));
        power = power * s;
    }
    auto combine = [&](std::uint64_t mask, std::size_t shift) {
        Bits out(words, 0);
        for (std::size_t i = 0; i <= max_degree; ++i) {
            if (!(mask >> i & 1U)) {
                continue;
            }
            for (std::size_t e = 0; e + shift <= bound; ++e) {
                if (powers[i][e / 64] >> (e % 64) & 1U) {
                    const std::size_t k = e + shift;
                    out[k / 64] ^= std::uint64_t{1} << (k % 64);
                }
            }
        }
        return out;
    };
    const std::uint64_t count = std::uint64_t{1} << (max_degree + 1);
    std::vector<Bits> p_values;
    p_values.reserve(count);
    for (std::uint64_t p = 0; p < count; ++p) {
        p_values.push_back(combine(p, 0));
    }
    std::uint64_t pairs = 0;
    for (std::uint64_t q = 1; q < count; ++q) {
        const Bits lhs = combine(q, 2);
        for (std::uint64_t p = 0; p < count; ++p) {
            ++pairs;
            if (lhs == p_values[p]) {
                r.status = Report::Status::Fail;
                r.witness = json{{"p_mask", p}, {"q_mask", q}, {"pairs_checked", pairs}};
                r.note = "t^2 q(s) and p(s) agree up to the horizon";
                return r;
            }
        }
    }
    r.status = Report::Status::BoundedPass;
    r.witness = json{{"pairs_checked", pairs}};
    r.note = "verified up to degree " + std::to_string(max_degree) + ", horizon " + h.exp_bound.to_string()
             + "; bounded check, not a proof";
    return r;
}

// ---------------------------------------------------------------------------
// Family-level checks

/**
 * For nontrivial G and F satisfying S2, A3 and A4, the conditions S5, S4, S1
 * and A1 are equivalent; the report checks that the verdicts agree.
 */
inline Report check_equivalence_lemma(const FamilyDescriptor& f, const Budget& budget = {})
{
    using C = Condition;
    Report r;
    r.procedure = "equivalence-lemma";
    r.citation = "under S2, A3 and A4 in a nontrivial group, S5, S4, S1 and A1 are equivalent";
    r.parameters = json{{"family", f.to_string()}};
    std::map<C, Verdict> v;
    for (auto c : {C::S2, C::A3, C::A4, C::S5, C::S4, C::S1, C::A1}) {
        v.emplace(c, check_condition(f, c, budget));
    }
    json verdicts = json::object();
    for (auto c : {C::S2, C::A3, C::A4, C::S5, C::S4, C::S1, C::A1}) {
        verdicts[to_string(c)] = to_string(v.at(c).outcome);
    }
    r.witness = json{{"verdicts", verdicts}};
    if (f.group.is_trivial()) {
        r.status = Report::Status::HypothesisUnmet;
        r.note = "the group is trivial";
        return r;
    }
    std::vector<C> unmet;
    for (auto c : {C::S2, C::A3, C::A4}) {
        if (!v.at(c).holds()) {
            unmet.push_back(c);
        }
    }
    if (!unmet.empty()) {
        r.status = Report::Status::HypothesisUnmet;
        r.note = "hypothesis " + detail::names(unmet) + " does not hold; lemma not applicable";
        return r;
    }
    const auto first = v.at(C::S5).outcome;
    const std::array<C, 3> rest{C::S4, C::S1, C::A1};
    const bool agree = std::all_of(rest.begin(), rest.end(), [&](C c) { return v.at(c).outcome == first; });
    r.status = agree && first != Verdict::Outcome::UnknownWithinBudget ? Report::Status::Pass : Report::Status::Fail;
    return r;
}

enum class ProbeOp { Add, Mul };

namespace detail {

inline SupportSet finite_support(const Series& s, const GroupElement& bound)
{
    TermList list = coefficients_up_to(s, Horizon(bound, 1U << 20));
    return SupportSet::finite(s.group(), list.support());
}

inline GroupElement family_top(const FamilyDescriptor& f)
{
    GroupElement top = group_zero(f.group);
    for (const auto& m : f.members) {
        for (const auto& e : m.elements()) {
            top = max_of(top, e);
        }
    }
    return top;
}

struct ProbeOutcome {
    bool closed = true;
    std::optional<json> witness;

    void refute(json w)
    {
        if (closed) {
            closed = false;
            witness = std::move(w);
        }
    }
};

inline json probe_witness(const std::string& kind, const std::vector<SupportSet>& inputs, const SupportSet& result)
{
    json in = json::array();
    for (const auto& s : inputs) {
        in.push_back(s.to_string());
    }
    return json{{"construction", kind}, {"inputs", std::move(in)}, {"result_support", result.to_string()}};
}

/// Additive closure by the witness constructions plus seeded random sums.
inline ProbeOutcome probe_addition(const FieldDescriptor& field, const FamilyDescriptor& f, const Budget& budget)
{
    ProbeOutcome out;
    const GroupElement top = max_of(family_top(f), group_zero(f.group));
    const SupportSet empty = SupportSet::empty(f.group);
    if (!explicit_member(f, empty)) {
        // 0 = a + (-a) has empty support.
        out.refute(probe_witness("a + (-a)", f.members.empty() ? std::vector<SupportSet>{} : std::vector<SupportSet>{f.members.front()}, empty));
        return out;
    }
    for (const auto& a : f.members) {
        for (const auto& b : f.members) {
            GroupWitnesses w = build_group_witnesses(a, b, field);
            SupportSet u = finite_support(w.union_pair.first + w.union_pair.second, top);
            if (!explicit_member(f, u)) {
                out.refute(probe_witness("union witness a + b", {a, b}, u));
                return out;
            }
        }
        if (a.size() > budget.max_subset_size) {
            continue;
        }
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << a.size()); ++mask) {
            std::vector<GroupElement> sub;
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (mask >> i & 1U) {
                    sub.push_back(a.elements()[i]);
                }
            }
            SupportSet b = SupportSet::finite(f.group, std::move(sub));
            GroupWitnesses w = build_group_witnesses(a, b, field);
            SupportSet s = finite_support(w.subset->first + w.subset->second, top);
            if (!explicit_member(f, s)) {
                out.refute(probe_witness("subset witness a + c", {a, b}, s));
                return out;
            }
        }
    }
    if (f.members.empty()) {
        return out;
    }
    std::mt19937_64 rng(budget.seed);
    std::uniform_int_distribution<std::size_t> pick(0, f.members.size() - 1);
    std::uniform_int_distribution<int> coef(-3, 3);
    for (std::size_t i = 0; i < budget.random_probes; ++i) {
        const SupportSet& a = f.members[pick(rng)];
        const SupportSet& b = f.members[pick(rng)];
        auto random_series = [&](const SupportSet& s) {
            std::vector<Term> terms;
            for (const auto& e : s.elements()) {
                FieldElement c = FieldElement::from_int(field, coef(rng));
                if (c.is_zero()) {
                    c = FieldElement::one(field);
                }
                terms.push_back(Term{e, c});
            }
            return Series::literal(f.group, field, std::move(terms));
        };
        SupportSet s = finite_support(random_series(a) + random_series(b), top);
        if (!explicit_member(f, s)) {
            out.refute(probe_witness("random sum", {a, b}, s));
            return out;
        }
    }
    return out;
}

} // namespace detail

/**
 * Brute-force closure of k((F)) for an explicit family: additive closure via
 * the witness constructions and random sums, multiplicative closure via
 * all-ones series (whose product support is the sum of supports in char 0).
 * The verdict is cross-checked against the condition-based prediction.
 */
inline Report brute_force_closure_probe(const FieldDescriptor& field, const FamilyDescriptor& f, ProbeOp op,
                                        const Budget& budget = {})
{
    using C = Condition;
    if (f.kind != FamilyDescriptor::Kind::Explicit) {
        throw precondition_violation("closure probe needs an explicit family");
    }
    Report r;
    r.procedure = "closure-probe";
    r.parameters = json{{"field", field.name()}, {"family", f.to_string()}, {"op", op == ProbeOp::Add ? "add" : "mul"}};
    const auto verdicts = check_all_conditions(f, budget);
    auto holds = [&](std::initializer_list<C> cs) {
        return std::all_of(cs.begin(), cs.end(), [&](C c) { return verdicts.at(c).holds(); });
    };
    auto decided = [&](std::initializer_list<C> cs) {
        return std::all_of(cs.begin(), cs.end(), [&](C c) { return verdicts.at(c).outcome != Verdict::Outcome::UnknownWithinBudget; });
    };

    detail::ProbeOutcome additive = detail::probe_addition(field, f, budget);
    bool closed = additive.closed;
    std::optional<json> witness = additive.witness;
    bool predicted = false;
    if (op == ProbeOp::Add) {
        r.citation = "over k != F2, k((F)) is an additive group iff F satisfies S2, S3 and S5";
        if (!decided({C::S2, C::S3, C::S5})) {
            r.status = Report::Status::HypothesisUnmet;
            r.note = "condition verdicts undecided within budget";
            return r;
        }
        predicted = holds({C::S2, C::S3, C::S5});
    } else {
        r.citation = "with non-cancelling coefficients, k((F)) is a subring iff F satisfies S2, S3, S5 and A2";
        if (field.characteristic() != 0 && !field.declared_large()) {
            r.status = Report::Status::HypothesisUnmet;
            r.note = "multiplicative converse needs char k = 0 or a large k";
            return r;
        }
        if (!decided({C::S2, C::S3, C::S5, C::A2})) {
            r.status = Report::Status::HypothesisUnmet;
            r.note = "condition verdicts undecided within budget";
            return r;
        }
        predicted = holds({C::S2, C::S3, C::S5, C::A2});
        const FieldElement one = FieldElement::one(field);
        auto ones = [&](const SupportSet& s) {
            std::vector<Term> terms;
            for (const auto& e : s.elements()) {
                terms.push_back(Term{e, one});
            }
            return Series::literal(f.group, field, std::move(terms));
        };
        std::optional<json> product_witness;
        for (const auto& a : f.members) {
            for (const auto& b : f.members) {
                if (product_witness) {
                    break;
                }
                GroupElement top = group_zero(f.group);
                if (!a.empty() && !b.empty()) {
                    top = max_of(top, a.elements().back() + b.elements().back());
                }
                SupportSet s = detail::finite_support(ones(a) * ones(b), top);
                if (!detail::explicit_member(f, s)) {
                    product_witness = detail::probe_witness("all-ones product a * b", {a, b}, s);
                }
            }
        }
        if (product_witness) {
            closed = false;
            witness = product_witness;
        }
    }
    json w = json{{"closed", closed}, {"predicted", predicted}};
    if (witness) {
        w["counterexample"] = *witness;
    }
    r.witness = std::move(w);
    r.status = closed == predicted ? Report::Status::Pass : Report::Status::Fail;
    if (closed != predicted) {
        r.note = "brute force disagrees with the condition-based prediction";
    }
    return r;
}

// ---------------------------------------------------------------------------
// Catalog and suite

struct CatalogEntry {
    std::string name;
    FieldDescriptor field;
    FamilyDescriptor family;
    /// Expected flag values, in Classification::flags() order.
    std::vector<std::pair<std::string, Truth>> expected;
};

inline std::vector<CatalogEntry> classification_catalog()
{
    const auto Q = FieldDescriptor::rationals();
    const auto Z = GroupDescriptor::integers();
    const auto T = GroupDescriptor::trivial();
    const auto zero = group_zero(T);
    using enum Truth;
    std::vector<CatalogEntry> out;
    out.push_back({"Q, W(Z)", Q, FamilyDescriptor::well_ordered(Region::whole(Z)),
                   {{"additive_subgroup", Yes}, {"subring", Yes}, {"has_identity", Yes}, {"subfield", Yes},
                    {"hahn_field", Yes}, {"rayner_field", Yes}, {"restriction_closed", Yes}, {"truncation_closed", Yes}}});
    out.push_back({"Q, W(Z>=0)", Q, FamilyDescriptor::well_ordered(Region::nonneg_cone(Z)),
                   {{"additive_subgroup", Yes}, {"subring", Yes}, {"has_identity", Yes}, {"subfield", No},
                    {"hahn_field", No}, {"rayner_field", No}, {"restriction_closed", Yes}, {"truncation_closed", Yes}}});
    out.push_back({"Q, FIN(Z)", Q, FamilyDescriptor::finite_subsets(Region::whole(Z)),
                   {{"additive_subgroup", Yes}, {"subring", Yes}, {"has_identity", Yes}, {"subfield", No},
                    {"hahn_field", No}, {"rayner_field", No}, {"restriction_closed", Yes}, {"truncation_closed", Yes}}});
    for (const auto& k : {Q, FieldDescriptor::prime_field(2), FieldDescriptor::prime_field(5)}) {
        const auto e = SupportSet::empty(T);
        const auto z0 = SupportSet::finite(T, {zero});
        std::vector<std::pair<std::string, std::vector<SupportSet>>> families{
            {"{}", {}}, {"{{}}", {e}}, {"{{0}}", {z0}}, {"{{},{0}}", {e, z0}}};
        for (const auto& [label, members] : families) {
            const bool rayner = members.size() == 2;
            out.push_back({k.name() + ", trivial G, explicit" + label, k, FamilyDescriptor::explicit_family(T, members),
                           {{"rayner_field", rayner ? Yes : No}}});
        }
    }
    return out;
}

inline Report verify_catalog_entry(const CatalogEntry& entry, const Budget& budget = {})
{
    Report r;
    r.procedure = "classification";
    r.citation = "Rayner field families give Hahn fields; in characteristic 0 the converse holds";
    r.parameters = json{{"field", entry.field.name()}, {"family", entry.family.to_string()}};
    Classification c = classify_khull(entry.field, entry.family, budget);
    json mismatches = json::array();
    for (const auto& [name, value] : entry.expected) {
        for (const auto& [flag_name, flag] : c.flags()) {
            if (flag_name == name && flag->value != value) {
                mismatches.push_back(json{{"flag", name}, {"expected", to_string(value)}, {"actual", to_string(flag->value)}});
            }
        }
    }
    r.status = mismatches.empty() ? Report::Status::Pass : Report::Status::Fail;
    r.witness = json{{"mismatches", std::move(mismatches)}};
    return r;
}

struct SuiteOptions {
    std::uint64_t seed = 0;
    std::size_t term_bound = 10000;
};

/// Runs every verifier with default parameters, ordered by verifier name.
inline std::vector<Report> run_suite(const std::string& filter = {}, const SuiteOptions& options = {})
{
    const auto Z = GroupDescriptor::integers();
    const auto Q = FieldDescriptor::rationals();
    auto z = [&](long long n) { return GroupElement::scalar(Z, n); };
    Budget budget;
    budget.seed = options.seed;
    budget.term_bound = options.term_bound;
    std::vector<Report> out;
    auto wanted = [&](const std::string& name) { return filter.empty() || filter == name; };

    if (wanted("classification")) {
        for (const auto& entry : classification_catalog()) {
            out.push_back(verify_catalog_entry(entry, budget));
        }
    }
    if (wanted("closure-probe")) {
        const auto fam = [&](std::vector<std::vector<long long>> sets) {
            std::vector<SupportSet> members;
            for (const auto& s : sets) {
                std::vector<GroupElement> elems;
                for (auto v : s) {
                    elems.push_back(z(v));
                }
                members.push_back(SupportSet::finite(Z, std::move(elems)));
            }
            return FamilyDescriptor::explicit_family(Z, std::move(members));
        };
        const auto all_subsets = fam({{}, {0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}});
        const auto small = fam({{}, {0}, {1}});
        out.push_back(brute_force_closure_probe(Q, all_subsets, ProbeOp::Add, budget));
        out.push_back(brute_force_closure_probe(Q, small, ProbeOp::Add, budget));
        out.push_back(brute_force_closure_probe(Q, small, ProbeOp::Mul, budget));
    }
    if (wanted("equivalence-lemma")) {
        out.push_back(check_equivalence_lemma(FamilyDescriptor::well_ordered(Region::whole(Z)), budget));
        out.push_back(check_equivalence_lemma(FamilyDescriptor::well_ordered(Region::nonneg_cone(Z)), budget));
        out.push_back(check_equivalence_lemma(
            FamilyDescriptor::explicit_family(Z, {SupportSet::empty(Z), SupportSet::finite(Z, {z(0)})}), budget));
    }
    if (wanted("fp-gap")) {
        for (std::uint64_t p : {2, 3, 5, 7, 11, 13}) {
            out.push_back(verify_fp_gap(p, Horizon(z(static_cast<long long>(2 * p)), options.term_bound)));
        }
    }
    if (wanted("neumann-support")) {
        Series a = Series::t(Q, z(2)) + Series::t(Q, z(3));
        out.push_back(verify_neumann_support(a, Horizon(z(7), options.term_bound)));
        out.push_back(verify_neumann_support(Series::t(Q, z(1)), Horizon(z(10), options.term_bound)));
    }
    if (wanted("product-support")) {
        Series a = Series::t(Q, z(2)) + Series::t(Q, z(3));
        Series b = Series::one(Z, Q) + Series::t(Q, z(1));
        out.push_back(verify_product_support(a, b, Horizon(z(6), options.term_bound)));
        const auto F2x = FieldDescriptor::rational_functions(2);
        const auto x = FieldElement::variable(F2x);
        Series c = Series::one(Z, F2x) + Series::monomial(x, z(1));
        Series d = Series::one(Z, F2x) + Series::monomial(x * x, z(1));
        out.push_back(verify_product_support(c, d, Horizon(z(4), options.term_bound)));
    }
    if (wanted("truncation-f2")) {
        out.push_back(refute_truncation_closure_F2(6, Horizon(z(30), options.term_bound)));
    }
    return out;
}

inline const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"classification", "closure-probe", "equivalence-lemma", "fp-gap",
                                                "neumann-support", "product-support", "truncation-f2"};
    return names;
}

} // namespace rayner
