#pragma once

/**
 * @file supports.hpp
 * @brief Well-ordered support sets, symbolic families of supports and the
 *        closure conditions S1-S6 / A1-A5 on such families.
 *
 * Families are descriptors, never extensional sets of sets: W(S) is all
 * well-ordered subsets of a region S, FIN(S) all finite ones, and an explicit
 * family lists finitely many finite sets. Conditions are decided by rule
 * tables where possible and by exhaustive or bounded search otherwise.
 */

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
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
#include "rayner/series.hpp"

namespace rayner {

enum class Truth { Yes, No, Unknown };

inline std::string to_string(Truth t)
{
    switch (t) {
    case Truth::Yes:
        return "yes";
    case Truth::No:
        return "no";
    case Truth::Unknown:
        return "unknown";
    }
    return "?";
}

/**
 * A well-ordered subset of G. Either an explicit finite set, or the prefix
 * A ∩ (-inf, known_through] of a possibly infinite set enumerated in
 * increasing order.
 */
class SupportSet {
public:
    static SupportSet finite(const GroupDescriptor& group, std::vector<GroupElement> elements)
    {
        std::sort(elements.begin(), elements.end());
        elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
        for (const auto& e : elements) {
            if (e.group() != group) {
                throw descriptor_mismatch("support element from " + e.group().name() + " in a set over " + group.name());
            }
        }
        return SupportSet(group, std::move(elements), std::nullopt, false);
    }

    static SupportSet empty(const GroupDescriptor& group) { return finite(group, {}); }

    /// Prefix of an enumeration: exactly the elements <= known_through.
    static SupportSet prefix(const GroupDescriptor& group, std::vector<GroupElement> elements, GroupElement known_through,
                             bool budget_exhausted)
    {
        for (std::size_t i = 1; i < elements.size(); ++i) {
            if (!(elements[i - 1] < elements[i])) {
                throw precondition_violation("support enumeration is not strictly increasing");
            }
        }
        return SupportSet(group, std::move(elements), std::move(known_through), budget_exhausted);
    }

    /**
     * Pulls from @p next (strictly increasing) until it is exhausted, passes
     * the exponent bound, or term_bound elements have been taken.
     */
    static SupportSet enumerate(const GroupDescriptor& group, const std::function<std::optional<GroupElement>()>& next,
                                const Horizon& h)
    {
        std::vector<GroupElement> out;
        while (true) {
            std::optional<GroupElement> e = next();
            if (!e) {
                return prefix(group, std::move(out), h.exp_bound, false).as_finite();
            }
            if (!out.empty() && !(out.back() < *e)) {
                throw precondition_violation("support enumeration is not strictly increasing at " + e->to_string());
            }
            if (h.exp_bound < *e) {
                return prefix(group, std::move(out), h.exp_bound, false);
            }
            if (out.size() == h.term_bound) {
                GroupElement last = out.back();
                return prefix(group, std::move(out), std::move(last), true);
            }
            out.push_back(std::move(*e));
        }
    }

    /// Support of an evaluated series prefix.
    static SupportSet of(const TermList& list)
    {
        return prefix(list.group(), list.support(), list.valid_through(), !list.complete());
    }

    const GroupDescriptor& group() const noexcept { return group_; }
    const std::vector<GroupElement>& elements() const noexcept { return elements_; }
    bool is_finite() const noexcept { return !known_through_.has_value(); }
    const std::optional<GroupElement>& known_through() const noexcept { return known_through_; }
    bool budget_exhausted() const noexcept { return budget_exhausted_; }
    bool empty() const noexcept { return elements_.empty(); }
    std::size_t size() const noexcept { return elements_.size(); }

    /// Membership; Unknown when g lies beyond the enumerated prefix.
    Truth contains(const GroupElement& g) const
    {
        if (std::binary_search(elements_.begin(), elements_.end(), g)) {
            return Truth::Yes;
        }
        if (known_through_ && *known_through_ < g) {
            return Truth::Unknown;
        }
        return Truth::No;
    }

    /// Restriction to elements <= bound (prefixes keep their lower known_through).
    SupportSet up_to(const GroupElement& bound) const
    {
        std::vector<GroupElement> kept;
        for (const auto& e : elements_) {
            if (bound < e) {
                break;
            }
            kept.push_back(e);
        }
        if (is_finite()) {
            return prefix(group_, std::move(kept), bound, false);
        }
        return prefix(group_, std::move(kept), min_of(bound, *known_through_), budget_exhausted_);
    }

    /// `{0,2,5}`; prefixes print as `{0,1,2,...}` followed by their exact range.
    std::string to_string() const
    {
        std::string out = "{";
        for (std::size_t i = 0; i < elements_.size(); ++i) {
            if (i != 0) {
                out += ",";
            }
            out += elements_[i].to_string();
        }
        if (known_through_) {
            out += elements_.empty() ? "..." : ",...";
            out += "} (exact through " + known_through_->to_string() + ")";
            return out;
        }
        return out + "}";
    }

    friend bool operator==(const SupportSet& a, const SupportSet& b)
    {
        return a.group_ == b.group_ && a.elements_ == b.elements_ && a.known_through_ == b.known_through_;
    }

private:
    SupportSet(GroupDescriptor group, std::vector<GroupElement> elements, std::optional<GroupElement> known_through,
               bool budget_exhausted)
        : group_(group), elements_(std::move(elements)), known_through_(std::move(known_through)), budget_exhausted_(budget_exhausted)
    {
    }

    SupportSet as_finite() &&
    {
        known_through_.reset();
        budget_exhausted_ = false;
        return std::move(*this);
    }

    GroupDescriptor group_;
    std::vector<GroupElement> elements_;
    std::optional<GroupElement> known_through_;
    bool budget_exhausted_ = false;
};

namespace detail {

inline void same_group(const SupportSet& a, const SupportSet& b)
{
    if (a.group() != b.group()) {
        throw descriptor_mismatch("support sets over " + a.group().name() + " and " + b.group().name());
    }
}

inline SupportSet sorted_prefix(const GroupDescriptor& group, std::set<GroupElement> values, GroupElement limit,
                                std::size_t term_bound)
{
    std::vector<GroupElement> out;
    bool exhausted = false;
    for (auto& v : values) {
        if (limit < v) {
            break;
        }
        if (out.size() == term_bound) {
            exhausted = true;
            break;
        }
        out.push_back(v);
    }
    if (exhausted) {
        limit = out.back();
    }
    return SupportSet::prefix(group, std::move(out), std::move(limit), exhausted);
}

} // namespace detail

/// {a + b | a in A, b in B}, enumerated up to the horizon unless both inputs are finite.
inline SupportSet minkowski_sum(const SupportSet& a, const SupportSet& b, const Horizon& h)
{
    detail::same_group(a, b);
    if ((a.is_finite() && a.empty()) || (b.is_finite() && b.empty())) {
        return SupportSet::empty(a.group());
    }
    if (a.is_finite() && b.is_finite()) {
        std::vector<GroupElement> out;
        out.reserve(a.size() * b.size());
        for (const auto& x : a.elements()) {
            for (const auto& y : b.elements()) {
                out.push_back(x + y);
            }
        }
        return SupportSet::finite(a.group(), std::move(out));
    }
    // Lower bound of the unseen part of each operand; sums beyond the known window may be missing.
    auto low = [](const SupportSet& s) { return s.empty() ? *s.known_through() : s.elements().front(); };
    GroupElement limit = h.exp_bound;
    if (!a.is_finite()) {
        limit = min_of(limit, *a.known_through() + low(b));
    }
    if (!b.is_finite()) {
        limit = min_of(limit, *b.known_through() + low(a));
    }
    std::set<GroupElement> sums;
    for (const auto& x : a.elements()) {
        for (const auto& y : b.elements()) {
            GroupElement s = x + y;
            if (limit < s) {
                break;
            }
            sums.insert(std::move(s));
        }
    }
    return detail::sorted_prefix(a.group(), std::move(sums), std::move(limit), h.term_bound);
}

/// A + g.
inline SupportSet translate(const SupportSet& a, const GroupElement& g)
{
    std::vector<GroupElement> out;
    out.reserve(a.size());
    for (const auto& e : a.elements()) {
        out.push_back(e + g);
    }
    if (a.is_finite()) {
        return SupportSet::finite(a.group(), std::move(out));
    }
    return SupportSet::prefix(a.group(), std::move(out), *a.known_through() + g, a.budget_exhausted());
}

/**
 * All finite sums of elements of A (including the empty sum 0), enumerated up
 * to the horizon. The closure of the empty set is {0}.
 */
inline SupportSet finite_sums_closure(const SupportSet& a, const Horizon& h)
{
    const GroupElement zero = group_zero(a.group());
    std::vector<GroupElement> positives;
    for (const auto& e : a.elements()) {
        const int s = e.sign();
        if (s < 0) {
            throw not_in_nonneg_cone("finite-sum closure of a set containing " + e.to_string());
        }
        if (s > 0) {
            positives.push_back(e);
        }
    }
    if (positives.empty() && a.is_finite()) {
        return SupportSet::finite(a.group(), {zero});
    }
    GroupElement limit = h.exp_bound;
    if (!a.is_finite()) {
        limit = min_of(limit, *a.known_through());
    }
    if (limit < zero) {
        return SupportSet::prefix(a.group(), {}, std::move(limit), false);
    }
    std::set<GroupElement> pending{zero};
    std::vector<GroupElement> out;
    while (!pending.empty()) {
        if (out.size() == h.term_bound) {
            GroupElement last = out.back();
            return SupportSet::prefix(a.group(), std::move(out), std::move(last), true);
        }
        GroupElement g = *pending.begin();
        pending.erase(pending.begin());
        for (const auto& p : positives) {
            GroupElement next = g + p;
            if (limit < next) {
                break;
            }
            pending.insert(std::move(next));
        }
        out.push_back(std::move(g));
    }
    return SupportSet::prefix(a.group(), std::move(out), std::move(limit), false);
}

/**
 * B is an initial segment of A: B ⊆ A and no element of A \ B precedes an
 * element of B. Decided exactly for finite sets, on the common exact window
 * otherwise.
 */
inline bool is_initial_segment(const SupportSet& b, const SupportSet& a, const Horizon& h)
{
    detail::same_group(a, b);
    std::optional<GroupElement> window;
    if (!a.is_finite() || !b.is_finite()) {
        window = h.exp_bound;
        if (!a.is_finite()) {
            window = min_of(*window, *a.known_through());
        }
        if (!b.is_finite()) {
            window = min_of(*window, *b.known_through());
        }
    }
    auto in_window = [&](const GroupElement& g) { return !window || !(*window < g); };
    std::vector<GroupElement> bw;
    for (const auto& e : b.elements()) {
        if (in_window(e)) {
            bw.push_back(e);
        }
    }
    for (const auto& e : bw) {
        if (a.contains(e) != Truth::Yes) {
            return false;
        }
    }
    if (bw.empty()) {
        return true;
    }
    for (const auto& e : a.elements()) {
        if (bw.back() < e) {
            break;
        }
        if (!std::binary_search(bw.begin(), bw.end(), e)) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Regions and families

struct Budget {
    /// Longest sum explored by bounded submonoid search.
    std::size_t max_sum_length = 12;
    std::size_t term_bound = 10000;
    /// Largest explicit member whose subsets are enumerated.
    std::size_t max_subset_size = 16;
    std::size_t random_probes = 64;
    std::uint64_t seed = 0;
};

struct Region {
    enum class Kind { WholeGroup, NonNegCone, PosCone, SubmonoidGen, SubgroupGen, FiniteSet };

    Kind kind = Kind::WholeGroup;
    GroupDescriptor group = GroupDescriptor::integers();
    /// Generators or elements, sorted and deduplicated.
    std::vector<GroupElement> elements;

    static Region whole(const GroupDescriptor& g) { return {Kind::WholeGroup, g, {}}; }
    static Region nonneg_cone(const GroupDescriptor& g) { return {Kind::NonNegCone, g, {}}; }
    static Region pos_cone(const GroupDescriptor& g) { return {Kind::PosCone, g, {}}; }
    static Region submonoid(const GroupDescriptor& g, std::vector<GroupElement> gens) { return make(Kind::SubmonoidGen, g, std::move(gens)); }
    static Region subgroup(const GroupDescriptor& g, std::vector<GroupElement> gens) { return make(Kind::SubgroupGen, g, std::move(gens)); }
    static Region finite_set(const GroupDescriptor& g, std::vector<GroupElement> elems) { return make(Kind::FiniteSet, g, std::move(elems)); }

    /// Descriptor syntax: `Z`, `Z>=0`, `Z>0`, `mon{2,3}`, `grp{4,6}`, `set{0,1}`.
    std::string to_string() const
    {
        auto list = [this] {
            std::string out = "{";
            for (std::size_t i = 0; i < elements.size(); ++i) {
                out += (i != 0 ? "," : "") + elements[i].to_string();
            }
            return out + "}";
        };
        switch (kind) {
        case Kind::WholeGroup:
            return group.name();
        case Kind::NonNegCone:
            return group.name() + ">=0";
        case Kind::PosCone:
            return group.name() + ">0";
        case Kind::SubmonoidGen:
            return "mon" + list();
        case Kind::SubgroupGen:
            return "grp" + list();
        case Kind::FiniteSet:
            return "set" + list();
        }
        return "?";
    }

private:
    static Region make(Kind kind, const GroupDescriptor& g, std::vector<GroupElement> elems)
    {
        for (const auto& e : elems) {
            if (e.group() != g) {
                throw descriptor_mismatch("region element from " + e.group().name() + " in region over " + g.name());
            }
        }
        std::sort(elems.begin(), elems.end());
        elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
        return {kind, g, std::move(elems)};
    }
};

struct FamilyDescriptor {
    enum class Kind { W, FIN, Explicit };

    Kind kind = Kind::W;
    GroupDescriptor group = GroupDescriptor::integers();
    Region region;
    /// Explicit members (finite sets), sorted and deduplicated.
    std::vector<SupportSet> members;

    static FamilyDescriptor well_ordered(Region r) { return {Kind::W, r.group, std::move(r), {}}; }
    static FamilyDescriptor finite_subsets(Region r) { return {Kind::FIN, r.group, std::move(r), {}}; }

    static FamilyDescriptor explicit_family(const GroupDescriptor& g, std::vector<SupportSet> sets)
    {
        for (const auto& s : sets) {
            if (!s.is_finite()) {
                throw precondition_violation("explicit family members must be finite sets");
            }
            if (s.group() != g) {
                throw descriptor_mismatch("family member over " + s.group().name() + " in a family over " + g.name());
            }
        }
        std::sort(sets.begin(), sets.end(), [](const SupportSet& x, const SupportSet& y) {
            return std::lexicographical_compare(x.elements().begin(), x.elements().end(), y.elements().begin(), y.elements().end());
        });
        sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
        return {Kind::Explicit, g, Region::whole(g), std::move(sets)};
    }

    /// Descriptor syntax: `W(Z>=0)`, `FIN(Z)`, `explicit{{},{0},{0,1}}`.
    std::string to_string() const
    {
        switch (kind) {
        case Kind::W:
            return "W(" + region.to_string() + ")";
        case Kind::FIN:
            return "FIN(" + region.to_string() + ")";
        case Kind::Explicit: {
            std::string out = "explicit{";
            for (std::size_t i = 0; i < members.size(); ++i) {
                out += (i != 0 ? "," : "") + members[i].to_string();
            }
            return out + "}";
        }
        }
        return "?";
    }
};

namespace detail {

inline BigInt lcm_of_denominators(const std::vector<GroupElement>& values)
{
    BigInt l = 1;
    for (const auto& v : values) {
        l = boost::multiprecision::lcm(l, denominator(v.coords()[0]));
    }
    return l;
}

/// Bounded breadth-first search over sums of at most max_len generators.
inline bool bounded_sum_search(const std::vector<GroupElement>& gens, const GroupElement& target, std::size_t max_len)
{
    std::set<GroupElement> frontier{group_zero(target.group())};
    std::set<GroupElement> seen = frontier;
    if (target.is_zero()) {
        return true;
    }
    for (std::size_t len = 1; len <= max_len && !frontier.empty(); ++len) {
        std::set<GroupElement> next;
        for (const auto& f : frontier) {
            for (const auto& g : gens) {
                GroupElement s = f + g;
                if (s == target) {
                    return true;
                }
                if (seen.insert(s).second) {
                    next.insert(std::move(s));
                }
            }
        }
        frontier = std::move(next);
        if (seen.size() > 2'000'000) {
            break;
        }
    }
    return false;
}

} // namespace detail

/**
 * Membership in the submonoid generated by @p gens. Exact in Z and Q (coin
 * problem after scaling to integers); bounded search plus sign and lattice
 * arguments in Z^n.
 */
inline Truth monoid_contains(const std::vector<GroupElement>& gens, const GroupElement& g, const Budget& budget)
{
    const GroupDescriptor& group = g.group();
    if (group.is_trivial() || g.is_zero()) {
        return Truth::Yes;
    }
    std::vector<GroupElement> nonzero;
    bool has_pos = false;
    bool has_neg = false;
    for (const auto& x : gens) {
        if (x.group() != group) {
            throw descriptor_mismatch("monoid generator from " + x.group().name());
        }
        const int s = x.sign();
        if (s != 0) {
            nonzero.push_back(x);
            has_pos = has_pos || s > 0;
            has_neg = has_neg || s < 0;
        }
    }
    if (nonzero.empty()) {
        return Truth::No;
    }
    if (!subgroup_contains(nonzero, g)) {
        return Truth::No;
    }
    if ((!has_neg && g.sign() < 0) || (!has_pos && g.sign() > 0)) {
        return Truth::No;
    }
    if (group.rank() == 1 && group.kind() != GroupDescriptor::Kind::LexProduct) {
        if (has_pos && has_neg) {
            // A monoid in a rank-one group with elements of both signs is a group.
            return Truth::Yes;
        }
        std::vector<GroupElement> all = nonzero;
        all.push_back(g);
        const BigInt scale = detail::lcm_of_denominators(all);
        auto to_int = [&](const GroupElement& x) { return detail::abs_int(numerator(BigRational(x.coords()[0] * scale))); };
        const BigInt target = to_int(g);
        constexpr long long coin_limit = 2'000'000;
        if (target <= coin_limit) {
            const auto n = static_cast<std::size_t>(target);
            std::vector<std::size_t> coins;
            for (const auto& x : nonzero) {
                BigInt c = to_int(x);
                if (c <= target) {
                    coins.push_back(static_cast<std::size_t>(c));
                }
            }
            std::vector<char> reach(n + 1, 0);
            reach[0] = 1;
            for (std::size_t v = 1; v <= n; ++v) {
                for (auto c : coins) {
                    if (c <= v && reach[v - c]) {
                        reach[v] = 1;
                        break;
                    }
                }
            }
            return reach[n] ? Truth::Yes : Truth::No;
        }
    }
    return detail::bounded_sum_search(nonzero, g, budget.max_sum_length) ? Truth::Yes : Truth::Unknown;
}

inline Truth region_contains(const Region& r, const GroupElement& g, const Budget& budget = {})
{
    if (g.group() != r.group) {
        throw descriptor_mismatch("element of " + g.group().name() + " tested against a region over " + r.group.name());
    }
    switch (r.kind) {
    case Region::Kind::WholeGroup:
        return Truth::Yes;
    case Region::Kind::NonNegCone:
        return g.sign() >= 0 ? Truth::Yes : Truth::No;
    case Region::Kind::PosCone:
        return g.sign() > 0 ? Truth::Yes : Truth::No;
    case Region::Kind::SubgroupGen:
        return subgroup_contains(r.elements, g) ? Truth::Yes : Truth::No;
    case Region::Kind::SubmonoidGen:
        return monoid_contains(r.elements, g, budget);
    case Region::Kind::FiniteSet:
        return std::binary_search(r.elements.begin(), r.elements.end(), g) ? Truth::Yes : Truth::No;
    }
    return Truth::Unknown;
}

/// Result of a family membership test; `note` explains budget-limited answers.
struct Membership {
    bool value = false;
    std::string note;

    explicit operator bool() const noexcept { return value; }
};

/**
 * A ∈ F. For W(S) every enumerated element must lie in S; FIN(S) additionally
 * needs A to be finite; explicit families compare sets exactly. Raises
 * unknown_within_budget when submonoid membership cannot be settled.
 */
inline Membership family_contains(const FamilyDescriptor& f, const SupportSet& a, const Budget& budget = {})
{
    if (a.group() != f.group) {
        throw descriptor_mismatch("support over " + a.group().name() + " tested against a family over " + f.group.name());
    }
    if (f.kind == FamilyDescriptor::Kind::Explicit) {
        if (!a.is_finite()) {
            return {false, "enumerated set is not known to be finite"};
        }
        const bool found = std::find(f.members.begin(), f.members.end(), a) != f.members.end();
        return {found, ""};
    }
    if (f.kind == FamilyDescriptor::Kind::FIN && !a.is_finite()) {
        return {false, a.budget_exhausted() ? "enumeration exceeds the term budget: not a finite set"
                                            : "enumeration continues beyond the exponent bound: not known finite"};
    }
    for (const auto& e : a.elements()) {
        Truth t = region_contains(f.region, e, budget);
        if (t == Truth::No) {
            return {false, e.to_string() + " lies outside " + f.region.to_string()};
        }
        if (t == Truth::Unknown) {
            throw unknown_within_budget("membership of " + e.to_string() + " in " + f.region.to_string()
                                        + " is undecided within the search budget");
        }
    }
    if (!a.is_finite()) {
        return {true, "checked up to " + a.known_through()->to_string()};
    }
    return {true, ""};
}

// ---------------------------------------------------------------------------
// Conditions

enum class Condition { S1, S2, S3, S4, S5, S6, A1, A2, A3, A4, A5 };

inline constexpr std::array<Condition, 11> all_conditions{Condition::S1, Condition::S2, Condition::S3, Condition::S4,
                                                          Condition::S5, Condition::S6, Condition::A1, Condition::A2,
                                                          Condition::A3, Condition::A4, Condition::A5};

inline std::string to_string(Condition c)
{
    static const std::array<const char*, 11> names{"S1", "S2", "S3", "S4", "S5", "S6", "A1", "A2", "A3", "A4", "A5"};
    return names[static_cast<std::size_t>(c)];
}

inline std::optional<Condition> parse_condition(const std::string& s)
{
    for (auto c : all_conditions) {
        if (to_string(c) == s) {
            return c;
        }
    }
    return std::nullopt;
}

/// Human-readable statement of each condition.
inline std::string statement(Condition c)
{
    switch (c) {
    case Condition::S1:
        return "every singleton {g} is in F";
    case Condition::S2:
        return "F is closed under subsets";
    case Condition::S3:
        return "F is closed under unions of two members";
    case Condition::S4:
        return "{0} is in F";
    case Condition::S5:
        return "F is nonempty";
    case Condition::S6:
        return "F is closed under initial segments";
    case Condition::A1:
        return "the union of F generates G";
    case Condition::A2:
        return "F is closed under sums A+B";
    case Condition::A3:
        return "F is closed under translations";
    case Condition::A4:
        return "finite-sum closures of nonnegative members are in F";
    case Condition::A5:
        return "{g} in F implies {-g} in F";
    }
    return "?";
}

/**
 * Concrete counterexample: every premise is a member of F, `offending` is a
 * set the condition forces into F that is not a member, and `element` (A1/A3)
 * is the group element involved.
 */
struct Witness {
    std::vector<SupportSet> premises;
    std::optional<SupportSet> offending;
    std::optional<GroupElement> element;
    std::string description;
};

struct Verdict {
    enum class Outcome { Holds, Fails, UnknownWithinBudget };

    Outcome outcome = Outcome::UnknownWithinBudget;
    std::string rule;
    std::optional<Witness> witness;

    bool holds() const noexcept { return outcome == Outcome::Holds; }
    bool fails() const noexcept { return outcome == Outcome::Fails; }

    static Verdict hold(std::string rule) { return {Outcome::Holds, std::move(rule), std::nullopt}; }
    static Verdict fail(std::string rule, Witness w) { return {Outcome::Fails, std::move(rule), std::move(w)}; }
    static Verdict unknown(std::string rule) { return {Outcome::UnknownWithinBudget, std::move(rule), std::nullopt}; }
};

inline std::string to_string(Verdict::Outcome o)
{
    switch (o) {
    case Verdict::Outcome::Holds:
        return "holds";
    case Verdict::Outcome::Fails:
        return "fails";
    case Verdict::Outcome::UnknownWithinBudget:
        return "unknown";
    }
    return "?";
}

namespace detail {

inline SupportSet singleton(const GroupElement& g) { return SupportSet::finite(g.group(), {g}); }

/// Element g with the property that k*g for k = 0..n are pairwise distinct; nullopt in {0}.
inline std::optional<GroupElement> step(const GroupDescriptor& group) { return dominant_positive(group); }

/// Prefix of the finite-sum closure of A large enough to exhibit an element beyond @p beyond.
inline SupportSet closure_witness(const SupportSet& a, const GroupElement& beyond, const Budget& budget)
{
    GroupElement top = beyond;
    for (const auto& e : a.elements()) {
        top = max_of(top, e);
    }
    GroupElement smallest_positive = top;
    for (const auto& e : a.elements()) {
        if (e.sign() > 0) {
            smallest_positive = min_of(smallest_positive, e);
        }
    }
    GroupElement bound = top + top;
    for (const auto& e : a.elements()) {
        if (e.sign() > 0) {
            bound = max_of(bound, top + e);
        }
    }
    return finite_sums_closure(a, Horizon(bound, budget.term_bound));
}

// Facts about a region S used by the W(S) / FIN(S) rule tables.

struct ElementFact {
    Truth truth = Truth::Unknown;
    std::optional<GroupElement> witness;
};

/// Is S all of G? Witness: an element outside S.
inline ElementFact region_is_group(const Region& r, const Budget& budget)
{
    const GroupDescriptor& g = r.group;
    const GroupElement zero = group_zero(g);
    switch (r.kind) {
    case Region::Kind::WholeGroup:
        return {Truth::Yes, std::nullopt};
    case Region::Kind::NonNegCone:
        if (g.is_trivial()) {
            return {Truth::Yes, std::nullopt};
        }
        return {Truth::No, -*unit_positive(g)};
    case Region::Kind::PosCone:
        return {Truth::No, zero};
    case Region::Kind::SubgroupGen: {
        auto gap = subgroup_gap(g, r.elements);
        return gap ? ElementFact{Truth::No, gap} : ElementFact{Truth::Yes, std::nullopt};
    }
    case Region::Kind::SubmonoidGen: {
        if (auto gap = subgroup_gap(g, r.elements)) {
            return {Truth::No, gap};
        }
        // A submonoid containing the inverse of each generator is the generated group.
        bool unknown = false;
        for (const auto& x : r.elements) {
            Truth t = monoid_contains(r.elements, -x, budget);
            if (t == Truth::No) {
                return {Truth::No, -x};
            }
            unknown = unknown || t == Truth::Unknown;
        }
        if (!unknown) {
            return {Truth::Yes, std::nullopt};
        }
        std::mt19937_64 rng(budget.seed);
        std::uniform_int_distribution<int> coord(-3, 3);
        for (std::size_t i = 0; i < budget.random_probes; ++i) {
            std::vector<BigRational> c(g.rank());
            for (auto& v : c) {
                v = coord(rng);
            }
            GroupElement probe(g, std::move(c));
            if (monoid_contains(r.elements, probe, budget) == Truth::No) {
                return {Truth::No, probe};
            }
        }
        return {Truth::Unknown, std::nullopt};
    }
    case Region::Kind::FiniteSet:
        if (g.is_trivial()) {
            return r.elements.empty() ? ElementFact{Truth::No, zero} : ElementFact{Truth::Yes, std::nullopt};
        }
        for (long long k = 0;; ++k) {
            GroupElement candidate = k * *step(g);
            if (!std::binary_search(r.elements.begin(), r.elements.end(), candidate)) {
                return {Truth::No, candidate};
            }
        }
    }
    return {};
}

inline bool region_is_empty(const Region& r)
{
    switch (r.kind) {
    case Region::Kind::PosCone:
        return r.group.is_trivial();
    case Region::Kind::FiniteSet:
        return r.elements.empty();
    default:
        return false;
    }
}

/// Is S closed under +? Witness: a, b in S with a + b outside S.
inline std::pair<Truth, std::optional<std::pair<GroupElement, GroupElement>>> region_closed_under_sum(const Region& r)
{
    if (r.kind != Region::Kind::FiniteSet) {
        return {Truth::Yes, std::nullopt};
    }
    for (const auto& a : r.elements) {
        for (const auto& b : r.elements) {
            if (!std::binary_search(r.elements.begin(), r.elements.end(), a + b)) {
                return {Truth::No, std::make_pair(a, b)};
            }
        }
    }
    return {Truth::Yes, std::nullopt};
}

/// Is S = -S? Witness: g in S with -g outside S.
inline ElementFact region_symmetric(const Region& r, const Budget& budget)
{
    const GroupDescriptor& g = r.group;
    switch (r.kind) {
    case Region::Kind::WholeGroup:
    case Region::Kind::SubgroupGen:
        return {Truth::Yes, std::nullopt};
    case Region::Kind::NonNegCone:
    case Region::Kind::PosCone:
        if (g.is_trivial()) {
            return {Truth::Yes, std::nullopt};
        }
        return {Truth::No, *unit_positive(g)};
    case Region::Kind::SubmonoidGen: {
        bool unknown = false;
        for (const auto& x : r.elements) {
            Truth t = monoid_contains(r.elements, -x, budget);
            if (t == Truth::No) {
                return {Truth::No, x};
            }
            unknown = unknown || t == Truth::Unknown;
        }
        return {unknown ? Truth::Unknown : Truth::Yes, std::nullopt};
    }
    case Region::Kind::FiniteSet:
        for (const auto& x : r.elements) {
            if (!std::binary_search(r.elements.begin(), r.elements.end(), -x)) {
                return {Truth::No, x};
            }
        }
        return {Truth::Yes, std::nullopt};
    }
    return {};
}

/// Some element of S ∩ G^{>0}, or nullopt when that intersection is empty.
inline std::optional<GroupElement> region_positive_element(const Region& r)
{
    switch (r.kind) {
    case Region::Kind::WholeGroup:
    case Region::Kind::NonNegCone:
    case Region::Kind::PosCone:
        return unit_positive(r.group);
    case Region::Kind::SubgroupGen:
        for (const auto& x : r.elements) {
            if (x.sign() != 0) {
                return x.sign() > 0 ? x : -x;
            }
        }
        return std::nullopt;
    case Region::Kind::SubmonoidGen:
    case Region::Kind::FiniteSet:
        for (const auto& x : r.elements) {
            if (x.sign() > 0) {
                return x;
            }
        }
        return std::nullopt;
    }
    return std::nullopt;
}

inline bool region_contains_zero(const Region& r)
{
    switch (r.kind) {
    case Region::Kind::PosCone:
        return false;
    case Region::Kind::FiniteSet:
        return std::binary_search(r.elements.begin(), r.elements.end(), group_zero(r.group));
    default:
        return true;
    }
}

inline std::vector<GroupElement> region_generators(const Region& r)
{
    switch (r.kind) {
    case Region::Kind::WholeGroup:
    case Region::Kind::NonNegCone:
    case Region::Kind::PosCone: {
        std::vector<GroupElement> units;
        if (r.group.is_trivial()) {
            return units;
        }
        for (std::size_t i = 0; i < r.group.rank(); ++i) {
            std::vector<BigRational> c(r.group.rank());
            c[i] = 1;
            units.emplace_back(r.group, std::move(c));
        }
        if (r.group.kind() == GroupDescriptor::Kind::Rationals) {
            // Q is not finitely generated; the cone still generates it.
            return {};
        }
        return units;
    }
    default:
        return r.elements;
    }
}

inline Verdict check_region_family(const FamilyDescriptor& f, Condition cond, const Budget& budget)
{
    const Region& r = f.region;
    const GroupDescriptor& g = f.group;
    const bool fin = f.kind == FamilyDescriptor::Kind::FIN;
    const std::string fam = f.to_string();
    switch (cond) {
    case Condition::S1: {
        ElementFact eq = region_is_group(r, budget);
        if (eq.truth == Truth::Yes) {
            return Verdict::hold("singletons of " + fam + " are the singletons of S, and S = G");
        }
        if (eq.truth == Truth::No) {
            return Verdict::fail("a singleton {g} is in " + fam + " only if g lies in S",
                                 Witness{{}, singleton(*eq.witness), eq.witness, eq.witness->to_string() + " lies outside S"});
        }
        return Verdict::unknown("could not decide whether S = G within the search budget");
    }
    case Condition::S2:
        return Verdict::hold(std::string("subsets of ") + (fin ? "finite" : "well-ordered") + " subsets of S stay in the family");
    case Condition::S3:
        return Verdict::hold(std::string("the union of two ") + (fin ? "finite" : "well-ordered") + " subsets of S stays in the family");
    case Condition::S4:
        if (region_contains_zero(r)) {
            return Verdict::hold("0 lies in S");
        }
        return Verdict::fail("{0} is in the family only if 0 lies in S",
                             Witness{{}, singleton(group_zero(g)), std::nullopt, "0 lies outside S"});
    case Condition::S5:
        return Verdict::hold("the empty set belongs to every family of subsets of S");
    case Condition::S6:
        return Verdict::hold("initial segments are subsets");
    case Condition::A1: {
        if (r.kind == Region::Kind::WholeGroup || r.kind == Region::Kind::NonNegCone || r.kind == Region::Kind::PosCone) {
            return Verdict::hold("the cone of a nontrivial ordered group generates it (and {0} = <{}> in the trivial group)");
        }
        auto gap = subgroup_gap(g, region_generators(r));
        if (!gap) {
            return Verdict::hold("the generators of S generate G");
        }
        return Verdict::fail("the union of " + fam + " is S, which does not generate G",
                             Witness{{}, singleton(*gap), gap, gap->to_string() + " lies outside <S>"});
    }
    case Condition::A2: {
        auto [closed, pair] = region_closed_under_sum(r);
        if (closed == Truth::Yes) {
            return Verdict::hold("S is closed under addition");
        }
        const auto& [a, b] = *pair;
        return Verdict::fail("{a}+{b} = {a+b} must be in the family",
                             Witness{{singleton(a), singleton(b)}, singleton(a + b), std::nullopt,
                                     (a + b).to_string() + " lies outside S"});
    }
    case Condition::A3: {
        if (region_is_empty(r)) {
            return Verdict::hold("S is empty, so the family is {{}} and translation-invariant");
        }
        ElementFact eq = region_is_group(r, budget);
        if (eq.truth == Truth::Yes) {
            return Verdict::hold("S = G is translation-invariant");
        }
        if (eq.truth == Truth::Unknown) {
            return Verdict::unknown("could not decide whether S = G within the search budget");
        }
        // Translate an element of S onto the missing element.
        std::optional<GroupElement> member;
        for (const auto& cand : {group_zero(g)}) {
            if (region_contains(r, cand, budget) == Truth::Yes) {
                member = cand;
            }
        }
        if (!member) {
            member = region_positive_element(r);
        }
        if (!member && !r.elements.empty()) {
            member = r.elements.front();
        }
        if (!member) {
            return Verdict::unknown("no element of S found to translate");
        }
        GroupElement shift = *eq.witness - *member;
        return Verdict::fail("a nonempty S is translation-invariant only if S = G",
                             Witness{{singleton(*member)}, singleton(*eq.witness), shift,
                                     "{" + member->to_string() + "} + " + shift.to_string() + " leaves S"});
    }
    case Condition::A4: {
        if (!region_contains_zero(r)) {
            return Verdict::fail("the finite-sum closure of the empty set is {0}",
                                 Witness{{SupportSet::empty(g)}, singleton(group_zero(g)), std::nullopt, "0 lies outside S"});
        }
        auto pos = region_positive_element(r);
        if (fin) {
            if (!pos) {
                return Verdict::hold("S has no positive element, so every closure is {0}");
            }
            SupportSet a = singleton(*pos);
            return Verdict::fail("the finite-sum closure of a positive element is infinite",
                                 Witness{{a}, closure_witness(a, *pos, budget), std::nullopt,
                                         "finite sums of " + pos->to_string() + " form an infinite set"});
        }
        if (r.kind != Region::Kind::FiniteSet) {
            return Verdict::hold("S is closed under addition and contains 0");
        }
        if (!pos) {
            return Verdict::hold("S has no positive element, so every closure is {0}");
        }
        SupportSet a = singleton(*pos);
        return Verdict::fail("the finite-sum closure of a positive element is infinite, S is finite",
                             Witness{{a}, closure_witness(a, r.elements.back(), budget), std::nullopt,
                                     "finite sums of " + pos->to_string() + " leave S"});
    }
    case Condition::A5: {
        ElementFact sym = region_symmetric(r, budget);
        if (sym.truth == Truth::Yes) {
            return Verdict::hold("S = -S");
        }
        if (sym.truth == Truth::Unknown) {
            return Verdict::unknown("could not decide whether S = -S within the search budget");
        }
        return Verdict::fail("{g} in the family needs {-g} in the family",
                             Witness{{singleton(*sym.witness)}, singleton(-*sym.witness), std::nullopt,
                                     (-*sym.witness).to_string() + " lies outside S"});
    }
    }
    return Verdict::unknown("unhandled condition");
}

inline bool explicit_member(const FamilyDescriptor& f, const SupportSet& s)
{
    return s.is_finite() && std::find(f.members.begin(), f.members.end(), s) != f.members.end();
}

inline SupportSet set_union(const SupportSet& a, const SupportSet& b)
{
    std::vector<GroupElement> all = a.elements();
    all.insert(all.end(), b.elements().begin(), b.elements().end());
    return SupportSet::finite(a.group(), std::move(all));
}

inline Verdict check_explicit_family(const FamilyDescriptor& f, Condition cond, const Budget& budget)
{
    const GroupDescriptor& g = f.group;
    const auto& members = f.members;
    const GroupElement zero = group_zero(g);
    auto is_member = [&](const SupportSet& s) { return explicit_member(f, s); };
    switch (cond) {
    case Condition::S1: {
        if (g.is_trivial()) {
            if (is_member(singleton(zero))) {
                return Verdict::hold("G = {0} and {0} is a member");
            }
            return Verdict::fail("G = {0} needs {0} in F", Witness{{}, singleton(zero), zero, "{0} is not a member"});
        }
        // Among |F|+1 distinct singletons one is missing.
        for (long long k = 0;; ++k) {
            GroupElement e = k * *step(g);
            if (!is_member(singleton(e))) {
                return Verdict::fail("a finite family cannot contain every singleton of an infinite group",
                                     Witness{{}, singleton(e), e, "{" + e.to_string() + "} is not a member"});
            }
        }
    }
    case Condition::S2:
        for (const auto& a : members) {
            if (a.size() > budget.max_subset_size) {
                return Verdict::unknown("member " + a.to_string() + " is too large to enumerate its subsets");
            }
            const std::size_t n = a.size();
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
                std::vector<GroupElement> sub;
                for (std::size_t i = 0; i < n; ++i) {
                    if (mask & (std::uint64_t{1} << i)) {
                        sub.push_back(a.elements()[i]);
                    }
                }
                SupportSet b = SupportSet::finite(g, std::move(sub));
                if (!is_member(b)) {
                    return Verdict::fail("every subset of a member must be a member",
                                         Witness{{a}, b, std::nullopt, b.to_string() + " is a missing subset of " + a.to_string()});
                }
            }
        }
        return Verdict::hold("exhaustive check over all subsets of all members");
    case Condition::S3:
        for (const auto& a : members) {
            for (const auto& b : members) {
                SupportSet u = set_union(a, b);
                if (!is_member(u)) {
                    return Verdict::fail("unions of two members must be members",
                                         Witness{{a, b}, u, std::nullopt, u.to_string() + " is not a member"});
                }
            }
        }
        return Verdict::hold("exhaustive check over all pairs of members");
    case Condition::S4:
        if (is_member(singleton(zero))) {
            return Verdict::hold("{0} is a member");
        }
        return Verdict::fail("{0} must be a member", Witness{{}, singleton(zero), std::nullopt, "{0} is not a member"});
    case Condition::S5:
        if (!members.empty()) {
            return Verdict::hold("the family has a member");
        }
        return Verdict::fail("the family is empty", Witness{{}, SupportSet::empty(g), std::nullopt, "F has no members"});
    case Condition::S6:
        for (const auto& a : members) {
            for (std::size_t k = 0; k <= a.size(); ++k) {
                SupportSet b = SupportSet::finite(g, {a.elements().begin(), a.elements().begin() + static_cast<std::ptrdiff_t>(k)});
                if (!is_member(b)) {
                    return Verdict::fail("initial segments of members must be members",
                                         Witness{{a}, b, std::nullopt, b.to_string() + " is a missing initial segment"});
                }
            }
        }
        return Verdict::hold("exhaustive check over all initial segments");
    case Condition::A1: {
        std::vector<GroupElement> all;
        for (const auto& a : members) {
            all.insert(all.end(), a.elements().begin(), a.elements().end());
        }
        auto gap = subgroup_gap(g, all);
        if (!gap) {
            return Verdict::hold("the union of the members generates G");
        }
        return Verdict::fail("the union of the members must generate G",
                             Witness{{}, singleton(*gap), gap, gap->to_string() + " lies outside the generated subgroup"});
    }
    case Condition::A2:
        for (const auto& a : members) {
            for (const auto& b : members) {
                SupportSet s = minkowski_sum(a, b, Horizon(zero, budget.term_bound));
                if (!is_member(s)) {
                    return Verdict::fail("sums of two members must be members",
                                         Witness{{a, b}, s, std::nullopt, s.to_string() + " is not a member"});
                }
            }
        }
        return Verdict::hold("exhaustive check over all pairs of members");
    case Condition::A3: {
        if (g.is_trivial()) {
            return Verdict::hold("the only translation of {0} is the identity");
        }
        auto nonempty = std::find_if(members.begin(), members.end(), [](const SupportSet& s) { return !s.empty(); });
        if (nonempty == members.end()) {
            return Verdict::hold("every member is empty, and the empty set is translation-invariant");
        }
        // Translates by distinct multiples of a step are distinct; one of |F|+1 of them is missing.
        for (long long k = 1;; ++k) {
            GroupElement shift = k * *step(g);
            SupportSet moved = translate(*nonempty, shift);
            if (!is_member(moved)) {
                return Verdict::fail("a finite family with a nonempty member is not translation-invariant",
                                     Witness{{*nonempty}, moved, shift, moved.to_string() + " is not a member"});
            }
        }
    }
    case Condition::A4:
        for (const auto& a : members) {
            const bool nonneg = std::all_of(a.elements().begin(), a.elements().end(), [](const GroupElement& e) { return e.sign() >= 0; });
            if (!nonneg) {
                continue;
            }
            const auto pos = std::find_if(a.elements().begin(), a.elements().end(), [](const GroupElement& e) { return e.sign() > 0; });
            if (pos != a.elements().end()) {
                return Verdict::fail("finite sums of a positive element form an infinite set",
                                     Witness{{a}, closure_witness(a, a.elements().back(), budget), std::nullopt,
                                             "the closure of " + a.to_string() + " is infinite"});
            }
            if (!is_member(singleton(zero))) {
                return Verdict::fail("the closure of " + a.to_string() + " is {0}",
                                     Witness{{a}, singleton(zero), std::nullopt, "{0} is not a member"});
            }
        }
        return Verdict::hold("exhaustive check over all nonnegative members");
    case Condition::A5:
        for (const auto& a : members) {
            if (a.size() == 1 && !is_member(singleton(-a.elements().front()))) {
                return Verdict::fail("{g} in F needs {-g} in F",
                                     Witness{{a}, singleton(-a.elements().front()), std::nullopt,
                                             "{" + (-a.elements().front()).to_string() + "} is not a member"});
            }
        }
        return Verdict::hold("exhaustive check over all singleton members");
    }
    return Verdict::unknown("unhandled condition");
}

} // namespace detail

/// Decides @p cond for family @p f; never throws on undecided inputs (returns UnknownWithinBudget).
inline Verdict check_condition(const FamilyDescriptor& f, Condition cond, const Budget& budget = {})
{
    if (f.kind == FamilyDescriptor::Kind::Explicit) {
        return detail::check_explicit_family(f, cond, budget);
    }
    return detail::check_region_family(f, cond, budget);
}

inline std::map<Condition, Verdict> check_all_conditions(const FamilyDescriptor& f, const Budget& budget = {})
{
    std::map<Condition, Verdict> out;
    for (auto c : all_conditions) {
        out.emplace(c, check_condition(f, c, budget));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Witness series for the additive characterisation

struct SeriesPair {
    Series first;
    Series second;
};

struct GroupWitnesses {
    /// a, c with supp(a) = supp(c) = A and supp(a + c) = B; present when B ⊆ A.
    std::optional<SeriesPair> subset;
    /// a, b with supp(a) = A, supp(b) = B and supp(a + b) = A ∪ B.
    SeriesPair union_pair;
};

namespace detail {

/// Some element outside {0, -a}; exists whenever k has more than two elements.
inline FieldElement avoid_zero_and_negative(const FieldElement& a)
{
    const FieldDescriptor& field = a.field();
    std::vector<FieldElement> candidates{FieldElement::one(field)};
    if (field.kind() == FieldDescriptor::Kind::RationalFunctions) {
        candidates.push_back(FieldElement::variable(field));
    }
    candidates.push_back(FieldElement::from_int(field, 2));
    for (const auto& c : candidates) {
        if (!c.is_zero() && !(c == -a)) {
            return c;
        }
    }
    throw field_too_small("no coefficient outside {0, -a} in " + field.name());
}

inline Series series_on(const SupportSet& s, const FieldDescriptor& field, const std::function<FieldElement(const GroupElement&)>& coef)
{
    std::vector<Term> terms;
    for (const auto& e : s.elements()) {
        terms.push_back(Term{e, coef(e)});
    }
    return Series::literal(s.group(), field, std::move(terms));
}

} // namespace detail

/**
 * Series realising the subset and union steps of the additive
 * characterisation: with all-ones a on A, c agrees with -a off B and avoids
 * {0, -a} on B; b avoids -a on A ∩ B. Impossible over F2.
 */
inline GroupWitnesses build_group_witnesses(const SupportSet& a_set, const SupportSet& b_set, const FieldDescriptor& field)
{
    detail::same_group(a_set, b_set);
    if (!a_set.is_finite() || !b_set.is_finite()) {
        throw precondition_violation("witness construction needs explicit finite sets");
    }
    if (field.is_f2()) {
        throw field_too_small("F2 has no coefficient outside {0, -a}");
    }
    const FieldElement one = FieldElement::one(field);
    auto all_ones = [&](const GroupElement&) { return one; };
    Series a = detail::series_on(a_set, field, all_ones);

    std::optional<SeriesPair> subset;
    const bool b_in_a = std::all_of(b_set.elements().begin(), b_set.elements().end(),
                                    [&](const GroupElement& e) { return a_set.contains(e) == Truth::Yes; });
    if (b_in_a) {
        Series c = detail::series_on(a_set, field, [&](const GroupElement& e) {
            return b_set.contains(e) == Truth::Yes ? detail::avoid_zero_and_negative(one) : -one;
        });
        subset = SeriesPair{a, c};
    }
    Series b = detail::series_on(b_set, field, [&](const GroupElement& e) {
        return a_set.contains(e) == Truth::Yes ? detail::avoid_zero_and_negative(one) : one;
    });
    return GroupWitnesses{subset, SeriesPair{a, b}};
}

} // namespace rayner
