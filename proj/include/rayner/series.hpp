#pragma once

/**
 * @file series.hpp
 * @brief Lazily evaluated generalised power series over k((G)).
 *
 * A Series is an immutable expression DAG. Evaluation is exact and bounded by a
 * Horizon: every coefficient with exponent <= exp_bound is produced unless
 * some node enumerates more than term_bound support points, in which case the
 * result says how far it is still exact (TermList::valid_through).
 *
 * Memoisation lives in an Evaluator. An Evaluator is single-threaded; create
 * one per thread. Series and TermList values are freely shareable.
 */

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "rayner/coefficients.hpp"
#include "rayner/error.hpp"
#include "rayner/exponents.hpp"

namespace rayner {

struct Horizon {
    GroupElement exp_bound;
    std::size_t term_bound = 10000;

    Horizon(GroupElement bound, std::size_t terms = 10000) : exp_bound(std::move(bound)), term_bound(terms)
    {
        if (term_bound == 0) {
            throw precondition_violation("term_bound must be at least 1");
        }
    }
};

struct Term {
    GroupElement exponent;
    FieldElement coefficient;

    friend bool operator==(const Term&, const Term&) = default;
};

enum class Completeness { CompleteUpToBound, TruncatedByTermBound };

/**
 * Enumerated prefix of a series: strictly increasing exponents, nonzero
 * coefficients, exact for every exponent <= valid_through. When complete,
 * valid_through equals the requested bound.
 */
class TermList {
public:
    TermList(GroupDescriptor group, FieldDescriptor field, GroupElement bound)
        : group_(group), field_(field), bound_(bound), valid_through_(std::move(bound))
    {
    }

    TermList(GroupDescriptor group, FieldDescriptor field, GroupElement bound, std::vector<Term> terms,
             GroupElement valid_through)
        : group_(group), field_(field), bound_(std::move(bound)), valid_through_(std::move(valid_through)), terms_(std::move(terms))
    {
    }

    const GroupDescriptor& group() const noexcept { return group_; }
    const FieldDescriptor& field() const noexcept { return field_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }
    const GroupElement& bound() const noexcept { return bound_; }
    const GroupElement& valid_through() const noexcept { return valid_through_; }

    Completeness completeness() const
    {
        return valid_through_ < bound_ ? Completeness::TruncatedByTermBound : Completeness::CompleteUpToBound;
    }
    bool complete() const { return completeness() == Completeness::CompleteUpToBound; }
    bool empty() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }

    /// Coefficient at @p g; requires g <= valid_through.
    FieldElement coefficient(const GroupElement& g) const
    {
        if (valid_through_ < g) {
            throw term_budget_exceeded("coefficient at " + g.to_string() + " lies beyond the exact prefix (valid through "
                                       + valid_through_.to_string() + ")");
        }
        auto it = std::lower_bound(terms_.begin(), terms_.end(), g,
                                   [](const Term& t, const GroupElement& e) { return t.exponent < e; });
        if (it != terms_.end() && it->exponent == g) {
            return it->coefficient;
        }
        return FieldElement::zero(field_);
    }

    std::vector<GroupElement> support() const
    {
        std::vector<GroupElement> out;
        out.reserve(terms_.size());
        for (const auto& t : terms_) {
            out.push_back(t.exponent);
        }
        return out;
    }

    /// Restriction to exponents <= @p bound (and to the exact prefix).
    TermList restricted(const GroupElement& bound) const
    {
        GroupElement valid = min_of(valid_through_, bound);
        std::vector<Term> kept;
        for (const auto& t : terms_) {
            if (valid < t.exponent) {
                break;
            }
            kept.push_back(t);
        }
        return TermList(group_, field_, bound, std::move(kept), std::move(valid));
    }

    friend bool operator==(const TermList& a, const TermList& b)
    {
        return a.terms_ == b.terms_ && a.valid_through_ == b.valid_through_ && a.bound_ == b.bound_;
    }

private:
    GroupDescriptor group_;
    FieldDescriptor field_;
    GroupElement bound_;
    GroupElement valid_through_;
    std::vector<Term> terms_;
};

enum class TruncationMode {
    StrictlyBelow, ///< keep exponents < g
    UpTo,          ///< keep exponents <= g
};

class Series;

namespace detail {

enum class NodeKind { Monomial, Sum, Neg, Product, Inverse, Literal, GeometricTail, Truncate };

struct Node {
    NodeKind kind;
    GroupDescriptor group;
    FieldDescriptor field;
    std::vector<std::shared_ptr<const Node>> children;
    std::optional<FieldElement> coefficient;
    std::optional<GroupElement> exponent; ///< monomial exponent, truncation point or inversion witness
    std::vector<Term> literal;
    TruncationMode mode = TruncationMode::StrictlyBelow;
};

} // namespace detail

class Series {
public:
    static Series monomial(const FieldElement& c, const GroupElement& g)
    {
        auto node = make(detail::NodeKind::Monomial, g.group(), c.field());
        node->coefficient = c;
        node->exponent = g;
        return Series(std::move(node));
    }

    /// The monic monomial t^g.
    static Series t(const FieldDescriptor& field, const GroupElement& g) { return monomial(FieldElement::one(field), g); }

    static Series constant(const FieldElement& c, const GroupDescriptor& group) { return monomial(c, group_zero(group)); }

    static Series zero(const GroupDescriptor& group, const FieldDescriptor& field)
    {
        return Series(make(detail::NodeKind::Literal, group, field));
    }

    static Series one(const GroupDescriptor& group, const FieldDescriptor& field)
    {
        return constant(FieldElement::one(field), group);
    }

    /// Finite series with the given terms; zero coefficients are dropped, duplicates combined.
    static Series literal(const GroupDescriptor& group, const FieldDescriptor& field, std::vector<Term> terms)
    {
        std::map<GroupElement, FieldElement> acc;
        for (auto& t : terms) {
            check_descriptors(group, field, t.exponent.group(), t.coefficient.field());
            auto it = acc.find(t.exponent);
            if (it == acc.end()) {
                acc.emplace(t.exponent, t.coefficient);
            } else {
                it->second = it->second + t.coefficient;
            }
        }
        auto node = make(detail::NodeKind::Literal, group, field);
        for (auto& [e, c] : acc) {
            if (!c.is_zero()) {
                node->literal.push_back(Term{e, c});
            }
        }
        return Series(std::move(node));
    }

    static Series literal(const TermList& list)
    {
        return literal(list.group(), list.field(), list.terms());
    }

    friend Series operator+(const Series& a, const Series& b) { return binary(detail::NodeKind::Sum, a, b); }
    friend Series operator*(const Series& a, const Series& b) { return binary(detail::NodeKind::Product, a, b); }
    friend Series operator-(const Series& a, const Series& b) { return a + (-b); }

    friend Series operator-(const Series& a)
    {
        auto node = make(detail::NodeKind::Neg, a.group(), a.field());
        node->children.push_back(a.node_);
        return Series(std::move(node));
    }

    /// Multiplicative inverse; @p witness, when given, must be min supp of *this.
    Series inverse(std::optional<GroupElement> witness = std::nullopt) const
    {
        if (witness) {
            check_descriptors(group(), field(), witness->group(), field());
        }
        auto node = make(detail::NodeKind::Inverse, group(), field());
        node->children.push_back(node_);
        node->exponent = std::move(witness);
        return Series(std::move(node));
    }

    /// Sum of base^n over n >= 0; evaluation requires supp(base) inside G^{>0}.
    static Series geometric_tail(const Series& base)
    {
        auto node = make(detail::NodeKind::GeometricTail, base.group(), base.field());
        node->children.push_back(base.node_);
        return Series(std::move(node));
    }

    Series truncated(const GroupElement& g, TruncationMode mode = TruncationMode::StrictlyBelow) const
    {
        check_descriptors(group(), field(), g.group(), field());
        auto node = make(detail::NodeKind::Truncate, group(), field());
        node->children.push_back(node_);
        node->exponent = g;
        node->mode = mode;
        return Series(std::move(node));
    }

    const GroupDescriptor& group() const noexcept { return node_->group; }
    const FieldDescriptor& field() const noexcept { return node_->field; }
    const detail::Node& node() const noexcept { return *node_; }
    const std::shared_ptr<const detail::Node>& handle() const noexcept { return node_; }

    explicit Series(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}

private:
    static std::shared_ptr<detail::Node> make(detail::NodeKind kind, const GroupDescriptor& group, const FieldDescriptor& field)
    {
        return std::make_shared<detail::Node>(detail::Node{kind, group, field, {}, std::nullopt, std::nullopt, {}, TruncationMode::StrictlyBelow});
    }

    static void check_descriptors(const GroupDescriptor& g1, const FieldDescriptor& f1, const GroupDescriptor& g2,
                                  const FieldDescriptor& f2)
    {
        if (g1 != g2) {
            throw descriptor_mismatch("series over groups " + g1.name() + " and " + g2.name());
        }
        if (f1 != f2) {
            throw descriptor_mismatch("series over fields " + f1.name() + " and " + f2.name());
        }
    }

    static Series binary(detail::NodeKind kind, const Series& a, const Series& b)
    {
        check_descriptors(a.group(), a.field(), b.group(), b.field());
        auto node = make(kind, a.group(), a.field());
        node->children = {a.node_, b.node_};
        return Series(std::move(node));
    }

    std::shared_ptr<const detail::Node> node_;
};

inline Series ser_add(const Series& a, const Series& b) { return a + b; }
inline Series ser_neg(const Series& a) { return -a; }
inline Series ser_mul(const Series& a, const Series& b) { return a * b; }

inline Series truncate(const Series& s, const GroupElement& g, TruncationMode mode = TruncationMode::StrictlyBelow)
{
    return s.truncated(g, mode);
}

/// b = lead * t^g0 * (1 - epsilon) with supp(epsilon) inside G^{>0}.
struct InversionFactorization {
    GroupElement g0;
    FieldElement lead;
    Series epsilon;
};

/**
 * Evaluation context. Caches, per node, the longest evaluated prefix and the
 * factorisation found for every inverse node.
 */
class Evaluator {
public:
    explicit Evaluator(Horizon horizon) : horizon_(std::move(horizon)) {}

    const Horizon& horizon() const noexcept { return horizon_; }

    TermList evaluate(const Series& s) { return evaluate(s.handle(), horizon_.exp_bound); }
    TermList evaluate(const Series& s, const GroupElement& bound) { return evaluate(s.handle(), bound); }

    /// min supp(s), searched up to the horizon.
    GroupElement vmin(const Series& s)
    {
        TermList list = evaluate(s);
        if (!list.empty()) {
            return list.terms().front().exponent;
        }
        if (list.complete()) {
            throw zero_up_to_horizon("no nonzero coefficient up to exponent " + horizon_.exp_bound.to_string());
        }
        throw term_budget_exceeded("term budget exhausted before the first support point");
    }

    InversionFactorization factorize(const Series& b, const std::optional<GroupElement>& witness = std::nullopt)
    {
        return factorize_node(b.handle(), witness);
    }

private:
    using NodePtr = std::shared_ptr<const detail::Node>;

    struct Memo {
        NodePtr keep_alive;
        TermList result;
    };

    /// Static knowledge of min supp: the node is zero, its leading term is known exactly, or neither.
    struct Leading {
        enum class State { Zero, Known, Unknown } state = State::Unknown;
        std::optional<Term> term;
    };

    TermList evaluate(const NodePtr& node, const GroupElement& bound)
    {
        auto it = memo_.find(node.get());
        if (it != memo_.end() && !(it->second.result.bound() < bound)) {
            return it->second.result.restricted(bound);
        }
        TermList computed = cap(compute(node, bound));
        memo_.insert_or_assign(node.get(), Memo{node, computed});
        return computed;
    }

    TermList cap(TermList list) const
    {
        if (list.size() <= horizon_.term_bound) {
            return list;
        }
        std::vector<Term> kept(list.terms().begin(), list.terms().begin() + static_cast<std::ptrdiff_t>(horizon_.term_bound));
        GroupElement valid = kept.back().exponent;
        return TermList(list.group(), list.field(), list.bound(), std::move(kept), std::move(valid));
    }

    TermList compute(const NodePtr& node, const GroupElement& bound)
    {
        const auto& n = *node;
        switch (n.kind) {
        case detail::NodeKind::Monomial: {
            std::vector<Term> terms;
            if (!n.coefficient->is_zero() && !(bound < *n.exponent)) {
                terms.push_back(Term{*n.exponent, *n.coefficient});
            }
            return TermList(n.group, n.field, bound, std::move(terms), bound);
        }
        case detail::NodeKind::Literal: {
            std::vector<Term> terms;
            for (const auto& t : n.literal) {
                if (bound < t.exponent) {
                    break;
                }
                terms.push_back(t);
            }
            return TermList(n.group, n.field, bound, std::move(terms), bound);
        }
        case detail::NodeKind::Neg: {
            TermList child = evaluate(n.children[0], bound);
            std::vector<Term> terms;
            terms.reserve(child.size());
            for (const auto& t : child.terms()) {
                terms.push_back(Term{t.exponent, -t.coefficient});
            }
            return TermList(n.group, n.field, bound, std::move(terms), child.valid_through());
        }
        case detail::NodeKind::Sum:
            return compute_sum(n, bound);
        case detail::NodeKind::Product:
            return compute_product(n, bound);
        case detail::NodeKind::Inverse: {
            const Series& expansion = inverse_expansion(node);
            TermList e = evaluate(expansion.handle(), bound);
            return TermList(n.group, n.field, bound, e.terms(), e.valid_through());
        }
        case detail::NodeKind::GeometricTail:
            return compute_tail(n, bound);
        case detail::NodeKind::Truncate:
            return compute_truncate(n, bound);
        }
        throw precondition_violation("unknown series node");
    }

    TermList compute_sum(const detail::Node& n, const GroupElement& bound)
    {
        TermList l = evaluate(n.children[0], bound);
        TermList r = evaluate(n.children[1], bound);
        GroupElement valid = min_of(l.valid_through(), r.valid_through());
        std::vector<Term> terms;
        auto li = l.terms().begin();
        auto ri = r.terms().begin();
        while (li != l.terms().end() || ri != r.terms().end()) {
            Term next = [&] {
                if (ri == r.terms().end() || (li != l.terms().end() && li->exponent < ri->exponent)) {
                    return *li++;
                }
                if (li == l.terms().end() || ri->exponent < li->exponent) {
                    return *ri++;
                }
                Term merged{li->exponent, li->coefficient + ri->coefficient};
                ++li;
                ++ri;
                return merged;
            }();
            if (valid < next.exponent) {
                break;
            }
            if (!next.coefficient.is_zero()) {
                terms.push_back(std::move(next));
            }
        }
        return TermList(n.group, n.field, bound, std::move(terms), std::move(valid));
    }

    TermList compute_product(const detail::Node& n, const GroupElement& bound)
    {
        auto lb_left = lower_bound(n.children[0]);
        auto lb_right = lower_bound(n.children[1]);
        if (!lb_left || !lb_right) {
            return TermList(n.group, n.field, bound, {}, bound);
        }
        // Coefficient at g <= bound only involves left exponents <= bound - lb_right and vice versa.
        TermList l = evaluate(n.children[0], bound - *lb_right);
        TermList r = evaluate(n.children[1], bound - *lb_left);
        GroupElement valid = min_of(bound, min_of(l.valid_through() + *lb_right, r.valid_through() + *lb_left));
        std::map<GroupElement, FieldElement> acc;
        for (const auto& a : l.terms()) {
            for (const auto& b : r.terms()) {
                GroupElement e = a.exponent + b.exponent;
                if (valid < e) {
                    break;
                }
                FieldElement c = a.coefficient * b.coefficient;
                auto it = acc.find(e);
                if (it == acc.end()) {
                    acc.emplace(std::move(e), std::move(c));
                } else {
                    it->second = it->second + c;
                }
            }
        }
        std::vector<Term> terms;
        terms.reserve(acc.size());
        for (auto& [e, c] : acc) {
            if (!c.is_zero()) {
                terms.push_back(Term{e, c});
            }
        }
        return TermList(n.group, n.field, bound, std::move(terms), std::move(valid));
    }

    // T = 1 + base * T, solved in increasing exponent order over the candidate set of finite sums.
    TermList compute_tail(const detail::Node& n, const GroupElement& bound)
    {
        const GroupElement zero = group_zero(n.group);
        if (bound < zero) {
            return TermList(n.group, n.field, bound, {}, bound);
        }
        TermList base = evaluate(n.children[0], bound);
        for (const auto& t : base.terms()) {
            if (t.exponent.sign() <= 0) {
                throw precondition_violation("geometric tail base has support point " + t.exponent.to_string()
                                             + " outside the positive cone");
            }
        }
        GroupElement limit = min_of(bound, base.valid_through());
        std::set<GroupElement> candidates{zero};
        std::map<GroupElement, FieldElement> values;
        std::vector<Term> terms;
        std::size_t processed = 0;
        std::optional<GroupElement> last;
        while (!candidates.empty()) {
            if (processed == horizon_.term_bound) {
                limit = *last;
                break;
            }
            GroupElement g = *candidates.begin();
            candidates.erase(candidates.begin());
            FieldElement value = g.is_zero() ? FieldElement::one(n.field) : FieldElement::zero(n.field);
            for (const auto& t : base.terms()) {
                if (g < t.exponent) {
                    break;
                }
                auto it = values.find(g - t.exponent);
                if (it != values.end()) {
                    value = value + t.coefficient * it->second;
                }
            }
            for (const auto& t : base.terms()) {
                GroupElement next = g + t.exponent;
                if (limit < next) {
                    break;
                }
                candidates.insert(std::move(next));
            }
            if (!value.is_zero()) {
                values.emplace(g, value);
                terms.push_back(Term{g, value});
            }
            last = g;
            ++processed;
        }
        return TermList(n.group, n.field, bound, std::move(terms), std::move(limit));
    }

    TermList compute_truncate(const detail::Node& n, const GroupElement& bound)
    {
        const GroupElement& at = *n.exponent;
        const GroupElement inner = min_of(bound, at);
        TermList child = evaluate(n.children[0], inner);
        std::vector<Term> terms;
        for (const auto& t : child.terms()) {
            const bool keep = n.mode == TruncationMode::StrictlyBelow ? t.exponent < at : !(at < t.exponent);
            if (keep) {
                terms.push_back(t);
            }
        }
        GroupElement valid = child.complete() ? bound : child.valid_through();
        return TermList(n.group, n.field, bound, std::move(terms), std::move(valid));
    }

    /// Lower bound on the support; nullopt when the node is known to be zero.
    std::optional<GroupElement> lower_bound(const NodePtr& node)
    {
        auto it = lower_.find(node.get());
        if (it != lower_.end()) {
            return it->second.second;
        }
        std::optional<GroupElement> lb = compute_lower_bound(node);
        lower_.insert_or_assign(node.get(), std::make_pair(node, lb));
        return lb;
    }

    std::optional<GroupElement> compute_lower_bound(const NodePtr& node)
    {
        const auto& n = *node;
        switch (n.kind) {
        case detail::NodeKind::Monomial:
            return n.coefficient->is_zero() ? std::nullopt : n.exponent;
        case detail::NodeKind::Literal:
            if (n.literal.empty()) {
                return std::nullopt;
            }
            return n.literal.front().exponent;
        case detail::NodeKind::Neg:
            return lower_bound(n.children[0]);
        case detail::NodeKind::Sum: {
            auto l = lower_bound(n.children[0]);
            auto r = lower_bound(n.children[1]);
            if (!l) {
                return r;
            }
            if (!r) {
                return l;
            }
            return min_of(*l, *r);
        }
        case detail::NodeKind::Product: {
            auto l = lower_bound(n.children[0]);
            auto r = lower_bound(n.children[1]);
            if (!l || !r) {
                return std::nullopt;
            }
            return *l + *r;
        }
        case detail::NodeKind::Inverse:
            return -factorize_node(n.children[0], n.exponent).g0;
        case detail::NodeKind::GeometricTail:
            return group_zero(n.group);
        case detail::NodeKind::Truncate: {
            auto l = lower_bound(n.children[0]);
            if (!l) {
                return std::nullopt;
            }
            const bool empty = n.mode == TruncationMode::StrictlyBelow ? !(*l < *n.exponent) : *n.exponent < *l;
            if (empty) {
                return std::nullopt;
            }
            return l;
        }
        }
        return std::nullopt;
    }

    /// Exact leading term when it follows from the DAG shape alone.
    Leading leading(const NodePtr& node)
    {
        const auto& n = *node;
        switch (n.kind) {
        case detail::NodeKind::Monomial:
            if (n.coefficient->is_zero()) {
                return {Leading::State::Zero, std::nullopt};
            }
            return {Leading::State::Known, Term{*n.exponent, *n.coefficient}};
        case detail::NodeKind::Literal:
            if (n.literal.empty()) {
                return {Leading::State::Zero, std::nullopt};
            }
            return {Leading::State::Known, n.literal.front()};
        case detail::NodeKind::Neg: {
            Leading c = leading(n.children[0]);
            if (c.term) {
                c.term->coefficient = -c.term->coefficient;
            }
            return c;
        }
        case detail::NodeKind::Product: {
            Leading l = leading(n.children[0]);
            Leading r = leading(n.children[1]);
            if (l.state == Leading::State::Zero || r.state == Leading::State::Zero) {
                return {Leading::State::Zero, std::nullopt};
            }
            if (l.state == Leading::State::Known && r.state == Leading::State::Known) {
                return {Leading::State::Known,
                        Term{l.term->exponent + r.term->exponent, l.term->coefficient * r.term->coefficient}};
            }
            return {};
        }
        case detail::NodeKind::Sum: {
            Leading l = leading(n.children[0]);
            Leading r = leading(n.children[1]);
            if (l.state == Leading::State::Zero) {
                return r;
            }
            if (r.state == Leading::State::Zero) {
                return l;
            }
            if (l.state != Leading::State::Known || r.state != Leading::State::Known) {
                return {};
            }
            if (l.term->exponent < r.term->exponent) {
                return l;
            }
            if (r.term->exponent < l.term->exponent) {
                return r;
            }
            FieldElement c = l.term->coefficient + r.term->coefficient;
            if (c.is_zero()) {
                return {};
            }
            return {Leading::State::Known, Term{l.term->exponent, c}};
        }
        case detail::NodeKind::GeometricTail:
            return {Leading::State::Known, Term{group_zero(n.group), FieldElement::one(n.field)}};
        case detail::NodeKind::Inverse:
        case detail::NodeKind::Truncate:
            return {};
        }
        return {};
    }

    InversionFactorization factorize_node(const NodePtr& child, const std::optional<GroupElement>& witness)
    {
        auto cached = factorizations_.find(child.get());
        if (cached != factorizations_.end()) {
            if (witness && !(cached->second.second.g0 == *witness)) {
                throw precondition_violation("witness " + witness->to_string() + " is not min supp (found "
                                             + cached->second.second.g0.to_string() + ")");
            }
            return cached->second.second;
        }
        GroupElement g0 = group_zero(child->group);
        FieldElement lead = FieldElement::zero(child->field);
        if (witness) {
            TermList prefix = evaluate(child, *witness);
            if (prefix.valid_through() < *witness) {
                throw term_budget_exceeded("term budget exhausted before reaching witness " + witness->to_string());
            }
            if (prefix.empty() || !(prefix.terms().front().exponent == *witness)) {
                throw precondition_violation("witness " + witness->to_string() + " is not min supp of the series");
            }
            g0 = *witness;
            lead = prefix.terms().front().coefficient;
        } else {
            Leading known = leading(child);
            if (known.state == Leading::State::Zero) {
                throw zero_up_to_horizon("inverse of the zero series");
            }
            if (known.state == Leading::State::Known) {
                g0 = known.term->exponent;
                lead = known.term->coefficient;
            } else {
                TermList prefix = evaluate(child, horizon_.exp_bound);
                if (prefix.empty()) {
                    if (prefix.complete()) {
                        throw zero_up_to_horizon("cannot invert: no nonzero coefficient up to exponent "
                                                 + horizon_.exp_bound.to_string());
                    }
                    throw term_budget_exceeded("term budget exhausted while searching for min supp");
                }
                g0 = prefix.terms().front().exponent;
                lead = prefix.terms().front().coefficient;
            }
        }
        const Series b(child);
        // epsilon = -lead^{-1} t^{-g0} (b - lead t^{g0})
        Series epsilon = Series::monomial(-lead.inverse(), -g0) * (b - Series::monomial(lead, g0));
        InversionFactorization f{g0, lead, epsilon};
        factorizations_.insert_or_assign(child.get(), std::make_pair(child, f));
        return f;
    }

    const Series& inverse_expansion(const NodePtr& node)
    {
        auto it = expansions_.find(node.get());
        if (it != expansions_.end()) {
            return it->second.second;
        }
        InversionFactorization f = factorize_node(node->children[0], node->exponent);
        Series expansion = Series::monomial(f.lead.inverse(), -f.g0) * Series::geometric_tail(f.epsilon);
        auto [pos, inserted] = expansions_.insert_or_assign(node.get(), std::make_pair(node, expansion));
        return pos->second.second;
    }

    Horizon horizon_;
    std::unordered_map<const detail::Node*, Memo> memo_;
    std::unordered_map<const detail::Node*, std::pair<NodePtr, std::optional<GroupElement>>> lower_;
    std::unordered_map<const detail::Node*, std::pair<NodePtr, InversionFactorization>> factorizations_;
    std::unordered_map<const detail::Node*, std::pair<NodePtr, Series>> expansions_;
};

inline TermList coefficients_up_to(const Series& s, const Horizon& h)
{
    Evaluator ev(h);
    return ev.evaluate(s);
}

inline GroupElement vmin(const Series& s, const Horizon& h)
{
    Evaluator ev(h);
    return ev.vmin(s);
}

inline InversionFactorization factorize_for_inversion(const Series& b, const Horizon& h,
                                                      const std::optional<GroupElement>& witness = std::nullopt)
{
    Evaluator ev(h);
    return ev.factorize(b, witness);
}

/// Inverse node with min supp located eagerly (raises zero_up_to_horizon early).
inline Series invert(const Series& b, const Horizon& h)
{
    return b.inverse(factorize_for_inversion(b, h).g0);
}

inline std::vector<GroupElement> support_up_to(const Series& s, const Horizon& h)
{
    return coefficients_up_to(s, h).support();
}

inline FieldElement coefficient_at(const Series& s, const GroupElement& g, const Horizon& h)
{
    Horizon at(g, h.term_bound);
    return coefficients_up_to(s, at).coefficient(g);
}

/// Coefficientwise equality on the common exact prefix.
inline bool equal_up_to(const Series& a, const Series& b, const Horizon& h)
{
    Evaluator ev(h);
    TermList x = ev.evaluate(a);
    TermList y = ev.evaluate(b);
    const GroupElement valid = min_of(x.valid_through(), y.valid_through());
    return x.restricted(valid).terms() == y.restricted(valid).terms();
}

/// Canonical text: `1 - 1*t^(1) + 2/3*t^(5/2)`; the zero series prints `0`.
inline std::string to_text(const TermList& list)
{
    if (list.empty()) {
        return "0";
    }
    const bool ordered = list.field().kind() == FieldDescriptor::Kind::Rationals;
    std::string out;
    bool first = true;
    for (const auto& t : list.terms()) {
        FieldElement c = t.coefficient;
        bool negative = ordered && is_strictly_positive(-c);
        if (negative) {
            c = -c;
        }
        if (first) {
            out += negative ? "-" : "";
        } else {
            out += negative ? " - " : " + ";
        }
        first = false;
        std::string coef = c.to_string();
        if (c.needs_parentheses()) {
            coef = "(" + coef + ")";
        }
        if (t.exponent.is_zero()) {
            out += coef;
        } else {
            out += coef + "*t^(" + t.exponent.to_string() + ")";
        }
    }
    return out;
}

} // namespace rayner
