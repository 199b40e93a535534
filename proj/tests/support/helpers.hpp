#pragma once

// Shorthands shared by the unit and acceptance tests.

#include "rayner/theorems.hpp"

#include "oracle/dense_oracle.hpp"

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace testing_support {

using namespace rayner;

inline const GroupDescriptor Z = GroupDescriptor::integers();
inline const GroupDescriptor QG = GroupDescriptor::rationals();
inline const FieldDescriptor Q = FieldDescriptor::rationals();

inline GroupElement z(long long n) { return GroupElement::scalar(Z, n); }
inline GroupElement q(long long num, long long den) { return GroupElement::scalar(QG, BigRational(num, den)); }

inline FieldElement fe(const FieldDescriptor& k, long long v) { return FieldElement::from_int(k, v); }

/// Series over Z from (exponent, integer coefficient) pairs.
inline Series poly(const FieldDescriptor& k, const std::vector<std::pair<long long, long long>>& terms)
{
    std::vector<Term> out;
    for (auto [e, c] : terms) {
        out.push_back(Term{z(e), fe(k, c)});
    }
    return Series::literal(Z, k, std::move(out));
}

inline SupportSet zset(const std::vector<long long>& values)
{
    std::vector<GroupElement> out;
    for (auto v : values) {
        out.push_back(z(v));
    }
    return SupportSet::finite(Z, std::move(out));
}

inline std::vector<long long> ints(const std::vector<GroupElement>& elems)
{
    std::vector<long long> out;
    for (const auto& e : elems) {
        out.push_back(static_cast<long long>(numerator(e.coords()[0])));
    }
    return out;
}

inline std::vector<long long> ints(const SupportSet& s) { return ints(s.elements()); }

/// (exponent, coefficient text) pairs of a TermList.
inline std::vector<std::pair<std::string, std::string>> pairs(const TermList& list)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& t : list.terms()) {
        out.emplace_back(t.exponent.to_string(), t.coefficient.to_string());
    }
    return out;
}

/// Dense oracle value of a Q or F_p TermList over Z>=0 exponents <= n.
inline oracle::Dense<oracle::RationalOps> dense_q(const TermList& list, std::size_t n)
{
    auto out = oracle::Dense<oracle::RationalOps>::zero({}, n);
    for (const auto& t : list.terms()) {
        out.c.at(static_cast<std::size_t>(numerator(t.exponent.coords()[0]))) = std::get<BigRational>(t.coefficient.value());
    }
    return out;
}

inline oracle::Dense<oracle::ModPOps> dense_p(const TermList& list, std::size_t n, std::uint64_t p)
{
    auto out = oracle::Dense<oracle::ModPOps>::zero({p}, n);
    for (const auto& t : list.terms()) {
        out.c.at(static_cast<std::size_t>(numerator(t.exponent.coords()[0]))) = std::get<std::uint64_t>(t.coefficient.value());
    }
    return out;
}

/// Random explicit families over integer exponents in [lo, hi]: a third are
/// arbitrary, a third are power sets, a third are perturbed power sets.
class FamilyGenerator {
public:
    FamilyGenerator(std::uint64_t seed, long long lo, long long hi) : rng_(seed), lo_(lo), hi_(hi) {}

    std::vector<std::set<long long>> next()
    {
        const long long kind = pick(0, 2);
        std::set<std::set<long long>> out;
        if (kind == 0) {
            const long long count = pick(0, 6);
            for (long long i = 0; i < count; ++i) {
                out.insert(random_set(3));
            }
        } else {
            std::set<long long> u = random_set(4);
            const std::vector<long long> elems(u.begin(), u.end());
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << elems.size()); ++mask) {
                std::set<long long> s;
                for (std::size_t i = 0; i < elems.size(); ++i) {
                    if (mask & (std::uint64_t{1} << i)) {
                        s.insert(elems[i]);
                    }
                }
                out.insert(s);
            }
            if (kind == 2) {
                if (pick(0, 1) == 0 && !out.empty()) {
                    auto it = out.begin();
                    std::advance(it, pick(0, static_cast<long long>(out.size()) - 1));
                    out.erase(it);
                } else {
                    out.insert(random_set(3));
                }
            }
        }
        return {out.begin(), out.end()};
    }

    long long pick(long long a, long long b) { return std::uniform_int_distribution<long long>(a, b)(rng_); }

private:
    std::set<long long> random_set(long long max_size)
    {
        std::set<long long> s;
        const long long n = pick(0, max_size);
        for (long long i = 0; i < n; ++i) {
            s.insert(pick(lo_, hi_));
        }
        return s;
    }

    std::mt19937_64 rng_;
    long long lo_;
    long long hi_;
};

inline FamilyDescriptor explicit_z(const std::vector<std::set<long long>>& sets)
{
    std::vector<SupportSet> members;
    for (const auto& s : sets) {
        members.push_back(zset({s.begin(), s.end()}));
    }
    return FamilyDescriptor::explicit_family(Z, std::move(members));
}

/**
 * Brute-force additive closure over Q: every supp(a + b) with a all-ones on
 * A and b = +-1 on B, for A, B in F, must lie in F, and F must be nonempty.
 * Over Q these sign patterns realise every support the sum of two series
 * with supports A and B can have.
 */
inline bool additively_closed_brute_force(const std::vector<std::set<long long>>& family)
{
    if (family.empty()) {
        return false;
    }
    const std::set<std::set<long long>> members(family.begin(), family.end());
    for (const auto& a : family) {
        for (const auto& b : family) {
            const std::vector<long long> bv(b.begin(), b.end());
            for (std::uint64_t signs = 0; signs < (std::uint64_t{1} << bv.size()); ++signs) {
                std::map<long long, oracle::Rational> sum;
                for (auto e : a) {
                    sum[e] += 1;
                }
                for (std::size_t i = 0; i < bv.size(); ++i) {
                    sum[bv[i]] += (signs & (std::uint64_t{1} << i)) ? -1 : 1;
                }
                std::set<long long> support;
                for (const auto& [e, c] : sum) {
                    if (c != 0) {
                        support.insert(e);
                    }
                }
                if (!members.count(support)) {
                    return false;
                }
            }
        }
    }
    return true;
}

/// All finite sums (including the empty sum) of positive generators, up to bound.
inline std::set<BigRational> finite_sums_brute_force(const std::vector<BigRational>& gens, const BigRational& bound)
{
    std::set<BigRational> reached{0};
    std::vector<BigRational> frontier{0};
    while (!frontier.empty()) {
        std::vector<BigRational> next;
        for (const auto& x : frontier) {
            for (const auto& g : gens) {
                BigRational y = x + g;
                if (y <= bound && reached.insert(y).second) {
                    next.push_back(y);
                }
            }
        }
        frontier = std::move(next);
    }
    return reached;
}

} // namespace testing_support
