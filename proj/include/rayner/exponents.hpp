#pragma once

/**
 * @file exponents.hpp
 * @brief Exact ordered abelian groups of exponents: Z, Q, lexicographic Z^n and {0}.
 *
 * Every element carries its group descriptor; arithmetic between elements of
 * different groups raises descriptor_mismatch. All arithmetic is exact.
 */

#include <algorithm>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rayner/error.hpp"

namespace rayner {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

inline constexpr std::size_t max_lex_rank = 8;

class GroupDescriptor {
public:
    enum class Kind { Integers, Rationals, LexProduct, Trivial };

    static GroupDescriptor integers() { return GroupDescriptor(Kind::Integers, 1); }
    static GroupDescriptor rationals() { return GroupDescriptor(Kind::Rationals, 1); }
    static GroupDescriptor trivial() { return GroupDescriptor(Kind::Trivial, 0); }
    static GroupDescriptor lex_product(std::size_t n)
    {
        if (n == 0 || n > max_lex_rank) {
            throw precondition_violation("lexicographic product rank must lie in [1, 8], got "
                                         + std::to_string(n));
        }
        return GroupDescriptor(Kind::LexProduct, n);
    }

    Kind kind() const noexcept { return kind_; }
    /// Number of coordinates of an element (0 for the trivial group).
    std::size_t rank() const noexcept { return rank_; }
    bool is_trivial() const noexcept { return kind_ == Kind::Trivial; }
    /// Elements are integers or integer tuples.
    bool is_discrete() const noexcept { return kind_ == Kind::Integers || kind_ == Kind::LexProduct; }

    std::string name() const
    {
        switch (kind_) {
        case Kind::Integers:
            return "Z";
        case Kind::Rationals:
            return "Q";
        case Kind::LexProduct:
            return "Z^" + std::to_string(rank_);
        case Kind::Trivial:
            return "trivial";
        }
        return "?";
    }

    friend bool operator==(const GroupDescriptor&, const GroupDescriptor&) = default;

private:
    GroupDescriptor(Kind kind, std::size_t rank) : kind_(kind), rank_(rank) {}

    Kind kind_;
    std::size_t rank_;
};

class GroupElement {
public:
    /// The zero of @p group.
    explicit GroupElement(GroupDescriptor group) : group_(group), coords_(group.rank()) {}

    GroupElement(GroupDescriptor group, std::vector<BigRational> coords)
        : group_(group), coords_(std::move(coords))
    {
        if (coords_.size() != group_.rank()) {
            throw descriptor_mismatch("element of " + group_.name() + " needs "
                                      + std::to_string(group_.rank()) + " coordinate(s), got "
                                      + std::to_string(coords_.size()));
        }
        if (group_.is_discrete()) {
            for (const auto& c : coords_) {
                if (denominator(c) != 1) {
                    throw precondition_violation("non-integral coordinate in " + group_.name());
                }
            }
        }
    }

    /// Scalar element of Z or Q.
    static GroupElement scalar(GroupDescriptor group, BigRational value)
    {
        if (group.rank() != 1 || group.kind() == GroupDescriptor::Kind::LexProduct) {
            throw descriptor_mismatch("scalar exponent requires Z or Q, got " + group.name());
        }
        return GroupElement(group, {std::move(value)});
    }

    static GroupElement tuple(GroupDescriptor group, const std::vector<long long>& values)
    {
        std::vector<BigRational> coords;
        coords.reserve(values.size());
        for (auto v : values) {
            coords.emplace_back(v);
        }
        return GroupElement(group, std::move(coords));
    }

    const GroupDescriptor& group() const noexcept { return group_; }
    const std::vector<BigRational>& coords() const noexcept { return coords_; }

    bool is_zero() const
    {
        return std::all_of(coords_.begin(), coords_.end(), [](const BigRational& c) { return c == 0; });
    }

    /// Sign in the group order: -1, 0 or 1.
    int sign() const
    {
        for (const auto& c : coords_) {
            if (c != 0) {
                return c > 0 ? 1 : -1;
            }
        }
        return 0;
    }

    GroupElement& operator+=(const GroupElement& other)
    {
        check_same(other);
        for (std::size_t i = 0; i < coords_.size(); ++i) {
            coords_[i] += other.coords_[i];
        }
        return *this;
    }

    GroupElement& operator-=(const GroupElement& other)
    {
        check_same(other);
        for (std::size_t i = 0; i < coords_.size(); ++i) {
            coords_[i] -= other.coords_[i];
        }
        return *this;
    }

    friend GroupElement operator+(GroupElement a, const GroupElement& b) { return a += b; }
    friend GroupElement operator-(GroupElement a, const GroupElement& b) { return a -= b; }

    friend GroupElement operator-(GroupElement a)
    {
        for (auto& c : a.coords_) {
            c = -c;
        }
        return a;
    }

    /// Integer multiple n*g.
    friend GroupElement operator*(long long n, GroupElement g)
    {
        for (auto& c : g.coords_) {
            c *= n;
        }
        return g;
    }

    friend std::strong_ordering operator<=>(const GroupElement& a, const GroupElement& b)
    {
        a.check_same(b);
        for (std::size_t i = 0; i < a.coords_.size(); ++i) {
            if (a.coords_[i] < b.coords_[i]) {
                return std::strong_ordering::less;
            }
            if (b.coords_[i] < a.coords_[i]) {
                return std::strong_ordering::greater;
            }
        }
        return std::strong_ordering::equal;
    }

    friend bool operator==(const GroupElement& a, const GroupElement& b)
    {
        return (a <=> b) == std::strong_ordering::equal;
    }

    /// Textual form: `-3`, `5/6`, `(1,-2)`; the trivial group prints `0`.
    std::string to_string() const
    {
        switch (group_.kind()) {
        case GroupDescriptor::Kind::Trivial:
            return "0";
        case GroupDescriptor::Kind::Integers:
        case GroupDescriptor::Kind::Rationals:
            return coords_[0].str();
        case GroupDescriptor::Kind::LexProduct: {
            std::string out = "(";
            for (std::size_t i = 0; i < coords_.size(); ++i) {
                if (i != 0) {
                    out += ",";
                }
                out += coords_[i].str();
            }
            return out + ")";
        }
        }
        return "?";
    }

private:
    void check_same(const GroupElement& other) const
    {
        if (group_ != other.group_) {
            throw descriptor_mismatch("exponents from " + group_.name() + " and "
                                      + other.group_.name());
        }
    }

    GroupDescriptor group_;
    std::vector<BigRational> coords_;
};

inline GroupElement group_zero(const GroupDescriptor& group) { return GroupElement(group); }
inline GroupElement group_add(const GroupElement& g, const GroupElement& h) { return g + h; }
inline GroupElement group_neg(const GroupElement& g) { return -g; }
inline std::strong_ordering group_cmp(const GroupElement& g, const GroupElement& h) { return g <=> h; }

/// Smallest "unit" positive element: 1 in Z and Q, (0,...,0,1) in Z^n; none in {0}.
inline std::optional<GroupElement> unit_positive(const GroupDescriptor& group)
{
    if (group.is_trivial()) {
        return std::nullopt;
    }
    std::vector<BigRational> coords(group.rank());
    coords.back() = 1;
    return GroupElement(group, std::move(coords));
}

/// Positive element dominating every coordinate-wise unit: (1,0,...,0) in Z^n, 1 otherwise.
inline std::optional<GroupElement> dominant_positive(const GroupDescriptor& group)
{
    if (group.is_trivial()) {
        return std::nullopt;
    }
    std::vector<BigRational> coords(group.rank());
    coords.front() = 1;
    return GroupElement(group, std::move(coords));
}

inline const GroupElement& min_of(const GroupElement& a, const GroupElement& b) { return b < a ? b : a; }
inline const GroupElement& max_of(const GroupElement& a, const GroupElement& b) { return a < b ? b : a; }

namespace detail {

inline BigInt floor_div(const BigInt& a, const BigInt& b)
{
    BigInt q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        --q;
    }
    return q;
}

inline BigInt abs_int(const BigInt& a) { return a < 0 ? BigInt(-a) : a; }

/// Row-echelon basis of the integer lattice spanned by @p rows (Hermite-style elimination).
inline std::vector<std::vector<BigInt>> lattice_echelon(std::vector<std::vector<BigInt>> rows, std::size_t dim)
{
    std::vector<std::vector<BigInt>> basis;
    std::size_t pivot_row = 0;
    for (std::size_t col = 0; col < dim && pivot_row < rows.size(); ++col) {
        // Euclid on the column until at most one row at or below pivot_row is nonzero.
        while (true) {
            std::size_t best = rows.size();
            for (std::size_t r = pivot_row; r < rows.size(); ++r) {
                if (rows[r][col] != 0 && (best == rows.size() || abs_int(rows[r][col]) < abs_int(rows[best][col]))) {
                    best = r;
                }
            }
            if (best == rows.size()) {
                break;
            }
            std::swap(rows[pivot_row], rows[best]);
            bool reduced_all = true;
            for (std::size_t r = pivot_row + 1; r < rows.size(); ++r) {
                if (rows[r][col] == 0) {
                    continue;
                }
                BigInt q = floor_div(rows[r][col], rows[pivot_row][col]);
                for (std::size_t c = col; c < dim; ++c) {
                    rows[r][c] -= q * rows[pivot_row][c];
                }
                if (rows[r][col] != 0) {
                    reduced_all = false;
                }
            }
            if (reduced_all) {
                break;
            }
        }
        if (pivot_row < rows.size() && rows[pivot_row][col] != 0) {
            if (rows[pivot_row][col] < 0) {
                for (auto& v : rows[pivot_row]) {
                    v = -v;
                }
            }
            basis.push_back(rows[pivot_row]);
            ++pivot_row;
        }
    }
    return basis;
}

inline bool lattice_contains(const std::vector<std::vector<BigInt>>& basis, std::vector<BigInt> target)
{
    const std::size_t dim = target.size();
    std::size_t row = 0;
    for (std::size_t col = 0; col < dim; ++col) {
        if (row < basis.size() && basis[row][col] != 0) {
            const BigInt& pivot = basis[row][col];
            if (target[col] % pivot != 0) {
                return false;
            }
            BigInt q = target[col] / pivot;
            for (std::size_t c = col; c < dim; ++c) {
                target[c] -= q * basis[row][c];
            }
            ++row;
        } else if (target[col] != 0) {
            return false;
        }
    }
    return true;
}

/// Generator r of the cyclic subgroup <gens> of Q (r = 0 for the zero subgroup).
inline BigRational rational_subgroup_generator(const std::vector<GroupElement>& gens)
{
    BigInt lcm_den = 1;
    for (const auto& g : gens) {
        lcm_den = boost::multiprecision::lcm(lcm_den, denominator(g.coords()[0]));
    }
    BigInt gcd_num = 0;
    for (const auto& g : gens) {
        const BigRational& v = g.coords()[0];
        BigInt scaled = numerator(v) * (lcm_den / denominator(v));
        gcd_num = boost::multiprecision::gcd(gcd_num, abs_int(scaled));
    }
    return BigRational(gcd_num, lcm_den);
}

inline std::vector<BigInt> integer_coords(const GroupElement& g)
{
    std::vector<BigInt> out;
    out.reserve(g.coords().size());
    for (const auto& c : g.coords()) {
        out.push_back(numerator(c));
    }
    return out;
}

} // namespace detail

/// Membership of @p g in the subgroup generated by @p generators (empty list generates {0}).
inline bool subgroup_contains(const std::vector<GroupElement>& generators, const GroupElement& g)
{
    for (const auto& gen : generators) {
        if (gen.group() != g.group()) {
            throw descriptor_mismatch("generator from " + gen.group().name() + ", element from "
                                      + g.group().name());
        }
    }
    switch (g.group().kind()) {
    case GroupDescriptor::Kind::Trivial:
        return true;
    case GroupDescriptor::Kind::Integers: {
        BigInt d = 0;
        for (const auto& gen : generators) {
            d = boost::multiprecision::gcd(d, detail::abs_int(numerator(gen.coords()[0])));
        }
        const BigInt v = numerator(g.coords()[0]);
        return d == 0 ? v == 0 : v % d == 0;
    }
    case GroupDescriptor::Kind::Rationals: {
        const BigRational r = detail::rational_subgroup_generator(generators);
        const BigRational& v = g.coords()[0];
        if (r == 0) {
            return v == 0;
        }
        return denominator(BigRational(v / r)) == 1;
    }
    case GroupDescriptor::Kind::LexProduct: {
        std::vector<std::vector<BigInt>> rows;
        rows.reserve(generators.size());
        for (const auto& gen : generators) {
            rows.push_back(detail::integer_coords(gen));
        }
        auto basis = detail::lattice_echelon(std::move(rows), g.group().rank());
        return detail::lattice_contains(basis, detail::integer_coords(g));
    }
    }
    return false;
}

/**
 * Decides whether @p generators generate the whole group.
 * Returns nullopt when they do, otherwise an element outside the generated subgroup.
 */
inline std::optional<GroupElement> subgroup_gap(const GroupDescriptor& group, const std::vector<GroupElement>& generators)
{
    switch (group.kind()) {
    case GroupDescriptor::Kind::Trivial:
        return std::nullopt;
    case GroupDescriptor::Kind::Integers: {
        auto one = GroupElement::scalar(group, 1);
        if (subgroup_contains(generators, one)) {
            return std::nullopt;
        }
        return one;
    }
    case GroupDescriptor::Kind::Rationals: {
        // Finitely generated subgroups of Q are cyclic, never all of Q.
        const BigRational r = detail::rational_subgroup_generator(generators);
        return GroupElement::scalar(group, r == 0 ? BigRational(1) : BigRational(r / 2));
    }
    case GroupDescriptor::Kind::LexProduct:
        for (std::size_t i = 0; i < group.rank(); ++i) {
            std::vector<BigRational> coords(group.rank());
            coords[i] = 1;
            GroupElement e(group, std::move(coords));
            if (!subgroup_contains(generators, e)) {
                return e;
            }
        }
        return std::nullopt;
    }
    return std::nullopt;
}

} // namespace rayner
