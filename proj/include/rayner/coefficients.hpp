#pragma once

/**
 * @file coefficients.hpp
 * @brief Exact coefficient fields: Q, F_p and F_p(x).
 *
 * Elements are kept in canonical form: reduced fractions over Q, residues in
 * [0, p) over F_p, and coprime numerator/monic denominator over F_p(x).
 */

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rayner/error.hpp"

namespace rayner {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

inline bool is_prime(std::uint64_t n)
{
    if (n < 2) {
        return false;
    }
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            return false;
        }
    }
    return true;
}

class FieldDescriptor {
public:
    enum class Kind { Rationals, PrimeField, RationalFunctions };

    static FieldDescriptor rationals() { return FieldDescriptor(Kind::Rationals, 0); }
    static FieldDescriptor prime_field(std::uint64_t p) { return FieldDescriptor(Kind::PrimeField, checked(p)); }
    static FieldDescriptor rational_functions(std::uint64_t p)
    {
        return FieldDescriptor(Kind::RationalFunctions, checked(p));
    }

    Kind kind() const noexcept { return kind_; }
    std::uint64_t characteristic() const noexcept { return p_; }
    bool is_f2() const noexcept { return kind_ == Kind::PrimeField && p_ == 2; }

    /**
     * Declared cardinality assumption: Q and F_p(x) are treated as at least as
     * large as any well-ordered support, finite prime fields are not.
     */
    bool declared_large() const noexcept { return kind_ != Kind::PrimeField; }

    std::string name() const
    {
        switch (kind_) {
        case Kind::Rationals:
            return "Q";
        case Kind::PrimeField:
            return "F" + std::to_string(p_);
        case Kind::RationalFunctions:
            return "F" + std::to_string(p_) + "(x)";
        }
        return "?";
    }

    friend bool operator==(const FieldDescriptor&, const FieldDescriptor&) = default;

private:
    FieldDescriptor(Kind kind, std::uint64_t p) : kind_(kind), p_(p) {}

    static std::uint64_t checked(std::uint64_t p)
    {
        if (!is_prime(p)) {
            throw precondition_violation(std::to_string(p) + " is not prime");
        }
        if (p >= (std::uint64_t{1} << 31)) {
            throw precondition_violation("characteristic " + std::to_string(p) + " is too large");
        }
        return p;
    }

    Kind kind_;
    std::uint64_t p_;
};

namespace detail {

inline std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t p)
{
    std::uint64_t result = 1 % p;
    base %= p;
    while (exp != 0) {
        if (exp & 1U) {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1U;
    }
    return result;
}

inline std::uint64_t mod_inv(std::uint64_t a, std::uint64_t p)
{
    if (a % p == 0) {
        throw division_by_zero("inverse of zero in F" + std::to_string(p));
    }
    return mod_pow(a, p - 2, p);
}

inline std::uint64_t reduce_big(const BigInt& v, std::uint64_t p)
{
    BigInt r = v % p;
    if (r < 0) {
        r += p;
    }
    return static_cast<std::uint64_t>(r);
}

} // namespace detail

/// Dense polynomial over F_p, lowest degree first, no trailing zeros.
class FpPoly {
public:
    FpPoly() = default;
    FpPoly(std::vector<std::uint64_t> coeffs, std::uint64_t p) : c_(std::move(coeffs))
    {
        for (auto& v : c_) {
            v %= p;
        }
        trim();
    }

    static FpPoly constant(std::uint64_t v, std::uint64_t p) { return FpPoly({v}, p); }
    static FpPoly monomial(std::size_t degree, std::uint64_t p)
    {
        std::vector<std::uint64_t> c(degree + 1, 0);
        c[degree] = 1;
        return FpPoly(std::move(c), p);
    }

    bool is_zero() const noexcept { return c_.empty(); }
    /// Degree; -1 for the zero polynomial.
    long degree() const noexcept { return static_cast<long>(c_.size()) - 1; }
    std::uint64_t lead() const { return c_.empty() ? 0 : c_.back(); }
    const std::vector<std::uint64_t>& coeffs() const noexcept { return c_; }
    bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
    bool is_monomial() const
    {
        std::size_t nonzero = 0;
        for (auto v : c_) {
            nonzero += v != 0 ? 1 : 0;
        }
        return nonzero == 1;
    }

    static FpPoly add(const FpPoly& a, const FpPoly& b, std::uint64_t p)
    {
        std::vector<std::uint64_t> out(std::max(a.c_.size(), b.c_.size()), 0);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            out[i] = a.c_[i];
        }
        for (std::size_t i = 0; i < b.c_.size(); ++i) {
            out[i] = (out[i] + b.c_[i]) % p;
        }
        return FpPoly(std::move(out), p);
    }

    static FpPoly neg(const FpPoly& a, std::uint64_t p)
    {
        std::vector<std::uint64_t> out(a.c_);
        for (auto& v : out) {
            v = (p - v) % p;
        }
        return FpPoly(std::move(out), p);
    }

    static FpPoly mul(const FpPoly& a, const FpPoly& b, std::uint64_t p)
    {
        if (a.is_zero() || b.is_zero()) {
            return {};
        }
        std::vector<std::uint64_t> out(a.c_.size() + b.c_.size() - 1, 0);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == 0) {
                continue;
            }
            for (std::size_t j = 0; j < b.c_.size(); ++j) {
                out[i + j] = (out[i + j] + a.c_[i] * b.c_[j]) % p;
            }
        }
        return FpPoly(std::move(out), p);
    }

    static FpPoly scale(const FpPoly& a, std::uint64_t s, std::uint64_t p)
    {
        std::vector<std::uint64_t> out(a.c_);
        for (auto& v : out) {
            v = v * (s % p) % p;
        }
        return FpPoly(std::move(out), p);
    }

    /// Euclidean division a = q*b + r.
    static std::pair<FpPoly, FpPoly> divmod(const FpPoly& a, const FpPoly& b, std::uint64_t p)
    {
        if (b.is_zero()) {
            throw division_by_zero("polynomial division by zero");
        }
        std::vector<std::uint64_t> rem(a.c_);
        const std::size_t db = b.c_.size() - 1;
        if (rem.size() < b.c_.size()) {
            return {FpPoly{}, a};
        }
        std::vector<std::uint64_t> quot(rem.size() - db, 0);
        const std::uint64_t inv_lead = detail::mod_inv(b.lead(), p);
        for (std::size_t k = rem.size(); k-- > db;) {
            const std::uint64_t factor = rem[k] * inv_lead % p;
            if (factor == 0) {
                continue;
            }
            quot[k - db] = factor;
            for (std::size_t j = 0; j <= db; ++j) {
                rem[k - db + j] = (rem[k - db + j] + p - factor * b.c_[j] % p) % p;
            }
        }
        return {FpPoly(std::move(quot), p), FpPoly(std::move(rem), p)};
    }

    static FpPoly monic(const FpPoly& a, std::uint64_t p)
    {
        if (a.is_zero()) {
            return a;
        }
        return scale(a, detail::mod_inv(a.lead(), p), p);
    }

    /// Monic gcd (zero iff both inputs are zero).
    static FpPoly gcd(FpPoly a, FpPoly b, std::uint64_t p)
    {
        while (!b.is_zero()) {
            auto r = divmod(a, b, p).second;
            a = std::move(b);
            b = std::move(r);
        }
        return monic(a, p);
    }

    /// Rendering such as `2*x^2+x+1` (descending degree).
    std::string to_string() const
    {
        if (c_.empty()) {
            return "0";
        }
        std::string out;
        for (std::size_t k = c_.size(); k-- > 0;) {
            if (c_[k] == 0) {
                continue;
            }
            if (!out.empty()) {
                out += "+";
            }
            if (k == 0) {
                out += std::to_string(c_[k]);
                continue;
            }
            if (c_[k] != 1) {
                out += std::to_string(c_[k]) + "*";
            }
            out += k == 1 ? std::string("x") : "x^" + std::to_string(k);
        }
        return out;
    }

    friend bool operator==(const FpPoly&, const FpPoly&) = default;

private:
    void trim()
    {
        while (!c_.empty() && c_.back() == 0) {
            c_.pop_back();
        }
    }

    std::vector<std::uint64_t> c_;
};

/// Element of F_p(x) as num/den with den monic and gcd(num, den) = 1.
struct RationalFunction {
    FpPoly num;
    FpPoly den;

    friend bool operator==(const RationalFunction&, const RationalFunction&) = default;
};

class FieldElement {
public:
    using Value = std::variant<BigRational, std::uint64_t, RationalFunction>;

    static FieldElement zero(const FieldDescriptor& field) { return from_int(field, 0); }
    static FieldElement one(const FieldDescriptor& field) { return from_int(field, 1); }

    static FieldElement from_int(const FieldDescriptor& field, long long v) { return from_rational(field, BigRational(v)); }

    /// Image of a rational number; over F_p the denominator must be invertible.
    static FieldElement from_rational(const FieldDescriptor& field, const BigRational& v)
    {
        switch (field.kind()) {
        case FieldDescriptor::Kind::Rationals:
            return FieldElement(field, v);
        case FieldDescriptor::Kind::PrimeField:
            return FieldElement(field, residue_of(v, field.characteristic()));
        case FieldDescriptor::Kind::RationalFunctions: {
            const std::uint64_t p = field.characteristic();
            return FieldElement(field, RationalFunction{FpPoly::constant(residue_of(v, p), p), FpPoly::constant(1, p)});
        }
        }
        throw precondition_violation("unknown field");
    }

    /// The transcendental x of F_p(x).
    static FieldElement variable(const FieldDescriptor& field)
    {
        if (field.kind() != FieldDescriptor::Kind::RationalFunctions) {
            throw precondition_violation("field " + field.name() + " has no variable x");
        }
        const std::uint64_t p = field.characteristic();
        return FieldElement(field, RationalFunction{FpPoly::monomial(1, p), FpPoly::constant(1, p)});
    }

    static FieldElement from_rational_function(const FieldDescriptor& field, FpPoly num, FpPoly den)
    {
        if (field.kind() != FieldDescriptor::Kind::RationalFunctions) {
            throw precondition_violation("field " + field.name() + " is not a rational function field");
        }
        return FieldElement(field, normalise(std::move(num), std::move(den), field.characteristic()));
    }

    const FieldDescriptor& field() const noexcept { return field_; }
    const Value& value() const noexcept { return value_; }

    bool is_zero() const
    {
        switch (value_.index()) {
        case 0:
            return std::get<0>(value_) == 0;
        case 1:
            return std::get<1>(value_) == 0;
        default:
            return std::get<2>(value_).num.is_zero();
        }
    }

    bool is_one() const { return *this == one(field_); }

    FieldElement operator-() const
    {
        const std::uint64_t p = field_.characteristic();
        switch (value_.index()) {
        case 0:
            return FieldElement(field_, BigRational(-std::get<0>(value_)));
        case 1:
            return FieldElement(field_, (p - std::get<1>(value_)) % p);
        default: {
            const auto& rf = std::get<2>(value_);
            return FieldElement(field_, RationalFunction{FpPoly::neg(rf.num, p), rf.den});
        }
        }
    }

    friend FieldElement operator+(const FieldElement& a, const FieldElement& b)
    {
        a.check_same(b);
        const std::uint64_t p = a.field_.characteristic();
        switch (a.value_.index()) {
        case 0:
            return FieldElement(a.field_, BigRational(std::get<0>(a.value_) + std::get<0>(b.value_)));
        case 1:
            return FieldElement(a.field_, (std::get<1>(a.value_) + std::get<1>(b.value_)) % p);
        default: {
            const auto& x = std::get<2>(a.value_);
            const auto& y = std::get<2>(b.value_);
            if (x.den == y.den) {
                return FieldElement(a.field_, normalise(FpPoly::add(x.num, y.num, p), x.den, p));
            }
            return FieldElement(a.field_, normalise(FpPoly::add(FpPoly::mul(x.num, y.den, p), FpPoly::mul(y.num, x.den, p), p),
                                                    FpPoly::mul(x.den, y.den, p), p));
        }
        }
    }

    friend FieldElement operator-(const FieldElement& a, const FieldElement& b) { return a + (-b); }

    friend FieldElement operator*(const FieldElement& a, const FieldElement& b)
    {
        a.check_same(b);
        const std::uint64_t p = a.field_.characteristic();
        switch (a.value_.index()) {
        case 0:
            return FieldElement(a.field_, BigRational(std::get<0>(a.value_) * std::get<0>(b.value_)));
        case 1:
            return FieldElement(a.field_, std::get<1>(a.value_) * std::get<1>(b.value_) % p);
        default: {
            const auto& x = std::get<2>(a.value_);
            const auto& y = std::get<2>(b.value_);
            return FieldElement(a.field_, normalise(FpPoly::mul(x.num, y.num, p), FpPoly::mul(x.den, y.den, p), p));
        }
        }
    }

    FieldElement inverse() const
    {
        if (is_zero()) {
            throw division_by_zero("inverse of zero in " + field_.name());
        }
        const std::uint64_t p = field_.characteristic();
        switch (value_.index()) {
        case 0:
            return FieldElement(field_, BigRational(1 / std::get<0>(value_)));
        case 1:
            return FieldElement(field_, detail::mod_inv(std::get<1>(value_), p));
        default: {
            const auto& rf = std::get<2>(value_);
            return FieldElement(field_, normalise(rf.den, rf.num, p));
        }
        }
    }

    friend FieldElement operator/(const FieldElement& a, const FieldElement& b) { return a * b.inverse(); }

    friend bool operator==(const FieldElement& a, const FieldElement& b)
    {
        return a.field_ == b.field_ && a.value_ == b.value_;
    }

    /// `2/3`, `-1`, `4`, `x^2+1`, `(x^2+1)/x`.
    std::string to_string() const
    {
        switch (value_.index()) {
        case 0:
            return std::get<0>(value_).str();
        case 1:
            return std::to_string(std::get<1>(value_));
        default: {
            const auto& rf = std::get<2>(value_);
            if (rf.den.is_one()) {
                return rf.num.to_string();
            }
            auto wrap = [](const FpPoly& poly) {
                std::string s = poly.to_string();
                return poly.is_monomial() && s.find('*') == std::string::npos ? s : "(" + s + ")";
            };
            return wrap(rf.num) + "/" + wrap(rf.den);
        }
        }
    }

    /// True when to_string() would be ambiguous as a factor of a product.
    bool needs_parentheses() const
    {
        if (value_.index() != 2) {
            return false;
        }
        const auto& rf = std::get<2>(value_);
        return !rf.den.is_one() || !rf.num.is_monomial() || rf.num.to_string().find('*') != std::string::npos;
    }

private:
    FieldElement(const FieldDescriptor& field, Value value) : field_(field), value_(std::move(value)) {}

    static std::uint64_t residue_of(const BigRational& v, std::uint64_t p)
    {
        const std::uint64_t num = detail::reduce_big(numerator(v), p);
        const std::uint64_t den = detail::reduce_big(denominator(v), p);
        if (den == 0) {
            throw division_by_zero("denominator of " + v.str() + " vanishes mod " + std::to_string(p));
        }
        return num * detail::mod_inv(den, p) % p;
    }

    static RationalFunction normalise(FpPoly num, FpPoly den, std::uint64_t p)
    {
        if (den.is_zero()) {
            throw division_by_zero("rational function with zero denominator");
        }
        if (num.is_zero()) {
            return {FpPoly{}, FpPoly::constant(1, p)};
        }
        FpPoly g = FpPoly::gcd(num, den, p);
        if (!g.is_one()) {
            num = FpPoly::divmod(num, g, p).first;
            den = FpPoly::divmod(den, g, p).first;
        }
        const std::uint64_t inv_lead = detail::mod_inv(den.lead(), p);
        return {FpPoly::scale(num, inv_lead, p), FpPoly::scale(den, inv_lead, p)};
    }

    void check_same(const FieldElement& other) const
    {
        if (field_ != other.field_) {
            throw descriptor_mismatch("coefficients from " + field_.name() + " and " + other.field_.name());
        }
    }

    FieldDescriptor field_;
    Value value_;
};

inline FieldElement f_add(const FieldElement& a, const FieldElement& b) { return a + b; }
inline FieldElement f_mul(const FieldElement& a, const FieldElement& b) { return a * b; }
inline FieldElement f_neg(const FieldElement& a) { return -a; }
inline FieldElement f_inv(const FieldElement& a) { return a.inverse(); }
inline bool f_is_zero(const FieldElement& a) { return a.is_zero(); }

/// a > 0 in Q; the only ordered field shipped.
inline bool is_strictly_positive(const FieldElement& a)
{
    if (a.field().kind() != FieldDescriptor::Kind::Rationals) {
        throw unsupported_order(a.field().name() + " is not an ordered field");
    }
    return std::get<BigRational>(a.value()) > 0;
}

struct IndependentCoefficients {
    std::vector<FieldElement> values;
    /// False when the field cannot supply an F_p-independent (or positive) family of this size.
    bool independent = true;
    std::string note;
};

/**
 * Supplies @p count coefficients whose products cannot cancel: powers
 * 1, x, ..., x^(n-1) over F_p(x), or the positive rationals 1..n over Q.
 */
inline IndependentCoefficients independent_coefficients(std::size_t count, const FieldDescriptor& field)
{
    IndependentCoefficients out;
    switch (field.kind()) {
    case FieldDescriptor::Kind::RationalFunctions: {
        const std::uint64_t p = field.characteristic();
        for (std::size_t i = 0; i < count; ++i) {
            out.values.push_back(FieldElement::from_rational_function(field, FpPoly::monomial(i, p), FpPoly::constant(1, p)));
        }
        out.note = "powers of x are linearly independent over F" + std::to_string(p);
        break;
    }
    case FieldDescriptor::Kind::Rationals:
        for (std::size_t i = 0; i < count; ++i) {
            out.values.push_back(FieldElement::from_int(field, static_cast<long long>(i + 1)));
        }
        out.note = "distinct strictly positive rationals";
        break;
    case FieldDescriptor::Kind::PrimeField:
        for (std::size_t i = 0; i < count; ++i) {
            out.values.push_back(FieldElement::from_int(field, static_cast<long long>(i + 1)));
        }
        out.independent = false;
        out.note = field.name() + " has no infinite independent set over its prime field";
        break;
    }
    return out;
}

} // namespace rayner
