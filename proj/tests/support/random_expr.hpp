#pragma once

// Random expressions over Z>=0 exponents, produced simultaneously as CLI text
// and as an oracle value.

#include "oracle/dense_oracle.hpp"

#include <random>
#include <string>

namespace testing_support {

template <class Ops>
struct RandomExpr {
    std::string text;
    oracle::Dense<Ops> value;
};

template <class Ops>
class ExprGenerator {
public:
    ExprGenerator(Ops ops, std::size_t n, std::uint64_t seed, long long coef_range)
        : ops_(ops), n_(n), rng_(seed), coef_range_(coef_range)
    {
    }

    RandomExpr<Ops> generate(int depth)
    {
        if (depth == 0) {
            return leaf();
        }
        switch (pick(0, 5)) {
        case 0:
            return leaf();
        case 1: {
            auto a = generate(depth - 1);
            auto b = generate(depth - 1);
            return {"(" + a.text + ") + (" + b.text + ")", a.value + b.value};
        }
        case 2: {
            auto a = generate(depth - 1);
            auto b = generate(depth - 1);
            return {"(" + a.text + ") - (" + b.text + ")", a.value - b.value};
        }
        case 3: {
            auto a = generate(depth - 1);
            auto b = generate(depth - 1);
            return {"(" + a.text + ")*(" + b.text + ")", a.value * b.value};
        }
        case 4: {
            auto a = generate(depth - 1);
            if (ops_.is_zero(a.value.c[0])) {
                const long long c0 = nonzero_coef();
                a = {"(" + a.text + ") + " + std::to_string(c0),
                     a.value + oracle::Dense<Ops>::monomial(ops_, n_, c0, 0)};
            }
            return {"inv(" + a.text + ")", a.value.inverse()};
        }
        default: {
            auto a = generate(depth - 1);
            const std::size_t g = static_cast<std::size_t>(pick(0, static_cast<long long>(n_) + 1));
            return {"trunc(" + a.text + ", " + std::to_string(g) + ")", a.value.truncated(g)};
        }
        }
    }

private:
    long long pick(long long lo, long long hi) { return std::uniform_int_distribution<long long>(lo, hi)(rng_); }

    long long nonzero_coef()
    {
        while (true) {
            long long c = pick(-coef_range_, coef_range_);
            if (!ops_.is_zero(ops_.from_int(c))) {
                return c;
            }
        }
    }

    RandomExpr<Ops> leaf()
    {
        const long long c = nonzero_coef();
        // Half the exponents are small so that products and inverses stay below the bound.
        const auto e = static_cast<std::size_t>(pick(0, 1) == 0 ? pick(0, 5) : pick(0, 40));
        const std::string coef = c < 0 ? "(" + std::to_string(c) + ")" : std::to_string(c);
        return {coef + "*t^(" + std::to_string(e) + ")", oracle::Dense<Ops>::monomial(ops_, n_, c, e)};
    }

    Ops ops_;
    std::size_t n_;
    std::mt19937_64 rng_;
    long long coef_range_;
};

} // namespace testing_support
