#include "support/helpers.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace rayner;
using testing_support::z;
using testing_support::q;

namespace {

const GroupDescriptor Z = GroupDescriptor::integers();
const GroupDescriptor QG = GroupDescriptor::rationals();
const GroupDescriptor Z2 = GroupDescriptor::lex_product(2);

GroupElement random_element(std::mt19937_64& rng, const GroupDescriptor& g)
{
    std::uniform_int_distribution<long long> num(-50, 50);
    std::uniform_int_distribution<long long> den(1, 12);
    std::vector<BigRational> coords;
    for (std::size_t i = 0; i < g.rank(); ++i) {
        coords.emplace_back(num(rng), g.is_discrete() ? 1 : den(rng));
    }
    return GroupElement(g, std::move(coords));
}

} // namespace

TEST(Exponents, AddsIntegers) { EXPECT_EQ(group_add(z(2), z(3)), z(5)); }

TEST(Exponents, AddsRationalsExactly) { EXPECT_EQ(group_add(q(1, 2), q(1, 3)), q(5, 6)); }

TEST(Exponents, AddsLexTuplesComponentwise)
{
    EXPECT_EQ(group_add(GroupElement::tuple(Z2, {1, 5}), GroupElement::tuple(Z2, {0, -5})), GroupElement::tuple(Z2, {1, 0}));
}

TEST(Exponents, ComparesLexicographically)
{
    EXPECT_EQ(group_cmp(GroupElement::tuple(Z2, {0, 7}), GroupElement::tuple(Z2, {1, 0})), std::strong_ordering::less);
}

TEST(Exponents, NegatesRationals) { EXPECT_EQ(group_neg(q(5, 3)), q(-5, 3)); }

TEST(Exponents, ElementPlusNegationIsZero)
{
    for (const auto& g : {z(7), q(-4, 9), GroupElement::tuple(Z2, {3, -8})}) {
        EXPECT_EQ(g + group_neg(g), group_zero(g.group()));
    }
}

TEST(Exponents, TrivialGroupHasOnlyZero)
{
    const auto T = GroupDescriptor::trivial();
    EXPECT_EQ(group_zero(T).to_string(), "0");
    EXPECT_EQ(group_zero(T) + group_zero(T), group_zero(T));
    EXPECT_FALSE(unit_positive(T).has_value());
}

TEST(Exponents, TextualForms)
{
    EXPECT_EQ(z(-3).to_string(), "-3");
    EXPECT_EQ(q(5, 6).to_string(), "5/6");
    EXPECT_EQ(GroupElement::tuple(Z2, {1, -2}).to_string(), "(1,-2)");
}

TEST(Exponents, RejectsMismatchedDescriptors)
{
    EXPECT_THROW(z(1) + q(1, 2), descriptor_mismatch);
    EXPECT_THROW(GroupElement(Z2, {BigRational(1)}), descriptor_mismatch);
    EXPECT_THROW(GroupElement(Z, {BigRational(1, 2)}), precondition_violation);
    EXPECT_THROW(GroupDescriptor::lex_product(9), precondition_violation);
}

TEST(Exponents, ArithmeticDoesNotOverflow)
{
    GroupElement big = GroupElement::scalar(Z, BigRational(BigInt("123456789012345678901234567890")));
    EXPECT_EQ((big + big).to_string(), "246913578024691357802469135780");
}

TEST(Exponents, SubgroupMembershipExamples)
{
    EXPECT_TRUE(subgroup_contains({z(4), z(6)}, z(2)));
    EXPECT_FALSE(subgroup_contains({z(4), z(6)}, z(1)));
    EXPECT_TRUE(subgroup_contains({GroupElement::tuple(Z2, {1, 0}), GroupElement::tuple(Z2, {0, 2})}, GroupElement::tuple(Z2, {3, 4})));
    EXPECT_TRUE(subgroup_contains({}, z(0)));
    EXPECT_FALSE(subgroup_contains({}, z(1)));
    EXPECT_TRUE(subgroup_contains({q(1, 2), q(1, 3)}, q(1, 6)));
    EXPECT_FALSE(subgroup_contains({q(1, 2), q(1, 3)}, q(1, 5)));
}

TEST(Exponents, SubgroupGapFindsMissingElement)
{
    auto gap = subgroup_gap(Z, {z(4), z(6)});
    ASSERT_TRUE(gap.has_value());
    EXPECT_FALSE(subgroup_contains({z(4), z(6)}, *gap));
    EXPECT_FALSE(subgroup_gap(Z, {z(3), z(-2)}).has_value());
    // Q is not finitely generated.
    EXPECT_TRUE(subgroup_gap(QG, {q(1, 2)}).has_value());
}

// Property: group laws and order translation-invariance on 1000 random triples per group.
TEST(ExponentsProperty, GroupLawsAndTranslationInvariance)
{
    std::mt19937_64 rng(1);
    for (const auto& g : {Z, QG, Z2, GroupDescriptor::lex_product(3)}) {
        for (int i = 0; i < 1000; ++i) {
            auto a = random_element(rng, g);
            auto b = random_element(rng, g);
            auto c = random_element(rng, g);
            ASSERT_EQ((a + b) + c, a + (b + c));
            ASSERT_EQ(a + b, b + a);
            ASSERT_EQ(a + (-a), group_zero(g));
            ASSERT_EQ(a + group_zero(g), a);
            if (a < b) {
                ASSERT_LT(a + c, b + c);
            }
            // Totality.
            ASSERT_TRUE(a < b || b < a || a == b);
        }
    }
}

// Property: lattice membership agrees with enumeration of bounded integer combinations.
TEST(ExponentsProperty, SubgroupMembershipMatchesBruteForce)
{
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<long long> coord(-4, 4);
    for (int trial = 0; trial < 100; ++trial) {
        const bool rank_one = trial % 2 == 0;
        const GroupDescriptor g = rank_one ? Z : Z2;
        std::vector<GroupElement> gens;
        for (int i = 0; i < 2; ++i) {
            gens.push_back(rank_one ? GroupElement::tuple(g, {coord(rng)}) : GroupElement::tuple(g, {coord(rng), coord(rng)}));
        }
        std::set<std::vector<long long>> reachable;
        for (long long m = -30; m <= 30; ++m) {
            for (long long n = -30; n <= 30; ++n) {
                GroupElement s = m * gens[0] + n * gens[1];
                std::vector<long long> key;
                for (const auto& c : s.coords()) {
                    key.push_back(static_cast<long long>(numerator(c)));
                }
                reachable.insert(key);
            }
        }
        for (long long x = -3; x <= 3; ++x) {
            for (long long y = -3; y <= 3; ++y) {
                if (rank_one && y != 0) {
                    continue;
                }
                GroupElement target = rank_one ? GroupElement::tuple(g, {x}) : GroupElement::tuple(g, {x, y});
                std::vector<long long> key = rank_one ? std::vector<long long>{x} : std::vector<long long>{x, y};
                // Cramer's rule bounds the coefficients by 24 for entries <= 4 and targets <= 3.
                ASSERT_EQ(subgroup_contains(gens, target), reachable.count(key) == 1)
                    << "gens " << gens[0].to_string() << ", " << gens[1].to_string() << " target " << target.to_string();
            }
        }
    }
}
