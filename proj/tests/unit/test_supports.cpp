#include "support/helpers.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace rayner;
using testing_support::explicit_z;
using testing_support::ints;
using testing_support::poly;
using testing_support::q;
using testing_support::z;
using testing_support::zset;

namespace {

const GroupDescriptor Z = GroupDescriptor::integers();
const GroupDescriptor QG = GroupDescriptor::rationals();
const FieldDescriptor Q = FieldDescriptor::rationals();

Horizon to(long long n) { return Horizon(z(n)); }

using Ints = std::vector<long long>;

std::set<long long> as_set(const SupportSet& s)
{
    Ints v = ints(s);
    return {v.begin(), v.end()};
}

bool member(const std::vector<std::set<long long>>& family, const std::set<long long>& s)
{
    return std::find(family.begin(), family.end(), s) != family.end();
}

/// Re-derives a Fails verdict on an explicit family from the condition's definition.
void expect_sound_failure(const std::vector<std::set<long long>>& family, Condition c, const Verdict& v)
{
    ASSERT_TRUE(v.witness.has_value()) << to_string(c);
    const Witness& w = *v.witness;
    std::vector<std::set<long long>> premises;
    for (const auto& p : w.premises) {
        ASSERT_TRUE(p.is_finite());
        premises.push_back(as_set(p));
        ASSERT_TRUE(member(family, premises.back())) << to_string(c) << ": premise is not a member";
    }
    std::set<long long> off = w.offending ? as_set(*w.offending) : std::set<long long>{};
    switch (c) {
    case Condition::S1:
        ASSERT_EQ(off.size(), 1U);
        ASSERT_FALSE(member(family, off));
        break;
    case Condition::S2:
        ASSERT_TRUE(std::includes(premises[0].begin(), premises[0].end(), off.begin(), off.end()));
        ASSERT_FALSE(member(family, off));
        break;
    case Condition::S3: {
        std::set<long long> u = premises[0];
        u.insert(premises[1].begin(), premises[1].end());
        ASSERT_EQ(off, u);
        ASSERT_FALSE(member(family, off));
        break;
    }
    case Condition::S4:
        ASSERT_EQ(off, std::set<long long>{0});
        ASSERT_FALSE(member(family, off));
        break;
    case Condition::S5:
        ASSERT_TRUE(family.empty());
        break;
    case Condition::S6: {
        ASSERT_FALSE(member(family, off));
        auto it = premises[0].begin();
        for (auto e : off) {
            ASSERT_EQ(e, *it++);
        }
        break;
    }
    case Condition::A1: {
        long long g = 0;
        for (const auto& s : family) {
            for (auto e : s) {
                g = std::gcd(g, e);
            }
        }
        ASSERT_TRUE(w.element.has_value());
        const long long e = static_cast<long long>(numerator(w.element->coords()[0]));
        ASSERT_TRUE(g == 0 ? e != 0 : e % g != 0);
        break;
    }
    case Condition::A2: {
        std::set<long long> sums;
        for (auto a : premises[0]) {
            for (auto b : premises[1]) {
                sums.insert(a + b);
            }
        }
        ASSERT_EQ(off, sums);
        ASSERT_FALSE(member(family, off));
        break;
    }
    case Condition::A3: {
        ASSERT_TRUE(w.element.has_value());
        const long long shift = static_cast<long long>(numerator(w.element->coords()[0]));
        std::set<long long> moved;
        for (auto a : premises[0]) {
            moved.insert(a + shift);
        }
        ASSERT_EQ(off, moved);
        ASSERT_FALSE(member(family, off));
        break;
    }
    case Condition::A4: {
        const auto& a = premises[0];
        ASSERT_TRUE(std::all_of(a.begin(), a.end(), [](long long e) { return e >= 0; }));
        const bool has_positive = std::any_of(a.begin(), a.end(), [](long long e) { return e > 0; });
        if (has_positive) {
            // The closure is infinite, so it is never a member of a finite family.
            ASSERT_FALSE(w.offending->is_finite());
            std::vector<BigRational> gens(a.begin(), a.end());
            auto closure = testing_support::finite_sums_brute_force(gens, BigRational(*w.offending->known_through()->coords().begin()));
            std::set<long long> expected;
            for (const auto& x : closure) {
                expected.insert(static_cast<long long>(numerator(x)));
            }
            ASSERT_EQ(off, expected);
        } else {
            ASSERT_EQ(off, std::set<long long>{0});
            ASSERT_FALSE(member(family, off));
        }
        break;
    }
    case Condition::A5: {
        ASSERT_EQ(premises[0].size(), 1U);
        ASSERT_EQ(off, std::set<long long>{-*premises[0].begin()});
        ASSERT_FALSE(member(family, off));
        break;
    }
    }
}

} // namespace

TEST(Supports, MinkowskiSumExamples)
{
    EXPECT_EQ(ints(minkowski_sum(zset({2, 3}), zset({0, 1}), to(20))), (Ints{2, 3, 4}));
    EXPECT_EQ(minkowski_sum(zset({2, 5, 9}), zset({0}), to(20)), zset({2, 5, 9}));
    EXPECT_TRUE(minkowski_sum(SupportSet::empty(Z), zset({1, 2}), to(20)).empty());
}

TEST(Supports, TranslateExamples)
{
    EXPECT_EQ(translate(zset({2, 3}), z(-2)), zset({0, 1}));
    EXPECT_TRUE(translate(SupportSet::empty(Z), z(4)).empty());
    EXPECT_EQ(translate(translate(zset({-1, 6}), z(3)), z(-3)), zset({-1, 6}));
}

TEST(Supports, FiniteSumsClosureExamples)
{
    EXPECT_EQ(ints(finite_sums_closure(zset({2, 3}), to(7))), (Ints{0, 2, 3, 4, 5, 6, 7}));
    EXPECT_EQ(finite_sums_closure(SupportSet::empty(Z), to(7)), zset({0}));
    EXPECT_EQ(ints(finite_sums_closure(zset({1}), to(5))), (Ints{0, 1, 2, 3, 4, 5}));
    EXPECT_THROW(finite_sums_closure(zset({-1, 2}), to(5)), not_in_nonneg_cone);
    SupportSet infinite = finite_sums_closure(zset({1}), to(5));
    EXPECT_FALSE(infinite.is_finite());
    EXPECT_EQ(infinite.to_string(), "{0,1,2,3,4,5,...} (exact through 5)");
    EXPECT_TRUE(finite_sums_closure(zset({0}), to(5)).is_finite());
}

TEST(Supports, InitialSegmentExamples)
{
    EXPECT_TRUE(is_initial_segment(zset({2}), zset({2, 3}), to(10)));
    EXPECT_FALSE(is_initial_segment(zset({3}), zset({2, 3}), to(10)));
    EXPECT_TRUE(is_initial_segment(SupportSet::empty(Z), zset({-4, 7}), to(10)));
    EXPECT_FALSE(is_initial_segment(zset({2, 4}), zset({2, 3, 4}), to(10)));
}

TEST(Supports, SupportSetBasics)
{
    SupportSet s = zset({5, 0, 2, 2});
    EXPECT_EQ(s.to_string(), "{0,2,5}");
    EXPECT_EQ(s.contains(z(2)), Truth::Yes);
    EXPECT_EQ(s.contains(z(3)), Truth::No);
    SupportSet p = SupportSet::prefix(Z, {z(0), z(1)}, z(4), false);
    EXPECT_EQ(p.contains(z(3)), Truth::No);
    EXPECT_EQ(p.contains(z(9)), Truth::Unknown);
    EXPECT_THROW(SupportSet::prefix(Z, {z(1), z(0)}, z(4), false), precondition_violation);

    long long next = 0;
    SupportSet e = SupportSet::enumerate(Z, [&]() -> std::optional<GroupElement> { return z(next++); }, Horizon(z(100), 3));
    EXPECT_TRUE(e.budget_exhausted());
    EXPECT_EQ(ints(e), (Ints{0, 1, 2}));
}

TEST(Supports, SupportOfEvaluatedSeries)
{
    Series geometric = invert(poly(Q, {{0, 1}, {1, -1}}), to(6));
    SupportSet s = SupportSet::of(coefficients_up_to(geometric, to(6)));
    EXPECT_EQ(ints(s), (Ints{0, 1, 2, 3, 4, 5, 6}));
    EXPECT_FALSE(s.is_finite());
}

TEST(Supports, FamilyMembershipExamples)
{
    const auto wnn = FamilyDescriptor::well_ordered(Region::nonneg_cone(Z));
    EXPECT_TRUE(family_contains(wnn, zset({0, 2, 5})));
    EXPECT_FALSE(family_contains(wnn, zset({-1})));

    Series naturals = invert(poly(Q, {{0, 1}, {1, -1}}), Horizon(z(1000), 50));
    SupportSet big = SupportSet::of(coefficients_up_to(naturals, Horizon(z(1000), 50)));
    Membership m = family_contains(FamilyDescriptor::finite_subsets(Region::whole(Z)), big);
    EXPECT_FALSE(m.value);
    EXPECT_NE(m.note.find("term budget"), std::string::npos);
}

TEST(Supports, RegionMembership)
{
    Budget b;
    EXPECT_EQ(monoid_contains({z(2), z(3)}, z(1), b), Truth::No);
    EXPECT_EQ(monoid_contains({z(2), z(3)}, z(5), b), Truth::Yes);
    EXPECT_EQ(monoid_contains({z(2), z(3)}, z(-2), b), Truth::No);
    EXPECT_EQ(monoid_contains({q(1, 2)}, q(3, 2), b), Truth::Yes);
    EXPECT_EQ(monoid_contains({q(1, 2)}, q(-1, 2), b), Truth::No);
    EXPECT_EQ(monoid_contains({z(-3), z(5)}, z(1), b), Truth::Yes);
    EXPECT_EQ(region_contains(Region::subgroup(Z, {z(4), z(6)}), z(2)), Truth::Yes);
    EXPECT_EQ(region_contains(Region::pos_cone(Z), z(0)), Truth::No);
    EXPECT_EQ(region_contains(Region::finite_set(Z, {z(1), z(4)}), z(4)), Truth::Yes);
}

TEST(Supports, ConditionExamples)
{
    const auto wnn = FamilyDescriptor::well_ordered(Region::nonneg_cone(Z));
    Verdict s1 = check_condition(wnn, Condition::S1);
    EXPECT_FALSE(s1.holds());
    ASSERT_TRUE(s1.witness && s1.witness->offending);
    EXPECT_EQ(*s1.witness->offending, zset({-1}));

    Verdict a4 = check_condition(FamilyDescriptor::finite_subsets(Region::whole(Z)), Condition::A4);
    EXPECT_EQ(a4.outcome, Verdict::Outcome::Fails);
    ASSERT_TRUE(a4.witness && !a4.witness->premises.empty());
    EXPECT_EQ(a4.witness->premises[0], zset({1}));

    for (auto c : all_conditions) {
        EXPECT_TRUE(check_condition(FamilyDescriptor::well_ordered(Region::whole(Z)), c).holds()) << to_string(c);
    }
}

TEST(Supports, RegionFamilyConditions)
{
    const auto even = FamilyDescriptor::well_ordered(Region::subgroup(Z, {z(4), z(6)}));
    Verdict a1 = check_condition(even, Condition::A1);
    EXPECT_EQ(a1.outcome, Verdict::Outcome::Fails);
    ASSERT_TRUE(a1.witness && a1.witness->element);
    EXPECT_EQ(*a1.witness->element, z(1));
    EXPECT_FALSE(check_condition(even, Condition::A3).holds());
    EXPECT_TRUE(check_condition(even, Condition::A5).holds());

    const auto mon = FamilyDescriptor::well_ordered(Region::submonoid(Z, {z(2), z(3)}));
    EXPECT_TRUE(check_condition(mon, Condition::A2).holds());
    EXPECT_FALSE(check_condition(mon, Condition::A5).holds());

    const auto pos = FamilyDescriptor::well_ordered(Region::pos_cone(Z));
    EXPECT_FALSE(check_condition(pos, Condition::S4).holds());
    EXPECT_TRUE(check_condition(pos, Condition::A2).holds());

    const auto fin_q = FamilyDescriptor::finite_subsets(Region::whole(QG));
    EXPECT_TRUE(check_condition(fin_q, Condition::A3).holds());
    EXPECT_EQ(check_condition(fin_q, Condition::A4).outcome, Verdict::Outcome::Fails);
}

TEST(Supports, ExplicitFamilyConditions)
{
    auto f = explicit_z({{}, {0}, {0, 1}});
    auto v = check_all_conditions(f);
    EXPECT_FALSE(v.at(Condition::S1).holds());
    EXPECT_FALSE(v.at(Condition::S2).holds());
    EXPECT_TRUE(v.at(Condition::S3).holds());
    EXPECT_TRUE(v.at(Condition::S4).holds());
    EXPECT_TRUE(v.at(Condition::S6).holds());
    EXPECT_FALSE(v.at(Condition::A2).holds());
    EXPECT_TRUE(v.at(Condition::A5).holds());
}

TEST(Supports, TrivialGroupRaynerFamily)
{
    const auto T = GroupDescriptor::trivial();
    const auto f = FamilyDescriptor::explicit_family(T, {SupportSet::empty(T), SupportSet::finite(T, {group_zero(T)})});
    for (auto c : all_conditions) {
        EXPECT_TRUE(check_condition(f, c).holds()) << to_string(c);
    }
}

TEST(Supports, ConditionNamesRoundTrip)
{
    for (auto c : all_conditions) {
        EXPECT_EQ(parse_condition(to_string(c)), c);
        EXPECT_FALSE(statement(c).empty());
    }
    EXPECT_FALSE(parse_condition("S7").has_value());
}

TEST(Supports, GroupWitnessExamples)
{
    const Horizon h = to(10);
    GroupWitnesses w = build_group_witnesses(zset({0, 1}), zset({0}), Q);
    ASSERT_TRUE(w.subset.has_value());
    EXPECT_EQ(testing_support::pairs(coefficients_up_to(w.subset->first, h)),
              (std::vector<std::pair<std::string, std::string>>{{"0", "1"}, {"1", "1"}}));
    const FieldElement c0 = coefficient_at(w.subset->second, z(0), h);
    EXPECT_FALSE(c0.is_zero());
    EXPECT_NE(c0, FieldElement::from_int(Q, -1));
    EXPECT_EQ(coefficient_at(w.subset->second, z(1), h), FieldElement::from_int(Q, -1));
    EXPECT_EQ(ints(support_up_to(w.subset->first + w.subset->second, h)), (Ints{0}));

    GroupWitnesses u = build_group_witnesses(zset({1}), zset({2}), Q);
    EXPECT_FALSE(u.subset.has_value());
    EXPECT_EQ(ints(support_up_to(u.union_pair.first + u.union_pair.second, h)), (Ints{1, 2}));

    EXPECT_THROW(build_group_witnesses(zset({0}), zset({0}), FieldDescriptor::prime_field(2)), field_too_small);
}

// Property: witness series realise the claimed supports for random A, B over several fields.
TEST(SupportsProperty, GroupWitnessesRealiseSupports)
{
    testing_support::FamilyGenerator gen(9, -3, 3);
    const Horizon h = to(10);
    for (const auto& k : {Q, FieldDescriptor::prime_field(3), FieldDescriptor::rational_functions(2)}) {
        for (int i = 0; i < 200; ++i) {
            auto sets = gen.next();
            if (sets.size() < 2) {
                continue;
            }
            SupportSet a = zset({sets[0].begin(), sets[0].end()});
            SupportSet b = zset({sets[1].begin(), sets[1].end()});
            std::set<long long> sub_b;
            for (auto e : sets[1]) {
                if (sets[0].count(e)) {
                    sub_b.insert(e);
                }
            }
            SupportSet bsub = zset({sub_b.begin(), sub_b.end()});
            GroupWitnesses ws = build_group_witnesses(a, bsub, k);
            ASSERT_TRUE(ws.subset.has_value());
            ASSERT_EQ(support_up_to(ws.subset->first, h), a.elements());
            ASSERT_EQ(support_up_to(ws.subset->second, h), a.elements());
            ASSERT_EQ(support_up_to(ws.subset->first + ws.subset->second, h), bsub.elements());

            GroupWitnesses wu = build_group_witnesses(a, b, k);
            std::set<long long> uni = sets[0];
            uni.insert(sets[1].begin(), sets[1].end());
            ASSERT_EQ(ints(support_up_to(wu.union_pair.first + wu.union_pair.second, h)), Ints(uni.begin(), uni.end()));
        }
    }
}

// Property: set operations agree with brute-force enumeration.
TEST(SupportsProperty, SetOperationsMatchBruteForce)
{
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<long long> val(-10, 10);
    std::uniform_int_distribution<long long> nonneg(0, 10);
    std::uniform_int_distribution<int> size(0, 8);
    auto random_set = [&](auto& dist) {
        std::set<long long> s;
        const int n = size(rng);
        for (int i = 0; i < n; ++i) {
            s.insert(dist(rng));
        }
        return s;
    };
    for (int i = 0; i < 300; ++i) {
        auto a = random_set(val);
        auto b = random_set(val);
        std::set<long long> sums;
        for (auto x : a) {
            for (auto y : b) {
                sums.insert(x + y);
            }
        }
        ASSERT_EQ(ints(minkowski_sum(zset({a.begin(), a.end()}), zset({b.begin(), b.end()}), to(30))), Ints(sums.begin(), sums.end()));

        const long long g = val(rng);
        std::set<long long> moved;
        for (auto x : a) {
            moved.insert(x + g);
        }
        ASSERT_EQ(ints(translate(zset({a.begin(), a.end()}), z(g))), Ints(moved.begin(), moved.end()));

        auto c = random_set(nonneg);
        std::vector<BigRational> gens(c.begin(), c.end());
        auto closure = testing_support::finite_sums_brute_force(gens, 25);
        Ints expected;
        for (const auto& x : closure) {
            expected.push_back(static_cast<long long>(numerator(x)));
        }
        ASSERT_EQ(ints(finite_sums_closure(zset({c.begin(), c.end()}), to(25))), expected);
    }
}

// Property: implications between conditions on 1000 random explicit families.
TEST(SupportsProperty, ConditionImplicationGraph)
{
    testing_support::FamilyGenerator gen(11, -3, 3);
    for (int i = 0; i < 1000; ++i) {
        auto sets = gen.next();
        auto v = check_all_conditions(explicit_z(sets));
        auto holds = [&](Condition c) { return v.at(c).holds(); };
        const bool has_empty = member(sets, {});
        // Restriction closure implies truncation closure.
        if (holds(Condition::S2)) {
            ASSERT_TRUE(holds(Condition::S6));
        }
        // A nonempty restriction-closed family contains the empty set.
        if (holds(Condition::S2) && holds(Condition::S5)) {
            ASSERT_TRUE(has_empty);
        }
        if (holds(Condition::S4)) {
            ASSERT_TRUE(holds(Condition::S5));
        }
        // Finite families over Z never contain every singleton.
        ASSERT_FALSE(holds(Condition::S1));
        // Translation invariance forces every member to be empty.
        ASSERT_EQ(holds(Condition::A3), std::all_of(sets.begin(), sets.end(), [](const auto& s) { return s.empty(); }));
        for (auto c : all_conditions) {
            ASSERT_NE(v.at(c).outcome, Verdict::Outcome::UnknownWithinBudget) << to_string(c);
        }
    }
}

// Property: every Fails verdict carries a witness that re-checks against the definition.
TEST(SupportsProperty, FailureWitnessesAreSound)
{
    testing_support::FamilyGenerator gen(12, -3, 3);
    for (int i = 0; i < 500; ++i) {
        auto sets = gen.next();
        auto v = check_all_conditions(explicit_z(sets));
        for (auto c : all_conditions) {
            if (v.at(c).outcome == Verdict::Outcome::Fails) {
                expect_sound_failure(sets, c, v.at(c));
                if (HasFatalFailure()) {
                    return;
                }
            }
        }
    }
}
