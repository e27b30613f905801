#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace chronos;
using support::make_tasks;

TEST(Gcd, Examples) {
    EXPECT_EQ(gcd_of_periods({2, 5}), 1);
    EXPECT_EQ(gcd_of_periods({4, 8, 16}), 4);
    EXPECT_EQ(gcd_of_periods({12, 18, 30}), support::brute_gcd({12, 18, 30}));
    EXPECT_EQ(gcd_of_periods({12, 18, 30}), 6);
}

TEST(Gcd, EmptyIsUsageError) {
    std::vector<Time> none;
    EXPECT_THROW(gcd_of_periods(std::span<const Time>(none)), UsageError);
}

TEST(Gcd, MatchesDivisorScan) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        std::uniform_int_distribution<Time> v(1, 240);
        std::vector<Time> s(std::uniform_int_distribution<int>(1, 5)(rng));
        for (auto& x : s) x = v(rng);
        const Time g = gcd_of_periods(std::span<const Time>(s));
        EXPECT_EQ(g, support::brute_gcd(s));
        for (Time x : s) EXPECT_EQ(x % g, 0);
    }
}

TEST(Rate, Examples) {
    const Mapping two({{1, 2}, {2, 5}}, {1, 2});
    EXPECT_EQ(expected_interrupt_rate(two), Rational(7, 10));
    const Mapping three({{1, 2}, {2, 3}, {3, 5}}, {1, 2, 3});
    EXPECT_EQ(expected_interrupt_rate(three), Rational(31, 30));
    EXPECT_EQ(expected_interrupt_rate(Mapping::single_timer(4, 1)), Rational(1));
}

TEST(Rate, UnusedTimersDoNotCount) {
    const Mapping m({{1, 2}, {2, 5}}, {1, 1});
    EXPECT_EQ(expected_interrupt_rate(m), Rational(1, 2));
}

TEST(RequiredTicks, Figure1) {
    const auto ts = make_tasks({2, 5});
    EXPECT_EQ(required_ticks(ts, 10), (std::vector<Time>{2, 4, 5, 6, 8, 10}));
    std::vector<Time> not_required;
    const auto req = required_ticks(ts, 10);
    for (Time t = 1; t <= 10; ++t)
        if (std::find(req.begin(), req.end(), t) == req.end()) not_required.push_back(t);
    EXPECT_EQ(not_required, (std::vector<Time>{1, 3, 7, 9}));
}

TEST(RequiredTicks, EveryTickForPeriodOne) {
    EXPECT_EQ(required_ticks(make_tasks({1}), 4), (std::vector<Time>{1, 2, 3, 4}));
}

TEST(RequiredTicks, MatchesPerTaskEnumeration) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Time> periods(std::uniform_int_distribution<int>(1, 6)(rng));
        for (auto& p : periods) p = std::uniform_int_distribution<Time>(1, 12)(rng);
        const auto ts = make_tasks(periods);
        const Time h = ts.hyperperiod();
        std::vector<Time> expected;
        for (const auto& [t, id] : support::oracle_releases(periods, h))
            if (expected.empty() || expected.back() != t) expected.push_back(t);
        EXPECT_EQ(required_ticks(ts, h), expected);
    }
}

TEST(Harmonic, Examples) {
    EXPECT_TRUE(is_harmonic_chain({3, 6, 12, 24, 48}));
    EXPECT_FALSE(is_harmonic_chain({2, 3}));
    EXPECT_TRUE(is_harmonic_chain({7}));
    EXPECT_TRUE(is_harmonic_chain({48, 3, 12}));
}

TEST(Harmonic, ChainsCoverAndEachIsHarmonic) {
    const std::vector<Time> p{3, 5, 6, 9, 10, 12, 18, 20};
    const auto chains = harmonic_chains(p);
    std::vector<Time> seen;
    for (const auto& c : chains) {
        EXPECT_TRUE(is_harmonic_chain(std::span<const Time>(c)));
        seen.insert(seen.end(), c.begin(), c.end());
    }
    std::sort(seen.begin(), seen.end());
    EXPECT_EQ(seen, p);
}

TEST(TaskSet, ValidationAndHyperperiod) {
    EXPECT_THROW(make_tasks({0}), UsageError);
    EXPECT_THROW(TaskSet({Task{2, 0, 4, 4, 5}}), UsageError);
    EXPECT_THROW(TaskSet({Task{1, 0, 4, 5, 5}}), UsageError);
    EXPECT_EQ(make_tasks({4, 6, 10}).hyperperiod(), 60);
    EXPECT_THROW(make_tasks({1'000'000'007, 998'244'353, 1'000'000'009}).hyperperiod(), ConfigError);
}

TEST(TaskSet, ScalingMultipliesPeriodsAndDeadlines) {
    const auto ts = make_tasks({3, 5}).scaled(4);
    EXPECT_EQ(ts[0].period, 12);
    EXPECT_EQ(ts[1].deadline, 20);
    EXPECT_THROW(ts.scaled(0), UsageError);
}

TEST(Mapping, DivisibilityIsChecked) {
    const auto ts = make_tasks({4, 6});
    EXPECT_NO_THROW(Mapping({{1, 2}}, {1, 1}).validate_against(ts));
    EXPECT_THROW(Mapping({{1, 4}}, {1, 1}).validate_against(ts), UsageError);
    EXPECT_THROW(Mapping({{1, 2}}, {1}).validate_against(ts), UsageError);
    EXPECT_THROW(Mapping({{1, 2}}, {2, 1}), UsageError);
}
