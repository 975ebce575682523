#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <vector>

#include "json.hpp"

#include "bpbound/bounds.hpp"

using namespace bpbound;

namespace {

// Direct enumeration of max_l (c/l)^(2l+2) over a generous range of l.
double brute_k_bd_log2(double c) {
    double best = -1e300;
    for (int l = 1; l <= 2000; ++l) best = std::max(best, (2.0 * l + 2.0) * std::log2(c / l));
    return best;
}

double h2(double p) { return p <= 0.0 || p >= 1.0 ? 0.0 : -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

// Newton iteration on h2(p) = h over (0, 1/2), independent of the library bisection.
double newton_inverse_h2(double h) {
    double p = 0.25;
    for (int i = 0; i < 200; ++i) {
        const double f = h2(p) - h;
        const double df = std::log2((1 - p) / p);
        p = std::clamp(p - f / df, 1e-300, 0.5 - 1e-15);
    }
    return p;
}

}  // namespace

TEST(Bounds, PermutationAndRateBounds) {
    EXPECT_DOUBLE_EQ(permutation_entropy_bound(1.0, 0.2, 4), 0.95);
    const auto r = achievable_rate_bound(0.5, 0.1, 10);
    EXPECT_NEAR(r.raw, 0.49, 1e-15);
    EXPECT_NEAR(r.clamped, 0.49, 1e-15);
    const auto neg = achievable_rate_bound(0.05, 0.9, 1);
    EXPECT_LT(neg.raw, 0.0);
    EXPECT_EQ(neg.clamped, 0.0);
    EXPECT_THROW(permutation_entropy_bound(1.0, 0.1, 0.5), std::invalid_argument);
    EXPECT_THROW(permutation_entropy_bound(0.5, 0.6, 2), std::invalid_argument);
    EXPECT_THROW(achievable_rate_bound(0.5, -0.1, 2), std::invalid_argument);
}

TEST(Bounds, TightenedBoundIsTheMinimum) {
    const std::vector<std::pair<double, double>> schedule{{0.1, 10}, {0.3, 20}, {0.35, 40}};
    EXPECT_NEAR(tightened_entropy_bound(1.0, schedule), 1.0 - 0.015, 1e-15);
    EXPECT_THROW(tightened_entropy_bound(1.0, {}), std::invalid_argument);
}

TEST(Bounds, InverseBinaryEntropyMatchesNewton) {
    for (double h : {1e-6, 0.01, 0.1, 0.5, 0.9, 0.999}) {
        const double p = inverse_binary_entropy(h);
        EXPECT_NEAR(p, newton_inverse_h2(h), 1e-10) << h;
        EXPECT_NEAR(h2(p), h, 1e-9);
    }
    EXPECT_EQ(inverse_binary_entropy(0.0), 0.0);
    EXPECT_EQ(inverse_binary_entropy(1.0), 0.5);
}

TEST(Bounds, FanoLowerBound) {
    // Rate inside the achievable bound: no constraint.
    EXPECT_EQ(fano_pe_lower_bound(0.45, 0.5, 0.1, 10), 0.0);
    // R + tau/k - C = 0.1.
    const double pe = fano_pe_lower_bound(0.59, 0.5, 0.1, 10);
    EXPECT_NEAR(h2(pe), 0.1, 1e-9);
    EXPECT_EQ(fano_pe_lower_bound(1.0, 0.0, 0.5, 1), 0.5);
}

TEST(Bounds, KbdMatchesBruteForce) {
    for (int i = 1; i <= 500; ++i) {
        const double c = 0.1 * i;
        EXPECT_NEAR(k_bd(c).log2_value, brute_k_bd_log2(c), 1e-9 * std::max(1.0, std::abs(brute_k_bd_log2(c))))
            << c;
    }
}

TEST(Bounds, KbdExactValues) {
    const auto one = k_bd(1.0);
    ASSERT_TRUE(one.linear);
    EXPECT_EQ(*one.linear, 1.0);
    EXPECT_EQ(one.argmax_l, 1);
    const auto two = k_bd(2.0);
    ASSERT_TRUE(two.linear);
    EXPECT_EQ(*two.linear, 16.0);
    // (3/1)^4 = 81 against (3/2)^6 = 11.39.
    EXPECT_NEAR(*k_bd(3.0).linear, 81.0, 1e-9);
    // Far past the linear range only the logarithm is kept.
    const auto huge = k_bd(1000.0);
    EXPECT_FALSE(huge.linear);
    EXPECT_GT(huge.log2_value, kLinearLog2Limit);
    EXPECT_THROW(k_bd(0.0), std::invalid_argument);
}

TEST(Bounds, KbdBelowOneIsLeadingTerm) {
    for (double c : {0.1, 0.5, 0.9}) EXPECT_NEAR(k_bd(c).log2_value, 4.0 * std::log2(c), 1e-12);
}

TEST(Bounds, FixedOpsRateBound) {
    const auto r = rate_bound_fixed_ops(0.5, 0.16, 2.0);
    EXPECT_NEAR(r.rate_bound, 0.49, 1e-15);
    EXPECT_NEAR(r.gap_log2, std::log2(0.01), 1e-12);
    const auto zero = rate_bound_fixed_ops(0.5, 0.0, 2.0);
    EXPECT_EQ(zero.rate_bound, 0.5);
    EXPECT_TRUE(std::isinf(zero.gap_log2));
}

TEST(Bounds, MinOpsIsTheSmallestSufficientC) {
    for (double eps : {1e-2, 1e-4, 1e-7, 1e-12}) {
        for (double tau : {0.05, 0.1, 0.5}) {
            const double c = min_ops_per_bit(eps, tau);
            const double target = std::log2(tau / eps);
            EXPECT_GE(k_bd(c).log2_value, target - 1e-12);
            EXPECT_LT(k_bd(c * (1.0 - 2e-6)).log2_value, target);
        }
    }
    // Small target: c below one.
    EXPECT_NEAR(min_ops_per_bit(0.5, 0.1), std::pow(0.2, 0.25), 1e-5);
    EXPECT_THROW(min_ops_per_bit(0.0, 0.1), std::invalid_argument);
}

TEST(Bounds, MinOpsGrowsWithLogInverseGap) {
    double prev = 0.0;
    for (int k = 2; k <= 12; ++k) {
        const double c = min_ops_per_bit(std::pow(10.0, -k), 0.1);
        EXPECT_GT(c, prev);
        prev = c;
    }
    // Ratio c_min / log(1/eps) settles once the optimum moves off l = 1.
    const double r1 = min_ops_per_bit(1e-30, 0.1) / 30.0;
    const double r2 = min_ops_per_bit(1e-60, 0.1) / 60.0;
    EXPECT_NEAR(r1 / r2, 1.0, 0.1);
}

TEST(Bounds, ExpCrossoverMatchesGolden) {
    std::ifstream in(std::string(BPBOUND_GOLDEN_DIR) + "/exp_crossover.json");
    ASSERT_TRUE(in);
    const auto golden = nlohmann::json::parse(in);
    const auto x = exp_crossover();
    EXPECT_DOUBLE_EQ(x.c_star, golden.at("c_star").get<double>());
    EXPECT_DOUBLE_EQ(x.last_failure, golden.at("last_failure").get<double>());
    EXPECT_FALSE(x.holds_at_two);
    EXPECT_TRUE(x.holds_at_one);  // k_bd(1) = 1 < e
}

TEST(Bounds, CrossoverTailHolds) {
    const auto x = exp_crossover();
    for (double c = x.c_star; c <= 200.0; c += 0.37)
        EXPECT_LT(k_bd(c).log2_value, c * std::numbers::log2e) << c;
    EXPECT_GE(k_bd(x.last_failure).log2_value, x.last_failure * std::numbers::log2e);
}

TEST(Bounds, NeighborhoodChainIsOrdered) {
    for (int l = 1; l <= 5; ++l) {
        const auto k = k_max_chain(3, 6, l, 0.5);
        EXPECT_LE(k.tree_sum_log2, k.squared_sum_log2);
        EXPECT_LE(k.squared_sum_log2, k.power_minus_one_log2);
        EXPECT_LE(k.power_minus_one_log2, k.power_log2);
        EXPECT_LE(k.power_log2, k.ops_form_log2);
    }
    EXPECT_THROW(k_max_chain(3, 6, 0, 0.5), std::invalid_argument);
}
