#include <gtest/gtest.h>

#include <cmath>

#include "bpbound/density_evolution.hpp"

using namespace bpbound;

TEST(DensityEvolution, ErasureFreeChannelStaysAtZero) {
    const auto traj = bec_de(regular_ensemble(3, 6), 0.0, 20);
    ASSERT_EQ(traj.points.size(), 21u);
    for (const auto& p : traj.points) {
        EXPECT_EQ(p.x_or_perr, 0.0);
        // Every neighborhood reveals the bit once a single iteration has run.
        EXPECT_EQ(p.mean_cond_entropy, p.l == 0 ? 1.0 : 0.0);
    }
}

TEST(DensityEvolution, FirstStepsByHand) {
    const double e = 0.3;
    const auto traj = bec_de(regular_ensemble(3, 6), e, 2);
    const double x1 = e * std::pow(1.0 - std::pow(1.0 - e, 5), 2);
    const double x2 = e * std::pow(1.0 - std::pow(1.0 - x1, 5), 2);
    EXPECT_DOUBLE_EQ(traj.points[1].x_or_perr, x1);
    EXPECT_NEAR(traj.points[2].x_or_perr, x2, 1e-15);
    // Extrinsic erasure after one iteration uses all three checks.
    const double ext1 = std::pow(1.0 - std::pow(1.0 - e, 5), 3);
    EXPECT_NEAR(traj.points[1].tau, (1.0 - e) * (1.0 - ext1), 1e-15);
}

TEST(DensityEvolution, TauIsNondecreasingAndBounded) {
    const auto traj = bec_de(regular_ensemble(3, 6), 0.45, 100);
    const double h_y = channel_stats(BmsChannel::bec(0.45)).output_entropy;
    for (std::size_t l = 1; l < traj.points.size(); ++l) {
        EXPECT_GE(traj.points[l].tau, traj.points[l - 1].tau - 1e-15);
        EXPECT_LE(traj.points[l].tau, 1.0 - 0.45 + 1e-15);
        EXPECT_NEAR(traj.points[l].tau + traj.points[l].mean_cond_entropy, h_y, 1e-12);
    }
    // Above threshold the recursion stalls at a positive fixed point.
    EXPECT_GT(traj.points.back().x_or_perr, 0.1);
}

TEST(DensityEvolution, Thresholds) {
    const double t36 = bec_threshold(regular_ensemble(3, 6), 1e-4);
    EXPECT_GE(t36, 0.42);
    EXPECT_LE(t36, 0.44);
    EXPECT_NEAR(t36, 0.4294, 2e-4);
    // Degree-two variables: the threshold is 1/(dc-1), approached linearly at rate 3 eps,
    // so a finite recursion length stops short of it.
    const double t24 = bec_threshold(regular_ensemble(2, 4), 1e-5);
    EXPECT_LT(t24, 1.0 / 3.0);
    EXPECT_GT(t24, 1.0 / 3.0 - 3e-3);
    ThresholdOptions long_run;
    long_run.max_iters = 200000;
    EXPECT_NEAR(bec_threshold(regular_ensemble(2, 4), 1e-5, long_run), 1.0 / 3.0, 5e-5);
    const auto nonpositive = DegreeDistribution::from_node_fractions({{4, 1.0}}, {{3, 1.0}});
    EXPECT_EQ(bec_threshold(nonpositive, 1e-4), 1.0);
    EXPECT_THROW(bec_threshold(regular_ensemble(3, 6), 0.0), std::invalid_argument);
}

TEST(DensityEvolution, ThresholdRespectsOptions) {
    ThresholdOptions loose;
    loose.max_iters = 50;
    const double quick = bec_threshold(regular_ensemble(3, 6), 1e-4, loose);
    EXPECT_LT(quick, bec_threshold(regular_ensemble(3, 6), 1e-4));
}

TEST(DensityEvolution, PopulationTracksExactRecursionOnBec) {
    const auto dd = regular_ensemble(3, 6);
    const double e = 0.25;
    const auto exact = bec_de(dd, e, 30);
    const auto pop = population_de(dd, BmsChannel::bec(e), 30, 20000, 4);
    ASSERT_EQ(pop.points.size(), exact.points.size());
    for (std::size_t l = 0; l < exact.points.size(); ++l) {
        EXPECT_NEAR(pop.points[l].x_or_perr, exact.points[l].x_or_perr, 0.02) << l;
        EXPECT_NEAR(pop.points[l].tau, exact.points[l].tau, 0.02) << l;
    }
}

TEST(DensityEvolution, PopulationIsDeterministic) {
    const auto dd = regular_ensemble(3, 6);
    const auto ch = BmsChannel::bsc(0.06);
    const auto a = population_de(dd, ch, 5, 2000, 3);
    const auto b = population_de(dd, ch, 5, 2000, 3);
    for (std::size_t l = 0; l < a.points.size(); ++l) EXPECT_EQ(a.points[l].tau, b.points[l].tau);
}

TEST(DensityEvolution, PopulationOnBscBelowAndAboveThreshold) {
    const auto dd = regular_ensemble(3, 6);
    const auto good = population_de(dd, BmsChannel::bsc(0.04), 40, 20000, 1);
    EXPECT_LT(good.points.back().x_or_perr, 1e-3);
    const auto bad = population_de(dd, BmsChannel::bsc(0.11), 40, 20000, 1);
    EXPECT_GT(bad.points.back().x_or_perr, 0.05);
}

TEST(DensityEvolution, PopulationTauAgreesWithLargeGraphSimulation) {
    const auto dd = regular_ensemble(3, 6);
    const auto ch = BmsChannel::bsc(0.05);
    const auto de = de_tau(dd, ch, 1, 100000, 2);
    const auto sim = estimate_tau(dd, ch, 10000, 1, 4, 3);
    EXPECT_NEAR(de.tau_hat, sim.tau_hat, 4.0 * std::hypot(de.std_err, sim.std_err));
}

TEST(DensityEvolution, QuantizedBiawgnPopulationRuns) {
    const auto traj = population_de(regular_ensemble(3, 6), BmsChannel::quantized_biawgn(0.8, 16), 10, 5000, 7);
    for (std::size_t l = 1; l < traj.points.size(); ++l) {
        EXPECT_GE(traj.points[l].tau, 0.0);
        EXPECT_LE(traj.points[l].x_or_perr, traj.points[0].x_or_perr + 0.02);
    }
}

TEST(DensityEvolution, RejectsSmallPopulations) {
    EXPECT_THROW(population_de(regular_ensemble(3, 6), BmsChannel::bec(0.3), 5, 999, 0), std::invalid_argument);
    EXPECT_THROW(bec_de(regular_ensemble(3, 6), 1.5, 5), std::invalid_argument);
}
