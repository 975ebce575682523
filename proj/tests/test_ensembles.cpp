#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "bpbound/ensembles.hpp"
#include "bpbound/errors.hpp"

using namespace bpbound;

namespace {

// Independent neighborhood: alternate variable -> check -> variable set expansion l times.
std::set<std::size_t> naive_neighborhood(const TannerGraph& g, std::size_t v, int l) {
    std::set<std::size_t> vars{v};
    for (int step = 0; step < l; ++step) {
        std::set<std::size_t> checks;
        for (std::size_t u : vars)
            for (std::size_t c : g.var_neighbors(u)) checks.insert(c);
        for (std::size_t c : checks)
            for (std::size_t u : g.chk_neighbors(c)) vars.insert(u);
    }
    vars.erase(v);
    return vars;
}

TannerGraph tree_graph() {
    return TannerGraph::from_edges(6, 3, {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {3, 1}, {4, 1}, {2, 2}, {5, 2}});
}

}  // namespace

TEST(Ensembles, RegularPolynomials) {
    const auto dd = regular_ensemble(3, 6);
    EXPECT_DOUBLE_EQ(dd.alpha, 3.0);
    EXPECT_DOUBLE_EQ(dd.beta, 6.0);
    EXPECT_DOUBLE_EQ(design_rate(dd), 0.5);
    EXPECT_TRUE(dd.is_regular());
    for (double x : {0.0, 0.3, 0.9, 1.0}) {
        EXPECT_NEAR(dd.lambda_at(x), x * x, 1e-15);
        EXPECT_NEAR(dd.rho_at(x), std::pow(x, 5), 1e-15);
        EXPECT_NEAR(dd.var_node_poly_at(x), std::pow(x, 3), 1e-15);
    }
}

TEST(Ensembles, IrregularEdgePerspective) {
    const auto dd = DegreeDistribution::from_node_fractions({{2, 0.5}, {3, 0.5}}, {{6, 1.0}});
    EXPECT_DOUBLE_EQ(dd.alpha, 2.5);
    // lambda_d = d L_d / alpha
    const auto lam = dd.lambda();
    EXPECT_NEAR(lam[2], 1.0 / 2.5, 1e-15);
    EXPECT_NEAR(lam[3], 1.5 / 2.5, 1e-15);
    EXPECT_FALSE(dd.is_regular());
    EXPECT_NEAR(design_rate(dd), 1.0 - 2.5 / 6.0, 1e-15);
}

TEST(Ensembles, RejectsBadDistributions) {
    EXPECT_THROW(DegreeDistribution::from_node_fractions({{2, 0.5}}, {{6, 1.0}}), std::invalid_argument);
    EXPECT_THROW(DegreeDistribution::from_node_fractions({{0, 1.0}}, {{6, 1.0}}), std::invalid_argument);
    EXPECT_THROW(regular_ensemble(1, 6), std::invalid_argument);
    EXPECT_THROW(regular_ensemble(4, 4), std::invalid_argument);
}

TEST(Ensembles, CodeRateByFamily) {
    const auto dd = regular_ensemble(2, 4);
    EXPECT_DOUBLE_EQ(code_rate(dd, CodeFamily::ldpc), 0.5);
    EXPECT_DOUBLE_EQ(code_rate(dd, CodeFamily::ldgm), 2.0);
}

TEST(Ensembles, SampledRegularGraphHasExactDegreesAndNoRepeats) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto g = sample_graph(regular_ensemble(3, 6), 60, CodeFamily::ldpc, rng);
        ASSERT_EQ(g.n(), 60u);
        ASSERT_EQ(g.m(), 30u);
        for (std::size_t v = 0; v < g.n(); ++v) {
            const auto& nb = g.var_neighbors(v);
            EXPECT_EQ(nb.size(), 3u);
            EXPECT_EQ(std::set<std::size_t>(nb.begin(), nb.end()).size(), nb.size());
        }
        for (std::size_t c = 0; c < g.m(); ++c) EXPECT_EQ(g.chk_neighbors(c).size(), 6u);
    }
}

TEST(Ensembles, SamplingIsDeterministicPerSeed) {
    Rng a(42), b(42), c(43);
    const auto dd = regular_ensemble(3, 6);
    const auto ga = sample_graph(dd, 100, CodeFamily::ldpc, a);
    const auto gb = sample_graph(dd, 100, CodeFamily::ldpc, b);
    const auto gc = sample_graph(dd, 100, CodeFamily::ldpc, c);
    EXPECT_EQ(ga.edges(), gb.edges());
    EXPECT_NE(ga.edges(), gc.edges());
}

TEST(Ensembles, IrregularDegreeCountsFollowFractions) {
    const auto dd = DegreeDistribution::from_node_fractions({{2, 0.5}, {3, 0.5}}, {{5, 1.0}});
    Rng rng(3);
    const auto g = sample_graph(dd, 200, CodeFamily::ldpc, rng);
    std::size_t deg2 = 0;
    for (std::size_t v = 0; v < g.n(); ++v) deg2 += g.var_neighbors(v).size() == 2;
    EXPECT_EQ(deg2, 100u);
    EXPECT_EQ(g.num_edges(), 500u);
}

TEST(Ensembles, SamplerRejectsImpossibleSizes) {
    Rng rng(1);
    EXPECT_THROW(sample_graph(regular_ensemble(3, 6), 7, CodeFamily::ldpc, rng), std::invalid_argument);
    EXPECT_THROW(sample_graph(regular_ensemble(3, 6), 4, CodeFamily::ldpc, rng), std::invalid_argument);
}

TEST(Ensembles, HandBuiltTreeNeighborhoods) {
    const auto g = tree_graph();
    EXPECT_EQ(neighborhood(g, 0, 1).members, (std::vector<std::size_t>{1, 2, 3, 4}));
    EXPECT_EQ(neighborhood(g, 0, 2).members, (std::vector<std::size_t>{1, 2, 3, 4, 5}));
    EXPECT_EQ(neighborhood(g, 5, 1).members, (std::vector<std::size_t>{2}));
    EXPECT_EQ(neighborhood(g, 5, 2).members, (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_TRUE(neighborhood(g, 0, 0).members.empty());
    for (std::size_t v = 0; v < g.n(); ++v)
        for (int l = 0; l <= 3; ++l) EXPECT_TRUE(neighborhood_is_tree(g, v, l));
}

TEST(Ensembles, CycleIsDetected) {
    // Variables 0 and 1 share two checks: a 4-cycle.
    const auto g = TannerGraph::from_edges(3, 2, {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 1}});
    EXPECT_FALSE(neighborhood_is_tree(g, 0, 1));
    EXPECT_FALSE(neighborhood_is_tree(g, 2, 2));
    EXPECT_TRUE(neighborhood_is_tree(g, 2, 0));
}

TEST(Ensembles, NeighborhoodMatchesNaiveExpansion) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const auto g = sample_graph(regular_ensemble(3, 6), 40, CodeFamily::ldpc, rng);
        for (std::size_t v = 0; v < g.n(); v += 3) {
            for (int l = 1; l <= 3; ++l) {
                const auto naive = naive_neighborhood(g, v, l);
                const auto nb = neighborhood(g, v, l);
                EXPECT_EQ(nb.members, std::vector<std::size_t>(naive.begin(), naive.end()));
            }
        }
    }
}

TEST(Ensembles, NeighborhoodsNestAndRespectTreeCap) {
    Rng rng(9);
    const auto g = sample_graph(regular_ensemble(3, 6), 500, CodeFamily::ldpc, rng);
    for (std::size_t v = 0; v < g.n(); v += 7) {
        std::vector<std::size_t> prev;
        for (int l = 1; l <= 3; ++l) {
            const auto nb = neighborhood(g, v, l);
            EXPECT_TRUE(std::includes(nb.members.begin(), nb.members.end(), prev.begin(), prev.end()));
            EXPECT_LE(nb.size(), exact_tree_cap(3, 6, l));
            if (neighborhood_is_tree(g, v, l)) {
                EXPECT_EQ(nb.size(), exact_tree_cap(3, 6, l));
            }
            prev = nb.members;
        }
    }
}

TEST(Ensembles, ProfileAgreesWithPointQueries) {
    Rng rng(4);
    const auto g = sample_graph(regular_ensemble(3, 6), 120, CodeFamily::ldpc, rng);
    for (std::size_t v = 0; v < g.n(); v += 11) {
        const auto prof = output_neighborhood_profile(g, v, 3);
        ASSERT_EQ(prof.sizes.size(), 4u);
        EXPECT_EQ(prof.sizes[0], 0u);
        for (int l = 1; l <= 3; ++l) {
            EXPECT_EQ(prof.sizes[l], output_neighborhood(g, v, l).size());
            EXPECT_EQ(prof.tree_like[l], neighborhood_is_tree(g, v, l));
        }
    }
}

TEST(Ensembles, LdgmOutputNeighborhoodIsCheckSide) {
    // Two information bits, three generator outputs: c0 = x0, c1 = x0 + x1, c2 = x1.
    const auto g = TannerGraph::from_edges(2, 3, {{0, 0}, {0, 1}, {1, 1}, {1, 2}}, CodeFamily::ldgm);
    EXPECT_EQ(g.num_output_bits(), 3u);
    EXPECT_EQ(output_neighborhood(g, 0, 1).members, (std::vector<std::size_t>{1}));
    EXPECT_EQ(output_neighborhood(g, 0, 2).members, (std::vector<std::size_t>{1, 2}));
}

TEST(Ensembles, TreeCapAndEstimate) {
    EXPECT_EQ(exact_tree_cap(3, 6, 1), 15u);
    EXPECT_EQ(exact_tree_cap(3, 6, 2), 15u + 3u * 5u * 2u * 5u);
    EXPECT_EQ(exact_tree_cap(2, 4, 3), 6u + 18u + 54u);
    EXPECT_DOUBLE_EQ(nominal_k_estimate(3, 6, 1), 10.0);
    EXPECT_DOUBLE_EQ(nominal_k_estimate(3, 6, 2), 110.0);
    EXPECT_DOUBLE_EQ(nominal_k_estimate(3, 6, 0), 0.0);
}

TEST(Ensembles, EdgeListRoundTrip) {
    Rng rng(8);
    const auto g = sample_graph(regular_ensemble(3, 6), 30, CodeFamily::ldpc, rng);
    std::stringstream buf;
    write_edge_list(buf, g);
    const auto back = read_edge_list(buf);
    EXPECT_EQ(back.n(), g.n());
    EXPECT_EQ(back.m(), g.m());
    EXPECT_EQ(back.edges(), g.edges());
}

TEST(Ensembles, MalformedEdgeLists) {
    std::istringstream empty("");
    EXPECT_THROW(read_edge_list(empty), ConfigError);
    std::istringstream out_of_range("2 1\n0 0\n5 0\n");
    EXPECT_THROW(read_edge_list(out_of_range), ConfigError);
    std::istringstream dangling("2 1\n0\n");
    EXPECT_THROW(read_edge_list(dangling), ConfigError);
    EXPECT_THROW(TannerGraph::from_edges(2, 1, {{0, 0}, {0, 0}}), std::invalid_argument);
}
