#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "bpbound/errors.hpp"
#include "bpbound/oracle.hpp"
#include "bpbound/simulation.hpp"

using namespace bpbound;

namespace {

double h2(double p) { return p <= 0.0 || p >= 1.0 ? 0.0 : -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

// GF(2) rank of the parity-check matrix by row reduction.
std::size_t parity_rank(const TannerGraph& g) {
    std::vector<std::uint32_t> rows;
    for (std::size_t c = 0; c < g.m(); ++c) {
        std::uint32_t r = 0;
        for (std::size_t v : g.chk_neighbors(c)) r |= 1u << v;
        rows.push_back(r);
    }
    std::size_t rank = 0;
    for (std::size_t bit = 0; bit < g.n(); ++bit) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && !((rows[pivot] >> bit) & 1u)) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != rank && ((rows[r] >> bit) & 1u)) rows[r] ^= rows[rank];
        ++rank;
    }
    return rank;
}

TannerGraph tree_graph() {
    return TannerGraph::from_edges(6, 3, {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {3, 1}, {4, 1}, {2, 2}, {5, 2}});
}

// Length-3 repetition code as a two-check LDPC graph.
TannerGraph repetition3() { return TannerGraph::from_edges(3, 2, {{0, 0}, {1, 0}, {1, 1}, {2, 1}}); }

std::vector<TannerGraph> random_small_graphs() {
    std::vector<TannerGraph> out;
    for (std::uint64_t s = 0; s < 6; ++s) {
        std::size_t retries = 0;
        out.push_back(detail::sample_with_retries(regular_ensemble(s % 2 ? 3 : 2, s % 2 ? 6 : 4), s < 3 ? 8 : 10,
                                                  CodeFamily::ldpc, derive_seed(99, s), retries));
    }
    return out;
}

}  // namespace

TEST(Oracle, CodewordCountMatchesRank) {
    for (const auto& g : random_small_graphs()) {
        const auto code = ExactCode::from_graph(g);
        EXPECT_EQ(code.codewords().size(), std::size_t{1} << (g.n() - parity_rank(g)));
        for (auto w : code.codewords()) EXPECT_TRUE(ExactCode::satisfies_checks(g, w));
    }
    EXPECT_EQ(ExactCode::from_graph(tree_graph()).codewords().size(), 8u);
}

TEST(Oracle, RepetitionCodeEntropyClosedForm) {
    const double p = 0.1;
    const auto code = ExactCode::from_graph(repetition3());
    ASSERT_EQ(code.codewords().size(), 2u);
    // Output patterns with a zeros: probability (1/2)[(1-p)^a p^(3-a) + p^a (1-p)^(3-a)].
    double h = 0.0;
    for (int a = 0; a <= 3; ++a) {
        const double mult = a == 0 || a == 3 ? 1.0 : 3.0;
        const double q = 0.5 * (std::pow(1 - p, a) * std::pow(p, 3 - a) + std::pow(p, a) * std::pow(1 - p, 3 - a));
        h -= mult * q * std::log2(q);
    }
    EXPECT_NEAR(exact_joint_output_entropy(code, BmsChannel::bsc(p)), h / 3.0, 1e-13);
}

TEST(Oracle, UncodedOutputsAreIndependent) {
    std::vector<std::uint32_t> all;
    for (std::uint32_t w = 0; w < 32; ++w) all.push_back(w);
    const ExactCode code(5, all);
    const auto ch = BmsChannel::quantized_biawgn(0.9, 4);
    EXPECT_NEAR(exact_joint_output_entropy(code, ch), channel_stats(ch).output_entropy, 1e-13);
    EXPECT_NEAR(code.rate(), 1.0, 1e-15);
}

TEST(Oracle, ConditionalEntropyOnRepetitionCode) {
    const double p = 0.2;
    const auto code = ExactCode::from_graph(repetition3());
    const auto ch = BmsChannel::bsc(p);
    EXPECT_NEAR(exact_conditional_entropy(code, ch, 0, {}), 1.0, 1e-13);
    // Y0 | Y1: Y0 xor Y1 = Z0 xor Z1 with flip probability 2p(1-p).
    EXPECT_NEAR(exact_conditional_entropy(code, ch, 0, {1}), h2(2 * p * (1 - p)), 1e-13);
    EXPECT_THROW(exact_conditional_entropy(code, ch, 0, {0}), std::invalid_argument);
    EXPECT_THROW(exact_conditional_entropy(code, ch, 7, {}), std::out_of_range);
}

TEST(Oracle, ExactTauProperties) {
    const auto code = ExactCode::from_graph(tree_graph());
    const auto ch = BmsChannel::bsc(0.1);
    for (std::size_t i = 0; i < code.n(); ++i) {
        EXPECT_EQ(exact_tau(code, ch, i, 0), 0.0);
        double prev = 0.0;
        for (int l = 1; l <= 3; ++l) {
            const double t = exact_tau(code, ch, i, l);
            EXPECT_GE(t, prev - 1e-12);
            EXPECT_LE(t, 1.0 - h2(0.1) + 1e-12);
            prev = t;
        }
    }
    for (int l = 1; l <= 2; ++l) EXPECT_NEAR(exact_tau(code, BmsChannel::bsc(0.5), 0, l), 0.0, 1e-12);
}

TEST(Oracle, FanoChainIdentity) {
    for (const auto& g : random_small_graphs()) {
        const auto code = ExactCode::from_graph(g);
        for (const auto& ch : {BmsChannel::bsc(0.05), BmsChannel::bsc(0.2), BmsChannel::bec(0.3)}) {
            const auto f = exact_fano_chain(code, ch);
            EXPECT_LT(std::abs(f.residual()), 1e-9);
            EXPECT_GE(f.h_x_given_y, -1e-15);
        }
    }
}

TEST(Oracle, FanoChainOnRepetitionCode) {
    const double p = 0.1;
    const auto f = exact_fano_chain(ExactCode::from_graph(repetition3()), BmsChannel::bsc(p));
    EXPECT_NEAR(f.rate, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(f.h_y_given_x, h2(p), 1e-13);
    // Posterior of the repetition codeword: majority is wrong with probability
    // P(2 or 3 flips); H(X|Y) averages h of the posterior over patterns.
    const double pa = std::pow(1 - p, 3) + std::pow(p, 3);  // all equal
    const double pb = 1 - pa;                                // one disagreement
    const double post_a = std::pow(p, 3) / pa;
    const double post_b = p / (p + (1 - p));
    EXPECT_NEAR(f.h_x_given_y * 3.0, pa * h2(post_a) + pb * h2(post_b), 1e-13);
}

TEST(Oracle, PermutationBoundHolds) {
    for (const auto& g : random_small_graphs()) {
        const auto code = ExactCode::from_graph(g);
        for (double p : {0.05, 0.1, 0.2}) {
            for (int l : {1, 2}) {
                const auto r = verify_permutation_bound(code, BmsChannel::bsc(p), l);
                EXPECT_TRUE(r.holds);
                EXPECT_GE(r.slack, -1e-9);
                PermutationCheckOptions per_node;
                per_node.per_node = true;
                const auto tight = verify_permutation_bound(code, BmsChannel::bsc(p), l, per_node);
                EXPECT_LE(tight.rhs, r.rhs + 1e-15);
                EXPECT_TRUE(tight.holds);
            }
        }
    }
}

TEST(Oracle, CorruptedRhsIsReported) {
    const auto code = ExactCode::from_graph(tree_graph());
    PermutationCheckOptions opts;
    opts.rhs_offset = -1.0;
    const auto r = verify_permutation_bound(code, BmsChannel::bsc(0.1), 1, opts);
    EXPECT_FALSE(r.holds);
    EXPECT_LT(r.slack, 0.0);
}

TEST(Oracle, UselessChannelGivesZeroTau) {
    const auto r = verify_permutation_bound(ExactCode::from_graph(tree_graph()), BmsChannel::bsc(0.5), 1);
    EXPECT_NEAR(r.tau_bar, 0.0, 1e-12);
    EXPECT_TRUE(r.holds);
}

TEST(Oracle, BudgetIsEnforced) {
    std::vector<std::uint32_t> all(1u << 16);
    for (std::uint32_t w = 0; w < all.size(); ++w) all[w] = w;
    const ExactCode code(16, all);
    EXPECT_THROW(exact_joint_output_entropy(code, BmsChannel::bsc(0.1)), BudgetExceeded);
}

TEST(Oracle, CodeValidation) {
    EXPECT_THROW(ExactCode(0, {0}), std::invalid_argument);
    EXPECT_THROW(ExactCode(17, {0}), std::invalid_argument);
    EXPECT_THROW(ExactCode(3, {1, 1}), std::invalid_argument);
    EXPECT_THROW(ExactCode(3, {8}), std::invalid_argument);
    EXPECT_THROW(ExactCode(3, {1}, repetition3()), std::invalid_argument);
    EXPECT_THROW(ExactCode(3, {0, 7}).graph().value(), std::bad_optional_access);
}

TEST(Oracle, CodeFileRoundTrip) {
    const auto code = ExactCode::from_graph(tree_graph());
    std::stringstream buf;
    write_exact_code(buf, code);
    const auto back = read_exact_code(buf, tree_graph());
    EXPECT_EQ(back.codewords(), code.codewords());
    std::istringstream bad("3 1\n10x\n");
    EXPECT_THROW(read_exact_code(bad), ConfigError);
}

TEST(Oracle, LdgmImage) {
    const auto g = TannerGraph::from_edges(3, 4, {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 3}}, CodeFamily::ldgm);
    const auto code = ExactCode::from_graph(g);
    EXPECT_EQ(code.n(), 4u);
    EXPECT_EQ(code.codewords().size(), 8u);
    EXPECT_NEAR(code.rate(), 0.75, 1e-15);
    EXPECT_LT(std::abs(exact_fano_chain(code, BmsChannel::bsc(0.1)).residual()), 1e-9);
}
