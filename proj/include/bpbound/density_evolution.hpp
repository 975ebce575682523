#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bpbound/channels.hpp"
#include "bpbound/decoder.hpp"
#include "bpbound/ensembles.hpp"
#include "bpbound/numeric.hpp"
#include "bpbound/rng.hpp"

namespace bpbound {

struct DePoint {
    int l = 0;
    // BEC: erasure probability of variable-to-check messages. Otherwise: message error
    // probability (negative LLR, ties count one half).
    double x_or_perr = 0.0;
    double mean_cond_entropy = 0.0;  // E H(Y_i | extrinsic), bits
    double tau = 0.0;                // H(Y_i) - mean_cond_entropy
    double tau_stderr = 0.0;         // sampling error (population DE only)
};

struct DeTrajectory {
    std::vector<DePoint> points;      // l = 0 .. iters
    std::size_t population_size = 0;  // 0 for the exact BEC recursion
};

// Extrinsic erasure probability seen by a variable node after l iterations when the
// variable-to-check erasure probability at l-1 is x_prev: L(1 - rho(1 - x_prev)).
inline double bec_extrinsic_erasure(const DegreeDistribution& dd, double x_prev) {
    return dd.var_node_poly_at(1.0 - dd.rho_at(1.0 - x_prev));
}

// Exact BEC density evolution x_{l+1} = eps * lambda(1 - rho(1 - x_l)), x_0 = eps.
inline DeTrajectory bec_de(const DegreeDistribution& dd, double eps, int iters) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("bec_de: eps must lie in [0, 1]");
    if (iters < 0) throw std::invalid_argument("bec_de: iters must be nonnegative");
    const double h_y = channel_stats(BmsChannel::bec(eps)).output_entropy;
    DeTrajectory traj;
    double x = eps;
    traj.points.push_back({0, x, h_y, 0.0, 0.0});
    for (int l = 1; l <= iters; ++l) {
        const double ext = bec_extrinsic_erasure(dd, x);
        x = eps * dd.lambda_at(1.0 - dd.rho_at(1.0 - x));
        const double tau = (1.0 - eps) * (1.0 - ext);
        traj.points.push_back({l, x, h_y - tau, tau, 0.0});
    }
    return traj;
}

struct ThresholdOptions {
    int max_iters = 2000;  // L
    double target = 1e-8;  // success when x_L < target
};

inline bool bec_converges(const DegreeDistribution& dd, double eps, const ThresholdOptions& opts) {
    double x = eps;
    for (int l = 0; l < opts.max_iters; ++l) {
        x = eps * dd.lambda_at(1.0 - dd.rho_at(1.0 - x));
        if (x < opts.target) return true;
    }
    return x < opts.target;
}

// Largest erasure probability (within tol) for which the BEC recursion converges.
// Ensembles with nonpositive design rate report 1.0 by convention.
inline double bec_threshold(const DegreeDistribution& dd, double tol, const ThresholdOptions& opts = {}) {
    if (!(tol > 0.0)) throw std::invalid_argument("bec_threshold: tol must be positive");
    if (design_rate(dd) <= 0.0) return 1.0;
    double lo = 0.0;
    double hi = 1.0;
    if (bec_converges(dd, hi, opts)) return 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (bec_converges(dd, mid, opts))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

namespace detail {

// Inverse-CDF sampler over degrees d >= 1 with weights[d].
class DegreeSampler {
public:
    explicit DegreeSampler(const std::vector<double>& weights) {
        double acc = 0.0;
        for (std::size_t d = 1; d < weights.size(); ++d) {
            if (weights[d] <= 0.0) continue;
            acc += weights[d];
            cdf_.push_back(acc);
            degree_.push_back(static_cast<int>(d));
        }
        for (double& c : cdf_) c /= acc;
    }
    int operator()(double u) const {
        for (std::size_t k = 0; k + 1 < cdf_.size(); ++k)
            if (u < cdf_[k]) return degree_[k];
        return degree_.back();
    }

private:
    std::vector<double> cdf_;
    std::vector<int> degree_;
};

// Shuffled stratified uniforms (s + U_s) / count: one draw in each of count equal cells.
inline std::vector<double> stratified_uniforms(std::size_t count, Rng& rng) {
    std::vector<double> u(count);
    for (std::size_t s = 0; s < count; ++s)
        u[s] = (static_cast<double>(s) + uniform01(rng)) / static_cast<double>(count);
    shuffle(u, rng);
    return u;
}

// Population indices drawn as consecutive random permutations, so every member is used
// equally often up to one pass.
class PermutedIndex {
public:
    PermutedIndex(std::size_t size, Rng& rng) : order_(size), pos_(size), rng_(&rng) {
        for (std::size_t i = 0; i < size; ++i) order_[i] = i;
    }
    std::size_t operator()() {
        if (pos_ == order_.size()) {
            shuffle(order_, *rng_);
            pos_ = 0;
        }
        return order_[pos_++];
    }

private:
    std::vector<std::size_t> order_;
    std::size_t pos_;
    Rng* rng_;
};

inline double message_error(double llr_nats) {
    if (llr_nats == 0.0) return 0.5;
    return llr_nats < 0.0 ? 1.0 : 0.0;
}

}  // namespace detail

// Population-dynamics density evolution for an arbitrary discrete BMS channel under the
// all-zero word. Each iteration rebuilds the check-to-variable and variable-to-check
// populations from edge-perspective degree draws, exact BP rules and fresh channel LLRs,
// then evaluates tau from node-perspective extrinsic sums.
inline DeTrajectory population_de(const DegreeDistribution& dd, const BmsChannel& ch, int iters,
                                  std::size_t pop_size, std::uint64_t seed) {
    if (pop_size < 1000) throw std::invalid_argument("population_de: population must be at least 1000");
    if (iters < 0) throw std::invalid_argument("population_de: iters must be nonnegative");
    Rng rng(seed);
    const auto table = detail::channel_llr_table(ch);
    const double h_y = channel_stats(ch).output_entropy;
    const detail::DegreeSampler lambda_deg(dd.lambda());
    const detail::DegreeSampler rho_deg(dd.rho());
    const detail::DegreeSampler node_deg(dd.var_node_dist);
    const bool bec = ch.is_bec();

    auto summarize_messages = [&](const std::vector<double>& pop) {
        CompensatedSum acc;
        for (double m : pop) acc.add(bec ? (m == 0.0 ? 1.0 : 0.0) : detail::message_error(m));
        return acc.value() / static_cast<double>(pop.size());
    };

    // Channel symbols and degrees are drawn by stratified inversion and neighbors by
    // permutation; both only reduce sampling variance.
    auto fresh_channel = [&] {
        const auto u = detail::stratified_uniforms(pop_size, rng);
        std::vector<double> out(pop_size);
        for (std::size_t s = 0; s < pop_size; ++s) out[s] = table[inverse_cdf(ch, 0, u[s])];
        return out;
    };
    auto degrees = [&](const detail::DegreeSampler& sampler) {
        const auto u = detail::stratified_uniforms(pop_size, rng);
        std::vector<int> out(pop_size);
        for (std::size_t s = 0; s < pop_size; ++s) out[s] = sampler(u[s]);
        return out;
    };

    std::vector<double> v2c = fresh_channel();
    std::vector<double> c2v(pop_size);
    detail::PermutedIndex pick(pop_size, rng);

    DeTrajectory traj;
    traj.population_size = pop_size;
    traj.points.push_back({0, summarize_messages(v2c), h_y, 0.0, 0.0});

    for (int l = 1; l <= iters; ++l) {
        const auto chk_deg = degrees(rho_deg);
        for (std::size_t s = 0; s < pop_size; ++s) {
            double acc = kLlrSentinelNats;
            for (int k = 1; k < chk_deg[s]; ++k) acc = boxplus(acc, v2c[pick()]);
            c2v[s] = acc;
        }

        CompensatedSum tau_sum;
        CompensatedSum tau_sq;
        const auto node = degrees(node_deg);
        for (std::size_t s = 0; s < pop_size; ++s) {
            double ext = 0.0;
            for (int k = 0; k < node[s]; ++k) ext += c2v[pick()];
            const double t = detail::node_tau(ch, h_y, clamp_llr(ext));
            tau_sum.add(t);
            tau_sq.add(t * t);
        }

        const auto var_deg = degrees(lambda_deg);
        const auto obs = fresh_channel();
        for (std::size_t s = 0; s < pop_size; ++s) {
            double acc = obs[s];
            for (int k = 1; k < var_deg[s]; ++k) acc += c2v[pick()];
            v2c[s] = clamp_llr(acc);
        }

        const double np = static_cast<double>(pop_size);
        const double tau = tau_sum.value() / np;
        const double var = std::max(0.0, (tau_sq.value() - np * tau * tau) / (np - 1.0));
        traj.points.push_back({l, summarize_messages(v2c), h_y - tau, tau, std::sqrt(var / np)});
    }
    return traj;
}

// Asymptotic tau_l predicted from the DE population.
inline TauEstimate de_tau(const DegreeDistribution& dd, const BmsChannel& ch, int l, std::size_t pop_size,
                          std::uint64_t seed) {
    if (l < 0) throw std::invalid_argument("de_tau: l must be nonnegative");
    TauEstimate est;
    est.samples = pop_size;
    if (l == 0) return est;
    const auto traj = population_de(dd, ch, l, pop_size, seed);
    est.tau_hat = traj.points.back().tau;
    est.std_err = traj.points.back().tau_stderr;
    return est;
}

}  // namespace bpbound
