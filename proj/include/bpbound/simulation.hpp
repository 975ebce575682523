#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bpbound/channels.hpp"
#include "bpbound/decoder.hpp"
#include "bpbound/ensembles.hpp"
#include "bpbound/numeric.hpp"
#include "bpbound/parallel.hpp"
#include "bpbound/rng.hpp"

namespace bpbound {

struct SimulationConfig {
    DegreeDistribution ensemble;
    BmsChannel channel;
    std::size_t n = 0;
    int iterations = 1;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    CodeFamily family = CodeFamily::ldpc;
    std::size_t profile_nodes = 16;  // neighborhoods measured per trial
};

// Per-iteration neighborhood statistics over the profiled nodes of every trial.
struct NeighborhoodStats {
    std::vector<double> k_mean;
    std::vector<std::size_t> k_max;
    std::vector<double> tree_fraction;
};

struct SimulationResult {
    DecodeTrace trace;
    NeighborhoodStats neighborhoods;
    ChannelStats channel;
    std::size_t graph_retries = 0;
};

namespace detail {

struct TrialOutcome {
    std::vector<double> pe;
    std::vector<double> tau;
    std::vector<double> tau_node_stderr;
    std::vector<std::size_t> k_sum;
    std::vector<std::size_t> k_max;
    std::vector<std::size_t> tree;
    std::size_t profiled = 0;
    std::size_t retries = 0;
};

inline TannerGraph sample_with_retries(const DegreeDistribution& dd, std::size_t n, CodeFamily family,
                                       std::uint64_t seed, std::size_t& retries) {
    constexpr std::size_t kMaxReseeds = 16;
    for (std::size_t attempt = 0;; ++attempt) {
        Rng rng(derive_seed(seed, attempt));
        try {
            return sample_graph(dd, n, family, rng);
        } catch (const GraphConstructionError&) {
            if (attempt + 1 >= kMaxReseeds) throw;
            ++retries;
        }
    }
}

}  // namespace detail

// Monte-Carlo BP over independently sampled graphs, all-zero transmission. Trial t uses
// streams derived from (seed, t) only and outcomes are reduced in trial order, so the
// result does not depend on the worker count.
inline SimulationResult simulate(const SimulationConfig& cfg) {
    if (cfg.iterations < 1) throw std::invalid_argument("simulate: iterations must be at least 1");
    if (cfg.trials < 1) throw std::invalid_argument("simulate: trials must be at least 1");
    const double rate = code_rate(cfg.ensemble, cfg.family);
    if (!(rate > 0.0)) throw std::invalid_argument("simulate: ensemble has nonpositive rate");

    SimulationResult result;
    result.channel = channel_stats(cfg.channel);
    const double h_y = result.channel.output_entropy;
    const auto table = detail::channel_llr_table(cfg.channel);
    const auto L = static_cast<std::size_t>(cfg.iterations);

    std::vector<detail::TrialOutcome> outcomes(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
        detail::TrialOutcome& out = outcomes[t];
        const std::uint64_t trial_seed = derive_seed(cfg.seed, t);
        const TannerGraph g = detail::sample_with_retries(cfg.ensemble, cfg.n, cfg.family,
                                                          derive_seed(trial_seed, 0), out.retries);
        Rng noise(derive_seed(trial_seed, 1));
        Rng pick(derive_seed(trial_seed, 2));

        const auto received = transmit_zero(cfg.channel, g.num_output_bits(), noise);
        std::vector<double> llrs(received.size());
        for (std::size_t j = 0; j < received.size(); ++j) llrs[j] = table[received[j]];
        BeliefPropagation bp(g);
        bp.reset(llrs);

        out.pe.resize(L + 1);
        out.tau.resize(L + 1);
        out.tau_node_stderr.resize(L + 1);
        for (std::size_t l = 0; l <= L; ++l) {
            if (l > 0) bp.iterate();
            CompensatedSum errors;
            for (std::size_t v = 0; v < g.n(); ++v) errors.add(detail::tie_aware_error(bp.app(v), 0));
            out.pe[l] = errors.value() / static_cast<double>(g.n());
            const auto tau = detail::mean_tau(bp, cfg.channel, h_y, g.num_output_bits());
            out.tau[l] = tau.mean;
            out.tau_node_stderr[l] = tau.stderr_;
        }

        out.k_sum.assign(L + 1, 0);
        out.k_max.assign(L + 1, 0);
        out.tree.assign(L + 1, 0);
        const std::size_t bits = g.num_output_bits();
        const std::size_t samples = std::min(cfg.profile_nodes, bits);
        for (std::size_t s = 0; s < samples; ++s) {
            const auto b = static_cast<std::size_t>(uniform_below(pick, bits));
            const auto prof = output_neighborhood_profile(g, b, cfg.iterations);
            for (std::size_t l = 0; l <= L; ++l) {
                out.k_sum[l] += prof.sizes[l];
                out.k_max[l] = std::max(out.k_max[l], prof.sizes[l]);
                out.tree[l] += prof.tree_like[l] ? 1 : 0;
            }
        }
        out.profiled = samples;
    });

    DecodeTrace& trace = result.trace;
    trace.alpha = cfg.ensemble.alpha;
    trace.beta = cfg.ensemble.beta;
    trace.rate = rate;
    auto& nbs = result.neighborhoods;
    nbs.k_mean.assign(L + 1, 0.0);
    nbs.k_max.assign(L + 1, 0);
    nbs.tree_fraction.assign(L + 1, 0.0);
    std::size_t profiled = 0;
    for (const auto& o : outcomes) {
        profiled += o.profiled;
        result.graph_retries += o.retries;
    }

    const double trials = static_cast<double>(cfg.trials);
    const auto edges = static_cast<std::uint64_t>(std::llround(static_cast<double>(cfg.n) * cfg.ensemble.alpha));
    for (std::size_t l = 0; l <= L; ++l) {
        CompensatedSum pe, tau, tau_sq;
        std::size_t k_sum = 0, tree = 0;
        for (const auto& o : outcomes) {
            pe.add(o.pe[l]);
            tau.add(o.tau[l]);
            tau_sq.add(o.tau[l] * o.tau[l]);
            k_sum += o.k_sum[l];
            tree += o.tree[l];
            nbs.k_max[l] = std::max(nbs.k_max[l], o.k_max[l]);
        }
        IterationRecord r;
        r.l = static_cast<int>(l);
        r.pe = pe.value() / trials;
        r.tau_hat = tau.value() / trials;
        if (cfg.trials > 1) {
            const double var = std::max(0.0, (tau_sq.value() - trials * r.tau_hat * r.tau_hat) / (trials - 1.0));
            r.tau_stderr = std::sqrt(var / trials);
        } else {
            r.tau_stderr = outcomes.front().tau_node_stderr[l];
        }
        r.ops_total = static_cast<double>(cfg.n) * (trace.alpha + trace.beta) * static_cast<double>(l);
        r.ops_per_info_bit = ops_per_info_bit(trace.alpha, trace.beta, r.l, rate);
        r.message_count = 2 * edges * static_cast<std::uint64_t>(l);
        trace.iterations.push_back(r);

        nbs.k_mean[l] = profiled ? static_cast<double>(k_sum) / static_cast<double>(profiled) : 0.0;
        nbs.tree_fraction[l] = profiled ? static_cast<double>(tree) / static_cast<double>(profiled) : 1.0;
    }
    return result;
}

}  // namespace bpbound
