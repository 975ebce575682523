#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bpbound/channels.hpp"
#include "bpbound/ensembles.hpp"
#include "bpbound/numeric.hpp"
#include "bpbound/parallel.hpp"
#include "bpbound/rng.hpp"

namespace bpbound {

// Decoder messages are natural-log LLRs; the saturation point matches kLlrSentinel bits.
inline constexpr double kLlrSentinelNats = kLlrSentinel * std::numbers::ln2;

inline double clamp_llr(double x) { return std::clamp(x, -kLlrSentinelNats, kLlrSentinelNats); }

// Check-node combination of two LLRs, 2 atanh(tanh(a/2) tanh(b/2)), in the
// overflow-free min-plus-correction form.
inline double boxplus(double a, double b) {
    const double sign = ((a < 0.0) != (b < 0.0)) ? -1.0 : 1.0;
    const double r = sign * std::min(std::abs(a), std::abs(b)) +
                     std::log1p(std::exp(-std::abs(a + b))) -
                     std::log1p(std::exp(-std::abs(a - b)));
    return clamp_llr(r);
}

// Flooding sum-product decoder state for one Tanner graph.
//
// LDPC: channel LLRs live on variable nodes. LDGM: channel LLRs live on check nodes
// (generator outputs) and variables are information bits with no observation.
class BeliefPropagation {
public:
    explicit BeliefPropagation(const TannerGraph& g) : g_(&g) {
        const std::size_t n = g.n();
        const std::size_t m = g.m();
        var_begin_.assign(n + 1, 0);
        for (std::size_t v = 0; v < n; ++v) var_begin_[v + 1] = var_begin_[v] + g.var_neighbors(v).size();
        edge_var_.resize(g.num_edges());
        chk_begin_.assign(m + 1, 0);
        for (std::size_t c = 0; c < m; ++c) chk_begin_[c + 1] = chk_begin_[c] + g.chk_neighbors(c).size();
        chk_edges_.resize(g.num_edges());
        std::vector<std::size_t> fill(chk_begin_.begin(), chk_begin_.end() - 1);
        for (std::size_t v = 0; v < n; ++v) {
            const auto& nb = g.var_neighbors(v);
            for (std::size_t k = 0; k < nb.size(); ++k) {
                const std::size_t e = var_begin_[v] + k;
                edge_var_[e] = v;
                chk_edges_[fill[nb[k]]++] = e;
            }
        }
        v2c_.assign(g.num_edges(), 0.0);
        c2v_.assign(g.num_edges(), 0.0);
        app_.assign(n, 0.0);
    }

    // Loads channel LLRs (nats), one per transmitted bit, and clears all messages.
    void reset(std::span<const double> channel_llr) {
        if (channel_llr.size() != g_->num_output_bits())
            throw std::invalid_argument("bp: channel LLR count does not match transmitted bits");
        channel_.assign(channel_llr.begin(), channel_llr.end());
        std::fill(c2v_.begin(), c2v_.end(), 0.0);
        iteration_ = 0;
        const bool ldpc = g_->family() == CodeFamily::ldpc;
        for (std::size_t e = 0; e < v2c_.size(); ++e) v2c_[e] = ldpc ? channel_[edge_var_[e]] : 0.0;
        for (std::size_t v = 0; v < app_.size(); ++v) app_[v] = ldpc ? channel_[v] : 0.0;
    }

    void iterate() {
        const bool ldpc = g_->family() == CodeFamily::ldpc;
        for (std::size_t c = 0; c < g_->m(); ++c) {
            const double prior = ldpc ? kLlrSentinelNats : channel_[c];
            update_check(c, prior);
        }
        for (std::size_t v = 0; v < g_->n(); ++v) {
            double total = ldpc ? channel_[v] : 0.0;
            for (std::size_t e = var_begin_[v]; e < var_begin_[v + 1]; ++e) total += c2v_[e];
            for (std::size_t e = var_begin_[v]; e < var_begin_[v + 1]; ++e)
                v2c_[e] = clamp_llr(total - c2v_[e]);
            app_[v] = clamp_llr(total);
        }
        ++iteration_;
    }

    int iteration() const { return iteration_; }

    // A-posteriori LLR of variable v (code bit for LDPC, information bit for LDGM).
    double app(std::size_t v) const { return app_[v]; }

    // LLR about transmitted bit `bit` from everything except its own channel output.
    double extrinsic(std::size_t bit) const {
        if (g_->family() == CodeFamily::ldpc) {
            double sum = 0.0;
            for (std::size_t e = var_begin_[bit]; e < var_begin_[bit + 1]; ++e) sum += c2v_[e];
            return clamp_llr(sum);
        }
        double acc = kLlrSentinelNats;
        for (std::size_t k = chk_begin_[bit]; k < chk_begin_[bit + 1]; ++k)
            acc = boxplus(acc, v2c_[chk_edges_[k]]);
        return acc;
    }

private:
    void update_check(std::size_t c, double prior) {
        const std::size_t begin = chk_begin_[c];
        const std::size_t d = chk_begin_[c + 1] - begin;
        if (d == 0) return;
        fwd_.resize(d + 1);
        bwd_.resize(d + 1);
        // fwd_[j] combines prior and inputs [0, j); bwd_[j] combines inputs [j, d).
        fwd_[0] = prior;
        for (std::size_t j = 0; j < d; ++j) fwd_[j + 1] = boxplus(fwd_[j], v2c_[chk_edges_[begin + j]]);
        bwd_[d] = kLlrSentinelNats;
        for (std::size_t j = d; j-- > 0;) bwd_[j] = boxplus(bwd_[j + 1], v2c_[chk_edges_[begin + j]]);
        for (std::size_t j = 0; j < d; ++j) c2v_[chk_edges_[begin + j]] = boxplus(fwd_[j], bwd_[j + 1]);
    }

    const TannerGraph* g_;
    std::vector<std::size_t> var_begin_;
    std::vector<std::size_t> edge_var_;
    std::vector<std::size_t> chk_begin_;
    std::vector<std::size_t> chk_edges_;
    std::vector<double> channel_;
    std::vector<double> v2c_;
    std::vector<double> c2v_;
    std::vector<double> app_;
    std::vector<double> fwd_;
    std::vector<double> bwd_;
    int iteration_ = 0;
};

// (alpha + beta) * l / R operations per information bit.
inline double ops_per_info_bit(double alpha, double beta, int l, double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("ops_per_info_bit: rate must be positive");
    if (l < 0) throw std::invalid_argument("ops_per_info_bit: l must be nonnegative");
    return (alpha + beta) * static_cast<double>(l) / rate;
}

inline double ops_per_info_bit(const DegreeDistribution& dd, int l, double rate) {
    return ops_per_info_bit(dd.alpha, dd.beta, l, rate);
}

struct IterationRecord {
    int l = 0;
    double pe = 0.0;               // bit-error rate, ties count one half
    double tau_hat = 0.0;          // bits
    double tau_stderr = 0.0;       // bits
    double ops_total = 0.0;        // n (alpha + beta) l
    double ops_per_info_bit = 0.0; // (alpha + beta) l / R
    std::uint64_t message_count = 0;  // 2 |E| l
};

struct DecodeTrace {
    double alpha = 0.0;
    double beta = 0.0;
    double rate = 0.0;
    std::vector<IterationRecord> iterations;  // l = 0 .. max_iter
};

struct DecodeResult {
    DecodeTrace trace;
    std::vector<std::uint8_t> decisions;
};

namespace detail {

inline double tie_aware_error(double llr, std::uint8_t truth) {
    if (llr == 0.0) return 0.5;
    const std::uint8_t decided = llr < 0.0 ? 1 : 0;
    return decided == truth ? 0.0 : 1.0;
}

struct NodeTau {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// Entropy decrease H(Y) - H(q P(.|0) + (1-q) P(.|1)) at the extrinsic posterior q.
inline double node_tau(const BmsChannel& ch, double output_entropy, double extrinsic_llr) {
    return output_entropy - mixture_entropy(ch, posterior_zero(extrinsic_llr));
}

inline NodeTau mean_tau(const BeliefPropagation& bp, const BmsChannel& ch, double output_entropy,
                        std::size_t bits) {
    CompensatedSum sum;
    CompensatedSum sq;
    for (std::size_t b = 0; b < bits; ++b) {
        const double t = node_tau(ch, output_entropy, bp.extrinsic(b));
        sum.add(t);
        sq.add(t * t);
    }
    const double nb = static_cast<double>(bits);
    const double mean = sum.value() / nb;
    const double var = bits > 1 ? std::max(0.0, (sq.value() - nb * mean * mean) / (nb - 1.0)) : 0.0;
    return {mean, std::sqrt(var / nb)};
}

inline std::vector<double> channel_llr_table(const BmsChannel& ch) {
    std::vector<double> table(ch.alphabet_size());
    for (std::size_t y = 0; y < table.size(); ++y) table[y] = llr(ch, y) * std::numbers::ln2;
    return table;
}

inline double graph_rate(const TannerGraph& g) {
    const double n = static_cast<double>(g.n());
    const double m = static_cast<double>(g.m());
    return g.family() == CodeFamily::ldpc ? 1.0 - m / n : n / m;
}

}  // namespace detail

// Flooding sum-product decoding of `received` (channel symbol indices, one per transmitted
// bit) for max_iter iterations, recording the trace at every l = 0..max_iter.
//
// `reference` holds the true decision bits (codeword for LDPC, information word for
// LDGM); empty means all-zero.
inline DecodeResult bp_decode(const TannerGraph& g, const BmsChannel& ch,
                              std::span<const std::size_t> received, int max_iter,
                              std::span<const std::uint8_t> reference = {}) {
    if (received.size() != g.num_output_bits())
        throw std::invalid_argument("bp_decode: received length does not match the code");
    if (max_iter < 1) throw std::invalid_argument("bp_decode: max_iter must be at least 1");
    if (!reference.empty() && reference.size() != g.n())
        throw std::invalid_argument("bp_decode: reference length does not match the code");

    const auto table = detail::channel_llr_table(ch);
    std::vector<double> llrs(received.size());
    for (std::size_t j = 0; j < received.size(); ++j) {
        if (received[j] >= table.size()) throw std::invalid_argument("bp_decode: symbol outside alphabet");
        llrs[j] = table[received[j]];
    }

    const double h_y = channel_stats(ch).output_entropy;
    DecodeResult result;
    DecodeTrace& trace = result.trace;
    trace.alpha = g.average_var_degree();
    trace.beta = g.average_chk_degree();
    trace.rate = detail::graph_rate(g);

    BeliefPropagation bp(g);
    bp.reset(llrs);
    auto record = [&] {
        IterationRecord r;
        r.l = bp.iteration();
        CompensatedSum errors;
        for (std::size_t v = 0; v < g.n(); ++v)
            errors.add(detail::tie_aware_error(bp.app(v), reference.empty() ? 0 : reference[v]));
        r.pe = errors.value() / static_cast<double>(g.n());
        const auto tau = detail::mean_tau(bp, ch, h_y, g.num_output_bits());
        r.tau_hat = tau.mean;
        r.tau_stderr = tau.stderr_;
        r.ops_total = static_cast<double>(g.n()) * (trace.alpha + trace.beta) * r.l;
        r.ops_per_info_bit = trace.rate > 0.0 ? ops_per_info_bit(trace.alpha, trace.beta, r.l, trace.rate)
                                              : std::nan("");
        r.message_count = 2 * static_cast<std::uint64_t>(g.num_edges()) * static_cast<std::uint64_t>(r.l);
        trace.iterations.push_back(r);
    };
    record();
    for (int l = 1; l <= max_iter; ++l) {
        bp.iterate();
        record();
    }
    result.decisions.resize(g.n());
    for (std::size_t v = 0; v < g.n(); ++v) result.decisions[v] = bp.app(v) < 0.0 ? 1 : 0;
    return result;
}

// All-zero transmission over a memoryless channel: one output symbol per bit.
inline std::vector<std::size_t> transmit_zero(const BmsChannel& ch, std::size_t bits, Rng& rng) {
    std::vector<std::size_t> out(bits);
    for (auto& y : out) y = sample_output(ch, 0, rng);
    return out;
}

struct TauEstimate {
    double tau_hat = 0.0;
    double std_err = 0.0;
    double p10 = 0.0;            // 10th percentile of per-node decreases
    double tree_fraction = 1.0;  // sampled nodes whose depth-l computation graph is a tree
    std::size_t samples = 0;     // node samples pooled
};

struct TauOptions {
    unsigned threads = 1;
    CodeFamily family = CodeFamily::ldpc;
    std::optional<std::size_t> center;  // restrict to one transmitted bit
};

namespace detail {

struct TauTrial {
    std::vector<double> values;
    std::size_t tree_nodes = 0;
};

inline TauTrial tau_trial(const TannerGraph& g, const BmsChannel& ch, double h_y, int l,
                          std::span<const double> table, Rng& noise, std::optional<std::size_t> center) {
    const auto received = transmit_zero(ch, g.num_output_bits(), noise);
    std::vector<double> llrs(received.size());
    for (std::size_t j = 0; j < received.size(); ++j) llrs[j] = table[received[j]];
    BeliefPropagation bp(g);
    bp.reset(llrs);
    for (int k = 0; k < l; ++k) bp.iterate();

    TauTrial out;
    auto visit = [&](std::size_t b) {
        out.values.push_back(node_tau(ch, h_y, bp.extrinsic(b)));
    };
    if (center) {
        visit(*center);
    } else {
        out.values.reserve(g.num_output_bits());
        for (std::size_t b = 0; b < g.num_output_bits(); ++b) visit(b);
    }
    return out;
}

inline TauEstimate summarize_tau(const std::vector<TauTrial>& trials, std::size_t tree_nodes,
                                 std::size_t profiled_nodes) {
    TauEstimate est;
    std::vector<double> pooled;
    std::vector<double> trial_means;
    for (const auto& t : trials) {
        CompensatedSum s;
        for (double v : t.values) s.add(v);
        trial_means.push_back(s.value() / static_cast<double>(t.values.size()));
        pooled.insert(pooled.end(), t.values.begin(), t.values.end());
    }
    CompensatedSum total;
    for (double v : trial_means) total.add(v);
    const double k = static_cast<double>(trial_means.size());
    est.tau_hat = total.value() / k;

    // Trials are independent; nodes within a trial are not, so the error is taken across
    // trials whenever there are at least two.
    const std::vector<double>& basis = trial_means.size() > 1 ? trial_means : pooled;
    const double nb = static_cast<double>(basis.size());
    CompensatedSum mean_acc;
    for (double v : basis) mean_acc.add(v);
    const double mean = mean_acc.value() / nb;
    CompensatedSum dev;
    for (double v : basis) dev.add((v - mean) * (v - mean));
    est.std_err = basis.size() > 1 ? std::sqrt(dev.value() / (nb - 1.0) / nb) : 0.0;

    est.samples = pooled.size();
    const std::size_t idx = static_cast<std::size_t>(0.1 * static_cast<double>(pooled.size() - 1));
    std::nth_element(pooled.begin(), pooled.begin() + static_cast<std::ptrdiff_t>(idx), pooled.end());
    est.p10 = pooled[idx];
    est.tree_fraction = profiled_nodes == 0 ? 1.0
                                            : static_cast<double>(tree_nodes) / static_cast<double>(profiled_nodes);
    return est;
}

inline std::size_t count_tree_like(const TannerGraph& g, int l, std::optional<std::size_t> center,
                                   std::size_t& profiled) {
    std::size_t tree = 0;
    auto visit = [&](std::size_t b) {
        ++profiled;
        if (output_neighborhood_profile(g, b, l).tree_like[static_cast<std::size_t>(l)]) ++tree;
    };
    if (center) {
        visit(*center);
    } else {
        for (std::size_t b = 0; b < g.num_output_bits(); ++b) visit(b);
    }
    return tree;
}

}  // namespace detail

// Monte-Carlo estimate of the decoding success tau_l = H(Y_i) - E H(Y_i | Y_~i^(l)) on a
// fixed graph. Each trial draws fresh channel noise for the all-zero word, runs l BP
// iterations and evaluates the output-mixture entropy at each node's extrinsic posterior.
inline TauEstimate estimate_tau(const TannerGraph& g, const BmsChannel& ch, int l, std::size_t trials,
                                std::uint64_t seed, const TauOptions& opts = {}) {
    if (trials < 1) throw std::invalid_argument("estimate_tau: trials must be at least 1");
    if (l < 0) throw std::invalid_argument("estimate_tau: l must be nonnegative");
    if (opts.center && *opts.center >= g.num_output_bits())
        throw std::out_of_range("estimate_tau: center out of range");
    const double h_y = channel_stats(ch).output_entropy;
    if (!(h_y > 0.0)) throw std::invalid_argument("estimate_tau: channel output entropy is zero");
    const auto table = detail::channel_llr_table(ch);

    std::vector<detail::TauTrial> results(trials);
    parallel_for(trials, opts.threads, [&](std::size_t t) {
        Rng noise(derive_seed(seed, t));
        results[t] = detail::tau_trial(g, ch, h_y, l, table, noise, opts.center);
    });
    std::size_t profiled = 0;
    const std::size_t tree = detail::count_tree_like(g, l, opts.center, profiled);
    return detail::summarize_tau(results, tree, profiled);
}

// Ensemble version: every trial samples its own graph of n variable nodes.
inline TauEstimate estimate_tau(const DegreeDistribution& dd, const BmsChannel& ch, std::size_t n, int l,
                                std::size_t trials, std::uint64_t seed, const TauOptions& opts = {}) {
    if (trials < 1) throw std::invalid_argument("estimate_tau: trials must be at least 1");
    if (l < 0) throw std::invalid_argument("estimate_tau: l must be nonnegative");
    const double h_y = channel_stats(ch).output_entropy;
    if (!(h_y > 0.0)) throw std::invalid_argument("estimate_tau: channel output entropy is zero");
    const auto table = detail::channel_llr_table(ch);

    std::vector<detail::TauTrial> results(trials);
    std::vector<std::size_t> tree(trials, 0);
    std::vector<std::size_t> profiled(trials, 0);
    parallel_for(trials, opts.threads, [&](std::size_t t) {
        Rng graph_rng(derive_seed(seed, 2 * t));
        Rng noise(derive_seed(seed, 2 * t + 1));
        const TannerGraph g = sample_graph(dd, n, opts.family, graph_rng);
        if (opts.center && *opts.center >= g.num_output_bits())
            throw std::out_of_range("estimate_tau: center out of range");
        results[t] = detail::tau_trial(g, ch, h_y, l, table, noise, opts.center);
        tree[t] = detail::count_tree_like(g, l, opts.center, profiled[t]);
    });
    std::size_t tree_total = 0, profiled_total = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        tree_total += tree[t];
        profiled_total += profiled[t];
    }
    return detail::summarize_tau(results, tree_total, profiled_total);
}

}  // namespace bpbound
