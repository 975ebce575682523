#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bpbound/numeric.hpp"
#include "bpbound/rng.hpp"

namespace bpbound {

enum class ChannelKind { bsc, bec, quantized_biawgn };

// Magnitude (log2 units) that stands in for an infinite log-likelihood ratio.
inline constexpr double kLlrSentinel = 1e9;

inline const char* to_string(ChannelKind kind) {
    switch (kind) {
    case ChannelKind::bsc: return "bsc";
    case ChannelKind::bec: return "bec";
    case ChannelKind::quantized_biawgn: return "biawgn";
    }
    return "?";
}

// Binary-input memoryless symmetric channel over a finite output alphabet.
//
// Outputs are ordered so that the symmetry involution is always y -> K-1-y, i.e. the
// row for input 1 is the row for input 0 reversed. Input 0 is the "+1" BPSK symbol.
class BmsChannel {
public:
    static BmsChannel bsc(double crossover) {
        if (!(crossover >= 0.0 && crossover <= 1.0))
            throw std::invalid_argument("bsc: crossover probability must lie in [0, 1]");
        return BmsChannel(ChannelKind::bsc, crossover, 2, {"0", "1"},
                          {1.0 - crossover, crossover});
    }

    static BmsChannel bec(double erasure) {
        if (!(erasure >= 0.0 && erasure <= 1.0))
            throw std::invalid_argument("bec: erasure probability must lie in [0, 1]");
        return BmsChannel(ChannelKind::bec, erasure, 3, {"0", "?", "1"},
                          {1.0 - erasure, erasure, 0.0});
    }

    // K-bin quantization of the BPSK/AWGN channel with noise deviation sigma.
    //
    // Bin edges sit where the posterior Pr(X=0 | y) crosses j/K, j = 1..K-1, which keeps
    // the edges symmetric about 0 and spreads the bins evenly in reliability.
    static BmsChannel quantized_biawgn(double sigma, int bins) {
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            throw std::invalid_argument("biawgn: sigma must be positive and finite");
        if (bins < 2 || bins % 2 != 0)
            throw std::invalid_argument("biawgn: bin count must be even and at least 2");

        const auto k = static_cast<std::size_t>(bins);
        std::vector<double> edges(k - 1);
        for (std::size_t j = 1; j < k; ++j) {
            const double p = static_cast<double>(j) / static_cast<double>(k);
            edges[j - 1] = 0.5 * sigma * sigma * std::log(p / (1.0 - p));
        }
        edges[k / 2 - 1] = 0.0;

        // Gaussian mass of (a, b] around mean +1, evaluated on the side with the smaller
        // tail to keep precision in far bins.
        const double scale = 1.0 / (sigma * std::sqrt(2.0));
        auto lower_cdf = [&](double t) { return 0.5 * std::erfc(-(t - 1.0) * scale); };
        auto upper_cdf = [&](double t) { return 0.5 * std::erfc((t - 1.0) * scale); };
        auto mass = [&](double a, double b) {
            if (a >= 1.0) return upper_cdf(a) - upper_cdf(b);
            if (b <= 1.0) return lower_cdf(b) - lower_cdf(a);
            return 1.0 - lower_cdf(a) - upper_cdf(b);
        };

        std::vector<double> row0(k);
        const double inf = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
            const double a = j == 0 ? -inf : edges[j - 1];
            const double b = j + 1 == k ? inf : edges[j];
            row0[j] = std::max(0.0, mass(a, b));
        }
        CompensatedSum total;
        for (double p : row0) total.add(p);
        for (double& p : row0) p /= total.value();

        std::vector<std::string> labels(k);
        for (std::size_t j = 0; j < k; ++j) labels[j] = "b" + std::to_string(j);
        BmsChannel ch(ChannelKind::quantized_biawgn, sigma, bins, std::move(labels),
                      std::move(row0));
        ch.edges_ = std::move(edges);
        return ch;
    }

    ChannelKind kind() const { return kind_; }
    double param() const { return param_; }
    int bins() const { return bins_; }
    std::size_t alphabet_size() const { return labels_.size(); }
    const std::vector<std::string>& output_alphabet() const { return labels_; }
    // Interior bin edges of a quantized channel (empty otherwise).
    const std::vector<double>& bin_edges() const { return edges_; }

    std::span<const double> transition(int x) const {
        const std::size_t k = alphabet_size();
        return {rows_.data() + (x == 0 ? 0 : k), k};
    }
    double prob(int x, std::size_t y) const { return transition(x)[y]; }

    // Running sums of transition(x), used for inverse-CDF sampling.
    std::span<const double> cumulative(int x) const {
        const std::size_t k = alphabet_size();
        return {cumulative_.data() + (x == 0 ? 0 : k), k};
    }

    std::size_t mirror(std::size_t y) const { return alphabet_size() - 1 - y; }

    bool is_bec() const { return kind_ == ChannelKind::bec; }

    // Symbol index of the BEC erasure.
    static constexpr std::size_t kErasure = 1;

    std::string describe() const {
        std::string s = std::string(to_string(kind_)) + "(" + std::to_string(param_);
        if (kind_ == ChannelKind::quantized_biawgn) s += ", K=" + std::to_string(bins_);
        return s + ")";
    }

private:
    BmsChannel(ChannelKind kind, double param, int bins, std::vector<std::string> labels,
               std::vector<double> row0)
        : kind_(kind), param_(param), bins_(bins), labels_(std::move(labels)) {
        const std::size_t k = row0.size();
        rows_.resize(2 * k);
        for (std::size_t y = 0; y < k; ++y) {
            rows_[y] = row0[y];
            rows_[k + y] = row0[k - 1 - y];
        }
        cumulative_.resize(2 * k);
        for (int x = 0; x < 2; ++x) {
            double acc = 0.0;
            for (std::size_t y = 0; y < k; ++y) {
                acc += rows_[x * k + y];
                cumulative_[x * k + y] = acc;
            }
        }
    }

    ChannelKind kind_;
    double param_;
    int bins_;
    std::vector<std::string> labels_;
    std::vector<double> rows_;
    std::vector<double> cumulative_;
    std::vector<double> edges_;
};

// Equivalent to BmsChannel::quantized_biawgn.
inline BmsChannel quantize_biawgn(double sigma, int bins) {
    return BmsChannel::quantized_biawgn(sigma, bins);
}

struct ChannelStats {
    double capacity = 0.0;             // bits per channel use
    double output_entropy = 0.0;       // H(Y) under uniform input
    double cond_output_entropy = 0.0;  // H(Y|X)
};

inline ChannelStats channel_stats(const BmsChannel& ch) {
    const std::size_t k = ch.alphabet_size();
    std::vector<double> marginal(k);
    for (std::size_t y = 0; y < k; ++y) marginal[y] = 0.5 * (ch.prob(0, y) + ch.prob(1, y));

    ChannelStats s;
    s.output_entropy = entropy_bits(marginal);
    s.cond_output_entropy = 0.5 * (entropy_bits(ch.transition(0)) + entropy_bits(ch.transition(1)));

    // I(X;Y) summed directly from the transition table.
    CompensatedSum info;
    for (int x = 0; x < 2; ++x) {
        for (std::size_t y = 0; y < k; ++y) {
            const double p = ch.prob(x, y);
            if (p < kNegligibleProbability) continue;
            info.add(0.5 * p * std::log2(p / marginal[y]));
        }
    }
    s.capacity = std::clamp(info.value(), 0.0, 1.0);
    return s;
}

// Output symbol whose cumulative interval under input x contains u in [0, 1).
inline std::size_t inverse_cdf(const BmsChannel& ch, int x, double u) {
    const std::size_t k = ch.alphabet_size();
    const auto cdf = ch.cumulative(x);
    for (std::size_t y = 0; y + 1 < k; ++y) {
        if (u < cdf[y] && ch.prob(x, y) > 0.0) return y;
    }
    // Last symbol with positive mass absorbs rounding in the cumulative row.
    for (std::size_t y = k; y-- > 0;)
        if (ch.prob(x, y) > 0.0) return y;
    return k - 1;
}

template <class R>
std::size_t sample_output(const BmsChannel& ch, int x, R& rng) {
    return inverse_cdf(ch, x, uniform01(rng));
}

// log2 P(y|0)/P(y|1), saturated at +-kLlrSentinel. Symbols impossible under both inputs
// carry no information and map to 0.
inline double llr(const BmsChannel& ch, std::size_t y) {
    const double p0 = ch.prob(0, y);
    const double p1 = ch.prob(1, y);
    if (p0 <= 0.0 && p1 <= 0.0) return 0.0;
    if (p1 <= 0.0) return kLlrSentinel;
    if (p0 <= 0.0) return -kLlrSentinel;
    return std::clamp(std::log2(p0 / p1), -kLlrSentinel, kLlrSentinel);
}

// Entropy of the output law q*P(.|0) + (1-q)*P(.|1), i.e. H(Y_i) given Pr(X_i=0) = q.
inline double mixture_entropy(const BmsChannel& ch, double q) {
    const std::size_t k = ch.alphabet_size();
    CompensatedSum acc;
    for (std::size_t y = 0; y < k; ++y)
        acc.add(entropy_term(q * ch.prob(0, y) + (1.0 - q) * ch.prob(1, y)));
    return acc.value();
}

}  // namespace bpbound
