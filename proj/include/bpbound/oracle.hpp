#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bpbound/channels.hpp"
#include "bpbound/ensembles.hpp"
#include "bpbound/errors.hpp"
#include "bpbound/numeric.hpp"

namespace bpbound {

// Maximum |alphabet|^coords * |patterns| work for one exact entropy.
inline constexpr double kEnumerationBudget = 1e8;

// Small code given by its explicit codeword list. Bit j of a codeword is bit j of the
// stored word. An attached graph defines neighborhoods over the transmitted bits.
class ExactCode {
public:
    static constexpr std::size_t kMaxLength = 16;

    ExactCode(std::size_t n, std::vector<std::uint32_t> codewords,
              std::optional<TannerGraph> graph = std::nullopt)
        : n_(n), codewords_(std::move(codewords)), graph_(std::move(graph)) {
        if (n_ == 0 || n_ > kMaxLength)
            throw std::invalid_argument("exact code: block length must lie in [1, 16]");
        if (codewords_.empty()) throw std::invalid_argument("exact code: no codewords");
        const std::uint32_t mask = (1u << n_) - 1u;
        std::vector<std::uint32_t> sorted = codewords_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("exact code: repeated codeword");
        for (auto w : codewords_)
            if (w & ~mask) throw std::invalid_argument("exact code: codeword longer than n");
        if (graph_) {
            if (graph_->num_output_bits() != n_)
                throw std::invalid_argument("exact code: graph does not match block length");
            if (graph_->family() == CodeFamily::ldpc) {
                for (auto w : codewords_)
                    if (!satisfies_checks(*graph_, w))
                        throw std::invalid_argument("exact code: codeword violates a parity check");
            }
        }
    }

    // All codewords of an LDPC graph's parity checks, or the image of an LDGM generator.
    static ExactCode from_graph(const TannerGraph& g) {
        std::vector<std::uint32_t> words;
        if (g.family() == CodeFamily::ldpc) {
            if (g.n() > kMaxLength) throw std::invalid_argument("exact code: graph too long");
            for (std::uint32_t w = 0; w < (1u << g.n()); ++w)
                if (satisfies_checks(g, w)) words.push_back(w);
        } else {
            if (g.m() > kMaxLength || g.n() > 20) throw std::invalid_argument("exact code: graph too long");
            for (std::uint32_t info = 0; info < (1u << g.n()); ++info) {
                std::uint32_t out = 0;
                for (std::size_t c = 0; c < g.m(); ++c) {
                    unsigned parity = 0;
                    for (std::size_t v : g.chk_neighbors(c)) parity ^= (info >> v) & 1u;
                    out |= parity << c;
                }
                words.push_back(out);
            }
            std::sort(words.begin(), words.end());
            if (std::adjacent_find(words.begin(), words.end()) != words.end())
                throw std::invalid_argument("exact code: LDGM generator is not injective");
        }
        return ExactCode(g.num_output_bits(), std::move(words), g);
    }

    std::size_t n() const { return n_; }
    const std::vector<std::uint32_t>& codewords() const { return codewords_; }
    const std::optional<TannerGraph>& graph() const { return graph_; }
    double rate() const { return std::log2(static_cast<double>(codewords_.size())) / static_cast<double>(n_); }

    static bool satisfies_checks(const TannerGraph& g, std::uint32_t word) {
        for (std::size_t c = 0; c < g.m(); ++c) {
            unsigned parity = 0;
            for (std::size_t v : g.chk_neighbors(c)) parity ^= (word >> v) & 1u;
            if (parity) return false;
        }
        return true;
    }

private:
    std::size_t n_;
    std::vector<std::uint32_t> codewords_;
    std::optional<TannerGraph> graph_;
};

namespace detail {

struct JointEntropies {
    double h_y = 0.0;          // H(Y_T)
    double h_x_given_y = 0.0;  // H(X | Y_T), X the codeword
};

// Enumerates every output pattern on the sorted coordinates `coords`. Codewords are
// grouped by their restriction to `coords`; with `want_posterior` the per-codeword
// posterior entropy H(X | Y_T) is accumulated as well (requires the full coordinate set).
inline JointEntropies enumerate_outputs(const ExactCode& code, const BmsChannel& ch,
                                        const std::vector<std::size_t>& coords, bool want_posterior) {
    const std::size_t a = ch.alphabet_size();
    const std::size_t t = coords.size();

    std::map<std::uint32_t, double> pattern_mass;
    const double unit = 1.0 / static_cast<double>(code.codewords().size());
    for (auto w : code.codewords()) {
        std::uint32_t p = 0;
        for (std::size_t j = 0; j < t; ++j) p |= ((w >> coords[j]) & 1u) << j;
        pattern_mass[p] += unit;
    }
    std::vector<std::uint32_t> patterns;
    std::vector<double> prior;
    for (auto [p, mass] : pattern_mass) {
        patterns.push_back(p);
        prior.push_back(mass);
    }
    const std::size_t np = patterns.size();
    if (std::pow(static_cast<double>(a), static_cast<double>(t)) * static_cast<double>(np) > kEnumerationBudget)
        throw BudgetExceeded("exact enumeration exceeds budget of 1e8 terms");

    // weights[level][k]: prior of pattern k times likelihood of the outputs fixed so far.
    std::vector<std::vector<double>> weights(t + 1, std::vector<double>(np));
    weights[0] = prior;
    CompensatedSum h_y;
    CompensatedSum h_post;

    std::vector<std::size_t> symbol(t, 0);
    auto descend = [&](std::size_t lv) {
        const std::size_t y = symbol[lv];
        for (std::size_t k = 0; k < np; ++k) {
            const int x = static_cast<int>((patterns[k] >> lv) & 1u);
            weights[lv + 1][k] = weights[lv][k] * ch.prob(x, y);
        }
    };
    if (t == 0) return {0.0, 0.0};
    for (std::size_t k = 0; k < t; ++k) descend(k);
    for (;;) {
        // Leaf: joint law of (pattern, y_T).
        const auto& leaf = weights[t];
        CompensatedSum py;
        for (double v : leaf) py.add(v);
        const double p = py.value();
        if (p >= kNegligibleProbability) {
            h_y.add(entropy_term(p));
            if (want_posterior) {
                for (double v : leaf)
                    if (v >= kNegligibleProbability) h_post.add(-v * std::log2(v / p));
            }
        }
        // Advance the odometer.
        std::size_t lv = t;
        while (lv > 0) {
            --lv;
            if (++symbol[lv] < a) break;
            symbol[lv] = 0;
            if (lv == 0) return {h_y.value(), h_post.value()};
        }
        for (std::size_t k = lv; k < t; ++k) descend(k);
    }
}

inline double subset_entropy(const ExactCode& code, const BmsChannel& ch, std::vector<std::size_t> coords) {
    std::sort(coords.begin(), coords.end());
    return enumerate_outputs(code, ch, coords, false).h_y;
}

inline std::vector<std::size_t> all_coords(std::size_t n) {
    std::vector<std::size_t> c(n);
    for (std::size_t j = 0; j < n; ++j) c[j] = j;
    return c;
}

}  // namespace detail

// (1/n) H(Y^n) under a uniformly chosen codeword.
inline double exact_joint_output_entropy(const ExactCode& code, const BmsChannel& ch) {
    return detail::subset_entropy(code, ch, detail::all_coords(code.n())) / static_cast<double>(code.n());
}

// H(Y_i | Y_S) = H(Y_{S+i}) - H(Y_S).
inline double exact_conditional_entropy(const ExactCode& code, const BmsChannel& ch, std::size_t i,
                                        const std::vector<std::size_t>& s) {
    if (i >= code.n()) throw std::out_of_range("exact_conditional_entropy: index out of range");
    for (std::size_t j : s) {
        if (j == i) throw std::invalid_argument("exact_conditional_entropy: i must not be in S");
        if (j >= code.n()) throw std::out_of_range("exact_conditional_entropy: index out of range");
    }
    std::vector<std::size_t> with_i = s;
    with_i.push_back(i);
    const double joint = detail::subset_entropy(code, ch, with_i);
    const double cond = detail::subset_entropy(code, ch, s);
    return std::max(0.0, joint - cond);
}

// Exact decrease of H(Y_i) from conditioning on the depth-l neighborhood of bit i.
// H(Y_i) is the code's own marginal output entropy.
inline double exact_tau(const ExactCode& code, const BmsChannel& ch, std::size_t i, int l) {
    if (!code.graph()) throw std::invalid_argument("exact_tau: code has no attached graph");
    if (l == 0) return 0.0;
    const Neighborhood nb = output_neighborhood(*code.graph(), i, l);
    const double h_i = exact_conditional_entropy(code, ch, i, {});
    return std::max(0.0, h_i - exact_conditional_entropy(code, ch, i, nb.members));
}

struct FanoChain {
    double h_x_given_y = 0.0;  // H(X^n|Y^n)/n, from the posterior directly
    double h_y = 0.0;          // H(Y^n)/n
    double h_y_given_x = 0.0;  // H(Y^n|X^n)/n
    double rate = 0.0;         // log2 |C| / n
    // h_x_given_y - (rate - h_y + h_y_given_x)
    double residual() const { return h_x_given_y - (rate - h_y + h_y_given_x); }
};

inline FanoChain exact_fano_chain(const ExactCode& code, const BmsChannel& ch) {
    const double n = static_cast<double>(code.n());
    const auto joint = detail::enumerate_outputs(code, ch, detail::all_coords(code.n()), true);
    FanoChain f;
    f.h_y = joint.h_y / n;
    f.h_x_given_y = joint.h_x_given_y / n;
    f.rate = code.rate();
    const double row_entropy[2] = {entropy_bits(ch.transition(0)), entropy_bits(ch.transition(1))};
    CompensatedSum acc;
    for (auto w : code.codewords())
        for (std::size_t j = 0; j < code.n(); ++j) acc.add(row_entropy[(w >> j) & 1u]);
    f.h_y_given_x = acc.value() / static_cast<double>(code.codewords().size()) / n;
    return f;
}

struct PermutationCheck {
    double lhs = 0.0;      // exact (1/n) H(Y^n)
    double rhs = 0.0;      // mean H(Y_i) - mean tau / (k_max + 1), or per-node form
    double slack = 0.0;    // rhs - lhs
    bool holds = false;    // lhs <= rhs + 1e-9
    double h_y = 0.0;      // node-averaged H(Y_i)
    double tau_bar = 0.0;  // node-averaged exact tau_l
    double k_bar = 0.0;    // node-maximum neighborhood size
    std::vector<double> tau;         // per node
    std::vector<std::size_t> k;      // per node
};

struct PermutationCheckOptions {
    bool per_node = false;     // use each node's own k instead of the maximum
    double rhs_offset = 0.0;   // added to rhs; failure-path test hook
};

// Brute-force check of (1/n) H(Y^n) <= H(Y_i) - tau_l / (k + 1) on a small code.
inline PermutationCheck verify_permutation_bound(const ExactCode& code, const BmsChannel& ch, int l,
                                                 const PermutationCheckOptions& opts = {}) {
    if (!code.graph()) throw std::invalid_argument("verify_permutation_bound: code has no attached graph");
    const std::size_t n = code.n();
    PermutationCheck r;
    r.lhs = exact_joint_output_entropy(code, ch);
    CompensatedSum h_sum, tau_sum, per_node;
    std::size_t k_max = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Neighborhood nb = output_neighborhood(*code.graph(), i, l);
        const double h_i = exact_conditional_entropy(code, ch, i, {});
        const double t = l == 0 ? 0.0 : std::max(0.0, h_i - exact_conditional_entropy(code, ch, i, nb.members));
        r.tau.push_back(t);
        r.k.push_back(nb.size());
        h_sum.add(h_i);
        tau_sum.add(t);
        per_node.add(h_i - t / (static_cast<double>(nb.size()) + 1.0));
        k_max = std::max(k_max, nb.size());
    }
    const double nn = static_cast<double>(n);
    r.h_y = h_sum.value() / nn;
    r.tau_bar = tau_sum.value() / nn;
    r.k_bar = static_cast<double>(k_max);
    r.rhs = opts.per_node ? per_node.value() / nn : r.h_y - r.tau_bar / (r.k_bar + 1.0);
    r.rhs += opts.rhs_offset;
    r.slack = r.rhs - r.lhs;
    r.holds = r.lhs <= r.rhs + 1e-9;
    return r;
}

// Code file: "n K" then K codewords as bit strings, character j being bit j.
inline ExactCode read_exact_code(std::istream& in, std::optional<TannerGraph> graph = std::nullopt) {
    std::size_t n = 0, k = 0;
    if (!(in >> n >> k)) throw ConfigError("code file: missing 'n K' header");
    std::vector<std::uint32_t> words;
    for (std::size_t r = 0; r < k; ++r) {
        std::string bits;
        if (!(in >> bits) || bits.size() != n) throw ConfigError("code file: malformed codeword");
        std::uint32_t w = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (bits[j] != '0' && bits[j] != '1') throw ConfigError("code file: codeword must be a bit string");
            w |= static_cast<std::uint32_t>(bits[j] - '0') << j;
        }
        words.push_back(w);
    }
    try {
        return ExactCode(n, std::move(words), std::move(graph));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("code file: ") + e.what());
    }
}

inline void write_exact_code(std::ostream& out, const ExactCode& code) {
    out << code.n() << ' ' << code.codewords().size() << '\n';
    for (auto w : code.codewords()) {
        for (std::size_t j = 0; j < code.n(); ++j) out << ((w >> j) & 1u);
        out << '\n';
    }
}

}  // namespace bpbound
