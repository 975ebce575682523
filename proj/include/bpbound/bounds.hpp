#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bpbound/numeric.hpp"

namespace bpbound {

// Quantities the bound chain consumes. All entropies in bits.
struct BoundInputs {
    double capacity = 0.0;        // C
    double output_entropy = 1.0;  // H(Y_i)
    double tau = 0.0;             // decoding success, tau_l or tau^(c)
    double k = 1.0;               // neighborhood size used in the permutation fraction 1/k
    double rate = 0.0;            // R
    double ops_per_bit = 0.0;     // c
    double gap() const { return capacity - rate; }  // eps = C - R
};

namespace detail {

inline void check_tau_k(double h_y, double tau, double k) {
    if (!(k >= 1.0)) throw std::invalid_argument("bound: neighborhood size k must be at least 1");
    if (!(tau >= 0.0)) throw std::invalid_argument("bound: tau must be nonnegative");
    if (tau > h_y) throw std::invalid_argument("bound: tau exceeds H(Y_i)");
}

}  // namespace detail

// Upper bound on H(Y^n)/n from averaging the chain rule over all orderings of the
// outputs: the neighborhood precedes bit i in a 1/k fraction of them.
inline double permutation_entropy_bound(double h_y, double tau, double k) {
    detail::check_tau_k(h_y, tau, k);
    return h_y - tau / k;
}

// Minimum of the permutation bound over every iteration with known performance.
inline double tightened_entropy_bound(double h_y, std::span<const std::pair<double, double>> schedule) {
    if (schedule.empty()) throw std::invalid_argument("tightened_entropy_bound: empty schedule");
    double best = std::numeric_limits<double>::infinity();
    for (auto [tau, k] : schedule) best = std::min(best, permutation_entropy_bound(h_y, tau, k));
    return best;
}

struct RateBound {
    double raw = 0.0;      // C - tau/k, may be negative
    double clamped = 0.0;  // raw restricted to [0, 1] for display
};

inline RateBound achievable_rate_bound(double capacity, double tau, double k) {
    if (!(k >= 1.0)) throw std::invalid_argument("achievable_rate_bound: k must be at least 1");
    if (!(tau >= 0.0)) throw std::invalid_argument("achievable_rate_bound: tau must be nonnegative");
    const double raw = capacity - tau / k;
    return {raw, std::clamp(raw, 0.0, 1.0)};
}

// Inverse of the binary entropy on [0, 1/2], by bisection to 1e-12.
inline double inverse_binary_entropy(double h) {
    if (h <= 0.0) return 0.0;
    if (h >= 1.0) return 0.5;
    double lo = 0.0;
    double hi = 0.5;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (binary_entropy(mid) < h)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Smallest P_e consistent with Fano's inequality H(P_e) >= R + tau/k - C.
// Zero exactly when R does not exceed achievable_rate_bound(C, tau, k).raw.
inline double fano_pe_lower_bound(double rate, double capacity, double tau, double k) {
    const double delta = rate - achievable_rate_bound(capacity, tau, k).raw;
    if (delta <= 0.0) return 0.0;
    if (delta >= 1.0) return 0.5;
    return inverse_binary_entropy(delta);
}

// Values above 2^1000 are only carried in the log domain.
inline constexpr double kLinearLog2Limit = 1000.0;

struct KBound {
    double log2_value = 0.0;
    std::optional<double> linear;  // empty when above 2^kLinearLog2Limit
    int argmax_l = 1;
};

// k_bd(c) = sup over integers l >= 1 of (c/l)^(2l+2), evaluated as (2l+2) log2(c/l).
//
// Terms with l > c are below 1 while the l = 1 term is c^4 >= 1 for c >= 1, and for c < 1
// every term decreases in l, so l in [1, ceil(c)+1] covers the supremum.
inline KBound k_bd(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("k_bd: c must be positive and finite");
    const int last = static_cast<int>(std::ceil(c)) + 1;
    KBound best{-std::numeric_limits<double>::infinity(), std::nullopt, 1};
    for (int l = 1; l <= last; ++l) {
        const double term = (2.0 * l + 2.0) * std::log2(c / static_cast<double>(l));
        if (term > best.log2_value) {
            best.log2_value = term;
            best.argmax_l = l;
        }
    }
    if (best.log2_value <= kLinearLog2Limit) best.linear = std::exp2(best.log2_value);
    return best;
}

struct FixedOpsRateBound {
    double rate_bound = 0.0;  // C - tau/k_bd(c)
    double gap_log2 = 0.0;    // log2(tau / k_bd(c)), -inf when tau = 0
    KBound k;
};

// Rate bound for a decoding success tau_c achieved within c operations per information bit.
inline FixedOpsRateBound rate_bound_fixed_ops(double capacity, double tau_c, double c) {
    if (!(tau_c >= 0.0)) throw std::invalid_argument("rate_bound_fixed_ops: tau must be nonnegative");
    FixedOpsRateBound out;
    out.k = k_bd(c);
    if (tau_c == 0.0) {
        out.rate_bound = capacity;
        out.gap_log2 = -std::numeric_limits<double>::infinity();
        return out;
    }
    out.gap_log2 = std::log2(tau_c) - out.k.log2_value;
    out.rate_bound = capacity - std::exp2(out.gap_log2);
    return out;
}

// Smallest c with k_bd(c) >= tau/eps: the lower-bound curve for operations per bit at gap
// eps from capacity. k_bd is continuous and nondecreasing in c, so bisection applies.
inline double min_ops_per_bit(double eps, double tau) {
    if (!(eps > 0.0)) throw std::invalid_argument("min_ops_per_bit: eps must be positive");
    if (!(tau > 0.0)) throw std::invalid_argument("min_ops_per_bit: tau must be positive");
    const double target = std::log2(tau) - std::log2(eps);
    auto reached = [&](double c) { return k_bd(c).log2_value >= target; };
    double hi = 1.0;
    while (!reached(hi)) hi *= 2.0;
    double lo = 0.0;
    if (hi == 1.0) {
        lo = 0.5;
        while (reached(lo)) {
            hi = lo;
            lo *= 0.5;
        }
    } else {
        lo = 0.5 * hi;
    }
    while (hi - lo > 1e-6 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (reached(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

struct ExpCrossover {
    double c_star = 0.0;             // smallest grid c from which k_bd(c) < e^c holds to the end
    double last_failure = 0.0;       // largest grid c where the inequality fails
    bool holds_at_one = false;
    bool holds_at_two = false;
};

// Scans c = 0.01, 0.02, ..., 200 for the point beyond which k_bd(c) < e^c.
inline ExpCrossover exp_crossover() {
    constexpr int kPoints = 20000;
    const double log2e = std::numbers::log2e;
    auto holds = [&](int i) {
        const double c = 0.01 * i;
        return k_bd(c).log2_value < c * log2e;
    };
    ExpCrossover out;
    int first_holding = kPoints + 1;
    for (int i = kPoints; i >= 1; --i) {
        if (!holds(i)) {
            out.last_failure = 0.01 * i;
            break;
        }
        first_holding = i;
    }
    out.c_star = 0.01 * first_holding;
    out.holds_at_one = holds(100);
    out.holds_at_two = holds(200);
    return out;
}

// Stages of the neighborhood-size chain for given degrees, depth and rate, in log2:
// sum (a-1)^i (b-1)^i <= sum (a+b-1)^(2i) <= (a+b-1)^(2l+2) <= (a+b)^(2l+2)
//   = (Rc/l)^(2l+2) <= (c/l)^(2l+2), with c = (a+b) l / R.
struct KMaxChain {
    double tree_sum_log2 = 0.0;
    double squared_sum_log2 = 0.0;
    double power_minus_one_log2 = 0.0;
    double power_log2 = 0.0;
    double ops_form_log2 = 0.0;
};

inline KMaxChain k_max_chain(double alpha, double beta, int l, double rate) {
    if (l < 1) throw std::invalid_argument("k_max_chain: l must be at least 1");
    if (!(rate > 0.0 && rate <= 1.0)) throw std::invalid_argument("k_max_chain: rate must lie in (0, 1]");
    KMaxChain k;
    double tree = 0.0, sq = 0.0;
    for (int i = 1; i <= l; ++i) {
        tree += std::pow((alpha - 1.0) * (beta - 1.0), i);
        sq += std::pow(alpha + beta - 1.0, 2 * i);
    }
    const double e = 2.0 * l + 2.0;
    const double c = (alpha + beta) * l / rate;
    k.tree_sum_log2 = std::log2(tree);
    k.squared_sum_log2 = std::log2(sq);
    k.power_minus_one_log2 = e * std::log2(alpha + beta - 1.0);
    k.power_log2 = e * std::log2(alpha + beta);
    k.ops_form_log2 = e * std::log2(c / l);
    return k;
}

// Evaluated bound chain for one operating point.
struct BoundReport {
    std::optional<double> entropy_bound;
    double rate_bound_raw = 0.0;
    double rate_bound = 0.0;  // clamped to [0, 1]
    std::optional<double> pe_lower;
    std::optional<KBound> k_bd;
    std::optional<double> c_min;
};

}  // namespace bpbound
