#pragma once

#include <cmath>
#include <span>

namespace bpbound {

// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Probabilities below this contribute nothing representable to an entropy.
inline constexpr double kNegligibleProbability = 1e-300;

// -p log2 p, with the 0 log 0 = 0 convention.
inline double entropy_term(double p) {
    if (p < kNegligibleProbability) return 0.0;
    return -p * std::log2(p);
}

// Shannon entropy in bits of a probability vector.
inline double entropy_bits(std::span<const double> probs) {
    CompensatedSum acc;
    for (double p : probs) acc.add(entropy_term(p));
    return acc.value();
}

inline double binary_entropy(double p) {
    return entropy_term(p) + entropy_term(1.0 - p);
}

// Pr(X = 0) for a natural-log likelihood ratio ln P(0)/P(1).
inline double posterior_zero(double llr_nats) {
    if (llr_nats >= 0.0) return 1.0 / (1.0 + std::exp(-llr_nats));
    const double e = std::exp(llr_nats);
    return e / (1.0 + e);
}

}  // namespace bpbound
