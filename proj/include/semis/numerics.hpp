#pragma once

// Log-domain accumulation helpers. Every reduction over sample arrays in this
// library goes through the pairwise (tree) routines below so that results are
// independent of how work was chunked across threads.

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <span>

namespace semis {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLn2Pi = 1.8378770664093454836;

// Sum with fixed-order pairwise association (base blocks of 16 summed
// left to right).
double pairwise_sum(std::span<const double> x);

inline double pairwise_sum(const Eigen::Ref<const Eigen::VectorXd>& x) {
    return pairwise_sum(std::span<const double>(x.data(), static_cast<size_t>(x.size())));
}

// ln(e^a + e^b), tolerant of -inf arguments.
inline double logaddexp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = a > b ? a : b;
    return m + std::log1p(std::exp(-std::fabs(a - b)));
}

// ln sum_k e^{x_k} with max shift; -inf for an empty or all -inf input.
double logsumexp(std::span<const double> x);

inline double logsumexp(const Eigen::Ref<const Eigen::VectorXd>& x) {
    return logsumexp(std::span<const double>(x.data(), static_cast<size_t>(x.size())));
}

// ln(1 - e^x) for x <= 0.
inline double log1mexp(double x) {
    if (x >= 0.0) return kNegInf;  // x == 0 -> ln 0; callers guard x > 0
    constexpr double ln_half = -0.6931471805599453094;
    return x > ln_half ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

}  // namespace semis
