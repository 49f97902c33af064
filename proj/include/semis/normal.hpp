#pragma once

// Standard normal pdf/cdf/quantile. Self-contained (erfc from <cmath> plus a
// rational quantile approximation refined by one Halley step); absolute cdf
// and quantile error is far below the 1e-9 the probability transform needs.

#include <cmath>

namespace semis {

inline double std_normal_pdf(double x) {
    constexpr double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double std_normal_log_pdf(double x) {
    return -0.5 * x * x - 0.9189385332046727418;
}

inline double std_normal_cdf(double x) {
    constexpr double inv_sqrt2 = 0.7071067811865475244;
    return 0.5 * std::erfc(-x * inv_sqrt2);
}

// Upper tail P(X > x), accurate for large positive x.
inline double std_normal_ccdf(double x) {
    constexpr double inv_sqrt2 = 0.7071067811865475244;
    return 0.5 * std::erfc(x * inv_sqrt2);
}

// Inverse cdf; p in [0,1], the endpoints map to -/+inf.
double std_normal_quantile(double p);

}  // namespace semis
