#include "semis/numerics.hpp"

#include <vector>

namespace semis {

namespace {

double pairwise_rec(const double* x, size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const size_t h = n / 2;
    return pairwise_rec(x, h) + pairwise_rec(x + h, n - h);
}

}  // namespace

double pairwise_sum(std::span<const double> x) {
    return pairwise_rec(x.data(), x.size());
}

double logsumexp(std::span<const double> x) {
    if (x.empty()) return kNegInf;
    double m = kNegInf;
    for (double v : x)
        if (v > m) m = v;
    if (m == kNegInf) return kNegInf;
    std::vector<double> t(x.size());
    for (size_t i = 0; i < x.size(); ++i) t[i] = std::exp(x[i] - m);
    return m + std::log(pairwise_rec(t.data(), t.size()));
}

}  // namespace semis
