#include "semis/benchmarks.hpp"

#include "semis/normal.hpp"
#include "semis/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace semis {

namespace {

constexpr double kShellCenter = 3.5;
constexpr double kShellRadius = 2.0;
constexpr double kShellWidth = 0.1;

constexpr double kNlgLo = -30.0;
constexpr double kNlgHi = 30.0;

// ln f(x; mu) of the log-gamma factor with unit shape and scale.
inline double lg_log_pdf(double x, double mu) {
    const double t = x - mu;
    return t - std::exp(t);
}

// cdf of the same factor: 1 - exp(-e^{x - mu}).
inline double lg_cdf(double x, double mu) {
    return -std::expm1(-std::exp(x - mu));
}

// Index split of the nlg target (0-based coords; spec'd split in 1-based
// form: LogGamma for 3 <= i <= (n+2)/2, Normal above).
inline bool nlg_coord_is_lg(Eigen::Index j, Eigen::Index n) {
    return j + 1 <= (n + 2) / 2;  // integer floor
}

double ln_half_mix(double la, double lb) {
    constexpr double ln_half = -0.6931471805599453094;
    return logaddexp(ln_half + la, ln_half + lb);
}

}  // namespace

std::string to_string(ExampleId id) {
    switch (id) {
        case ExampleId::eggbox: return "eggbox";
        case ExampleId::shells: return "shells";
        case ExampleId::nlg: return "nlg";
    }
    return "?";
}

ExampleId example_from_string(const std::string& s) {
    if (s == "eggbox") return ExampleId::eggbox;
    if (s == "shells") return ExampleId::shells;
    if (s == "nlg") return ExampleId::nlg;
    throw std::invalid_argument("unknown example '" + s + "'");
}

double loglik_eggbox(const Eigen::Ref<const Eigen::VectorXd>& theta) {
    if (theta.size() != 2) throw std::invalid_argument("eggbox is two-dimensional");
    const double c = 2.0 + std::cos(0.5 * theta[0]) * std::cos(0.5 * theta[1]);
    const double c2 = c * c;
    return c2 * c2 * c;
}

double loglik_shells(const Eigen::Ref<const Eigen::VectorXd>& theta) {
    const Eigen::Index n = theta.size();
    if (n < 2) throw std::invalid_argument("shells needs dim >= 2");
    const double inv2w2 = 1.0 / (2.0 * kShellWidth * kShellWidth);
    const double ln_amp = -0.5 * std::log(2.0 * M_PI * kShellWidth * kShellWidth);
    double rest2 = theta.tail(n - 1).squaredNorm();
    const double d1 = std::sqrt((theta[0] + kShellCenter) * (theta[0] + kShellCenter) + rest2);
    const double d2 = std::sqrt((theta[0] - kShellCenter) * (theta[0] - kShellCenter) + rest2);
    const double g1 = ln_amp - (d1 - kShellRadius) * (d1 - kShellRadius) * inv2w2;
    const double g2 = ln_amp - (d2 - kShellRadius) * (d2 - kShellRadius) * inv2w2;
    return logaddexp(g1, g2);
}

double loglik_nlg(const Eigen::Ref<const Eigen::VectorXd>& theta) {
    const Eigen::Index n = theta.size();
    if (n < 2) throw std::invalid_argument("nlg needs dim >= 2");
    double s = ln_half_mix(lg_log_pdf(theta[0], -10.0), lg_log_pdf(theta[0], 10.0));
    s += ln_half_mix(std_normal_log_pdf(theta[1] + 10.0), std_normal_log_pdf(theta[1] - 10.0));
    for (Eigen::Index j = 2; j < n; ++j)
        s += nlg_coord_is_lg(j, n) ? lg_log_pdf(theta[j], 10.0)
                                   : std_normal_log_pdf(theta[j] - 10.0);
    return s;
}

PriorSpec benchmark_prior(ExampleId id, Eigen::Index dim) {
    switch (id) {
        case ExampleId::eggbox:
            if (dim != 2) throw std::invalid_argument("eggbox is two-dimensional");
            return PriorSpec::iid_uniform(2, 0.0, 10.0 * M_PI);
        case ExampleId::shells:
            return PriorSpec::iid_uniform(dim, -6.0, 6.0);
        case ExampleId::nlg:
            return PriorSpec::iid_uniform(dim, kNlgLo, kNlgHi);
    }
    throw std::invalid_argument("unknown example");
}

std::unique_ptr<TargetModel> make_benchmark(ExampleId id, Eigen::Index dim) {
    PriorSpec prior = benchmark_prior(id, dim);
    LogLikelihoodFn fn;
    switch (id) {
        case ExampleId::eggbox: fn = [](const Eigen::VectorXd& t) { return loglik_eggbox(t); }; break;
        case ExampleId::shells: fn = [](const Eigen::VectorXd& t) { return loglik_shells(t); }; break;
        case ExampleId::nlg: fn = [](const Eigen::VectorXd& t) { return loglik_nlg(t); }; break;
    }
    return std::make_unique<TargetModel>(std::move(prior), std::move(fn),
                                         to_string(id) + "-" + std::to_string(dim));
}

std::optional<double> reference_log_evidence(ExampleId id, Eigen::Index dim) {
    switch (id) {
        case ExampleId::eggbox:
            if (dim == 2) return 235.86;
            break;
        case ExampleId::shells:
            if (dim == 2) return -1.75;
            if (dim == 10) return -14.59;
            if (dim == 30) return -60.13;
            break;
        case ExampleId::nlg:
            if (dim == 2) return -8.19;
            if (dim == 5) return -20.47;
            if (dim == 10) return -40.94;
            if (dim == 20) return -81.89;
            break;
    }
    return std::nullopt;
}

double nlg_marginal_cdf(Eigen::Index coord, Eigen::Index dim, double x) {
    if (coord < 0 || coord >= dim) throw std::invalid_argument("nlg cdf: coordinate out of range");
    if (x <= kNlgLo) return 0.0;
    if (x >= kNlgHi) return 1.0;
    auto raw = [&](double t) {
        if (coord == 0) return 0.5 * lg_cdf(t, -10.0) + 0.5 * lg_cdf(t, 10.0);
        if (coord == 1) return 0.5 * std_normal_cdf(t + 10.0) + 0.5 * std_normal_cdf(t - 10.0);
        return nlg_coord_is_lg(coord, dim) ? lg_cdf(t, 10.0) : std_normal_cdf(t - 10.0);
    };
    const double lo = raw(kNlgLo);
    const double hi = raw(kNlgHi);
    return (raw(x) - lo) / (hi - lo);
}

}  // namespace semis
