#include "semis/prior.hpp"

#include "semis/normal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace semis {

Marginal Marginal::Uniform(double a, double b) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("uniform marginal requires finite a < b");
    Marginal m;
    m.kind = MarginalKind::uniform;
    m.a = a;
    m.b = b;
    return m;
}

Marginal Marginal::Normal(double mu, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(mu) || !std::isfinite(sigma))
        throw std::invalid_argument("normal marginal requires finite mu and sigma > 0");
    Marginal m;
    m.kind = MarginalKind::normal;
    m.mu = mu;
    m.sigma = sigma;
    return m;
}

PriorSpec PriorSpec::iid_uniform(Eigen::Index n, double a, double b) {
    PriorSpec p;
    p.marginals.assign(static_cast<size_t>(n), Marginal::Uniform(a, b));
    return p;
}

ProbTransform::ProbTransform(PriorSpec prior) : prior_(std::move(prior)) {
    if (prior_.dim() == 0) throw std::invalid_argument("empty prior");
}

Eigen::VectorXd ProbTransform::to_physical(const Eigen::Ref<const Eigen::VectorXd>& u) const {
    if (u.size() != dim()) throw std::invalid_argument("transform: dimension mismatch");
    Eigen::VectorXd theta(dim());
    for (Eigen::Index j = 0; j < dim(); ++j) {
        const double uj = u[j];
        if (std::isnan(uj)) throw std::invalid_argument("transform: non-finite input");
        const Marginal& m = prior_.marginals[static_cast<size_t>(j)];
        if (m.kind == MarginalKind::uniform) {
            // Evaluate in the nearer tail so Phi keeps full precision.
            theta[j] = uj <= 0.0 ? m.a + (m.b - m.a) * std_normal_cdf(uj)
                                 : m.b - (m.b - m.a) * std_normal_ccdf(uj);
        } else {
            theta[j] = m.mu + m.sigma * uj;
        }
    }
    return theta;
}

Eigen::VectorXd ProbTransform::to_standard(const Eigen::Ref<const Eigen::VectorXd>& theta) const {
    if (theta.size() != dim()) throw std::invalid_argument("transform: dimension mismatch");
    Eigen::VectorXd u(dim());
    for (Eigen::Index j = 0; j < dim(); ++j) {
        const double tj = theta[j];
        if (std::isnan(tj)) throw std::invalid_argument("transform: non-finite input");
        const Marginal& m = prior_.marginals[static_cast<size_t>(j)];
        if (m.kind == MarginalKind::uniform) {
            if (tj < m.a || tj > m.b)
                throw std::invalid_argument("transform: value outside prior support at coordinate " +
                                            std::to_string(j));
            const double span = m.b - m.a;
            const double p = (tj - m.a) / span;
            // Invert through whichever tail is represented more accurately.
            u[j] = p <= 0.5 ? std_normal_quantile(p)
                            : -std_normal_quantile((m.b - tj) / span);
        } else {
            if (!std::isfinite(tj)) throw std::invalid_argument("transform: non-finite input");
            u[j] = (tj - m.mu) / m.sigma;
        }
    }
    return u;
}

double ProbTransform::log_jacobian(const Eigen::Ref<const Eigen::VectorXd>& u) const {
    if (u.size() != dim()) throw std::invalid_argument("transform: dimension mismatch");
    double s = 0.0;
    for (Eigen::Index j = 0; j < dim(); ++j) {
        const double uj = u[j];
        if (std::isnan(uj)) throw std::invalid_argument("transform: non-finite input");
        const Marginal& m = prior_.marginals[static_cast<size_t>(j)];
        if (m.kind == MarginalKind::uniform) {
            s += std_normal_log_pdf(uj) + std::log(m.b - m.a);
        } else {
            s += std::log(m.sigma);
        }
    }
    return s;
}

}  // namespace semis
