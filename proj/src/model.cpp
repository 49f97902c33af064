#include "semis/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace semis {

TargetModel::TargetModel(PriorSpec prior, LogLikelihoodFn log_like, std::string name)
    : transform_(std::move(prior)), log_like_(std::move(log_like)), name_(std::move(name)) {
    if (!log_like_) throw std::invalid_argument("model: null log-likelihood");
}

double TargetModel::log_likelihood(const Eigen::VectorXd& theta) const {
    evals_.fetch_add(1, std::memory_order_relaxed);
    const double v = log_like_(theta);
    // -inf is a legitimate zero-likelihood value (e.g. an infeasible structural
    // configuration); NaN or +inf can only come from a broken evaluator.
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
        throw std::runtime_error("model '" + name_ + "': log-likelihood returned " +
                                 (std::isnan(v) ? std::string("NaN") : std::string("+inf")));
    return v;
}

}  // namespace semis
