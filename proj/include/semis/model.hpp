#pragma once

// A target for evidence estimation: an independent prior plus a log-likelihood.
// The model counts likelihood evaluations (atomically, so chains may run in
// parallel); -inf marks zero-likelihood regions, NaN/+inf are treated as bugs.

#include "semis/prior.hpp"

#include <Eigen/Core>

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>

namespace semis {

using LogLikelihoodFn = std::function<double(const Eigen::VectorXd&)>;

class TargetModel {
   public:
    TargetModel(PriorSpec prior, LogLikelihoodFn log_like, std::string name = "");

    TargetModel(const TargetModel&) = delete;
    TargetModel& operator=(const TargetModel&) = delete;

    Eigen::Index dim() const { return transform_.dim(); }
    const PriorSpec& prior() const { return transform_.prior(); }
    const ProbTransform& transform() const { return transform_; }
    const std::string& name() const { return name_; }

    // ln L(theta); increments the evaluation counter.
    double log_likelihood(const Eigen::VectorXd& theta) const;

    // ln L(T(u)) for standard-normal coordinates.
    double log_likelihood_u(const Eigen::Ref<const Eigen::VectorXd>& u) const {
        return log_likelihood(transform_.to_physical(u));
    }

    std::int64_t eval_count() const { return evals_.load(std::memory_order_relaxed); }
    void reset_eval_count() { evals_.store(0, std::memory_order_relaxed); }

   private:
    ProbTransform transform_;
    LogLikelihoodFn log_like_;
    std::string name_;
    mutable std::atomic<std::int64_t> evals_{0};
};

}  // namespace semis
