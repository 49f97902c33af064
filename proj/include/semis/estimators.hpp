#pragma once

// Multiple-importance-sampling estimators over a finished (or partial) run.
// With the balance heuristic the prior density cancels from every weight, so
// all formulas below live purely on cached log-likelihoods:
//   D_{i,k} = ln sum_j N_j rho_j^{-1} min[L_{i,k}/T_j, 1]
//   ln z_MIS = ln sum_{i,k} exp(ln L_{i,k} - D_{i,k})
//   ln w_{i,k} = ln N_t + ln L_{i,k} - D_{i,k}
// The sequential estimator multiplies the realized mean acceptances up the
// ladder and is defined only once the ladder has terminated.

#include "semis/numerics.hpp"
#include "semis/rng.hpp"
#include "semis/sampler.hpp"
#include "semis/schedule.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

namespace semis {

struct RunTrace {
    Schedule schedule;
    std::vector<LevelSamples> samples;  // one entry per schedule level
    double ln_lmax_final = kNegInf;     // max ln L over every stored sample
    bool terminated = false;
    std::int64_t n_cal = 0;             // likelihood evaluations spent

    Eigen::Index total_samples() const;
};

struct PosteriorSummary {
    Eigen::VectorXd ln_w;  // unnormalized log weights, level-major order
    Eigen::VectorXd w;     // normalized weights (sum 1)
    double ess = 0.0;      // (sum w)^2 / sum w^2
};

// Balance-heuristic denominators D_{i,k}, flattened level-major.
Eigen::VectorXd mis_log_denominators(const RunTrace& trace);

double log_evidence_mis(const RunTrace& trace);

// ln lmax + sum_i ln(mean beta_i); requires trace.terminated.
double log_evidence_sis(const RunTrace& trace);

PosteriorSummary posterior_weights(const RunTrace& trace);

double ess_from_log_weights(const Eigen::Ref<const Eigen::VectorXd>& ln_w);

// Per-level contributions Sigma_i to the proposal-wise variance estimate
// sum_i Sigma_i / N_i (population variance of N_i e^{lnL - D} per level).
Eigen::VectorXd mis_variance_diagnostic(const RunTrace& trace);

// Multinomial (or systematic) resampling of m normalized-weight draws;
// returns u-space states column-wise (callers map them through the prior
// transform for physical parameters).
Eigen::MatrixXd resample(const RunTrace& trace, const Eigen::Ref<const Eigen::VectorXd>& w,
                         Eigen::Index m, RngStream& rng, bool systematic = false);

// Index-level resampling shared with the subset-simulation trace.
std::vector<Eigen::Index> resample_indices(const Eigen::Ref<const Eigen::VectorXd>& w,
                                           Eigen::Index m, RngStream& rng,
                                           bool systematic = false);

// Resampling over any sequence of sample blocks with level-major weights.
Eigen::MatrixXd resample_states(const std::vector<LevelSamples>& samples,
                                const Eigen::Ref<const Eigen::VectorXd>& w, Eigen::Index m,
                                RngStream& rng, bool systematic = false);

// Two-sided Kolmogorov-Smirnov statistic of samples against a cdf.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace semis
