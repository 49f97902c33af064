#pragma once

// Subset-simulation baseline, phrased as multiple importance sampling over
// hard-indicator proposals q_i = phi_i^{-1} pi 1[L > l_i]. Thresholds are
// empirical (1 - p_c) quantiles; the evidence decomposes into per-level
// segment sums
//   z_hat = sum_i phi_i_hat mean_k min{L_{i,k} - l_i, l_{i+1} - l_i} 1[L > l_i]
// with the final cap l_I set to the largest observed likelihood.

#include "semis/estimators.hpp"
#include "semis/model.hpp"
#include "semis/sampler.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace semis {

struct SusConfig {
    Eigen::Index n_per_level = 500;
    double p_c = 0.1;           // conditional level probability
    int max_levels = 100;
    std::uint64_t seed = 0;
    int workers = 1;
    double contrib_tol = 1e-6;  // stop once a level adds less than this fraction
    int max_shrink = 1000;
    bool systematic_resample = false;
    Eigen::Index n_posterior = -1;  // -1 means floor(ESS)
};

enum class SusStop { contribution, quantile_stalled, max_levels };

std::string to_string(SusStop s);

struct SusLevel {
    int index = 0;
    double ln_l = 0.0;        // ln l_i; -inf at level 0
    double ln_phi_hat = 0.0;  // ln of the cumulative survival fraction
    Eigen::Index n_samples = 0;
};

struct SusTrace {
    std::vector<SusLevel> levels;
    std::vector<LevelSamples> samples;
    double ln_lmax = kNegInf;  // largest observed likelihood (the final cap)
    std::int64_t n_cal = 0;
    SusStop stop = SusStop::contribution;
};

// Segment-sum evidence over the whole trace.
double sus_log_evidence(const SusTrace& trace);

// Posterior weights w_{i,k} = (N_t/N_i) phi_i_hat min{L - l_i, l_{i+1} - l_i}
// on the strict-exceedance support, plus normalized weights and ESS.
PosteriorSummary sus_posterior_weights(const SusTrace& trace);

struct SusResult {
    SusTrace trace;
    double ln_z = 0.0;
    PosteriorSummary posterior;
    Eigen::MatrixXd draws;  // physical, dim x n_posterior
    double ess = 0.0;
    std::int64_t n_cal = 0;
    int levels_used = 0;
};

SusResult run_sus(const TargetModel& model, const SusConfig& cfg);

}  // namespace semis
