#pragma once

// End-to-end evidence run: prior batch, adaptive threshold ladder with
// screened seeds and elliptical slice chains per level, then the mixture and
// sequential evidence estimates plus resampled posterior draws.

#include "semis/estimators.hpp"
#include "semis/model.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>

namespace semis {

struct SemisConfig {
    Eigen::Index n_per_level = 1000;  // N: target samples per level
    double p = 0.1;                   // target mean seed acceptance
    int max_levels = 100;
    std::uint64_t seed = 0;
    int workers = 1;
    double beta_tol = 1e-4;
    double ln_r_term = -1e-4;
    int max_shrink = 1000;
    bool jacobian_in_slice = false;   // literal slice-test variant (diagnostic)
    bool systematic_resample = false;
    Eigen::Index n_posterior = -1;    // draws to resample; -1 means floor(ESS)
};

struct SemisResult {
    RunTrace trace;
    double ln_z_mis = 0.0;
    std::optional<double> ln_z_sis;  // only when the ladder terminated
    PosteriorSummary posterior;
    Eigen::MatrixXd draws;           // physical, dim x n_posterior
    double ess = 0.0;
    std::int64_t n_cal = 0;
    int levels_used = 0;
    bool terminated = false;
};

SemisResult run_semis(const TargetModel& model, const SemisConfig& cfg);

}  // namespace semis
