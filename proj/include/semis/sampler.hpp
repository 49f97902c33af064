#pragma once

// Level sampling machinery. Seeds surviving the acceptance screen start
// parallel elliptical slice chains in standard-normal coordinates; the
// truncated-likelihood factor enters only through the slice test, so no
// Jacobian correction is needed (the transform is probability preserving).

#include "semis/model.hpp"
#include "semis/rng.hpp"
#include "semis/schedule.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace semis {

struct Seed {
    Eigen::VectorXd u;
    double ln_like = 0.0;
};

struct ChainPlan {
    Eigen::Index n_chains = 0;  // N_c
    Eigen::Index n_steps = 0;   // N_s per chain
};

// Samples of one level: u-space states column-wise plus cached ln L.
struct LevelSamples {
    Eigen::MatrixXd u;        // dim x N_i
    Eigen::VectorXd ln_like;  // N_i

    Eigen::Index count() const { return ln_like.size(); }
};

// Candidate chain counts are round(N/j), j = 1, 2, ...; N_c is the largest
// not exceeding the raw seed count and N_s = round(N/N_c).
ChainPlan plan_chains(Eigen::Index n_target, Eigen::Index n_seeds_raw);

// Level 0 of any run: i.i.d. standard-normal states with likelihoods
// evaluated across `workers` threads (values independent of scheduling).
LevelSamples draw_prior_level(const TargetModel& model, Eigen::Index n,
                              std::uint64_t run_seed, int workers);

// Independent Bernoulli screen: sample k survives with probability
// exp(log_beta(lnL_k, prev, cur)). One stream, fixed order.
std::vector<Seed> select_seeds(const LevelSamples& prev_level, double ln_thresh_prev,
                               double ln_thresh_cur, RngStream& rng);

// Uniform subset without replacement, preserving relative order.
void thin_seeds(std::vector<Seed>& seeds, Eigen::Index n_keep, RngStream& rng);

struct SliceTarget {
    double ln_threshold = 0.0;       // ln T_i (soft) or ln l_i (hard)
    bool hard = false;               // indicator factor 1[L > l] instead of min[L/T, 1]
    bool jacobian_in_slice = false;  // add ln|dT/du| to both slice sides (literal variant)
};

struct StepResult {
    double ln_like = 0.0;
    int n_evals = 0;
};

// One elliptical slice transition for the target phi_n(u) * factor(L(T(u))).
// Updates u and returns the new cached log-likelihood plus the number of
// likelihood evaluations spent. Throws after max_shrink rejected candidates.
StepResult ess_step(Eigen::VectorXd& u, double ln_like, const SliceTarget& target,
                    const TargetModel& model, RngStream& rng, int max_shrink = 1000);

// Run N_c chains of N_s transitions each from the given seeds (one chain per
// seed). Chains execute in parallel across `workers` threads; outputs land in
// (chain, step) order regardless of scheduling. Seeds are not re-evaluated
// and are not part of the output.
LevelSamples run_level(const std::vector<Seed>& seeds, const ChainPlan& plan,
                       const SliceTarget& target, const TargetModel& model,
                       std::uint64_t run_seed, int level_index, int workers,
                       int max_shrink = 1000);

}  // namespace semis
