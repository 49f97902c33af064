#pragma once

// Adaptive ladder of softly-truncated proposals
//   q_i(theta) = rho_i^{-1} pi(theta) min[L(theta)/T_i, 1],
// with thresholds written T_i = r_i * lmax_{0:i-1} against the running
// likelihood maximum. Each advance solves r so that the mean seed acceptance
// over the previous level's batch hits the target p; the ladder terminates
// once ln r is within 1e-4 of 0, i.e. the threshold has reached the observed
// supremum and the last proposal tracks the posterior.

#include <Eigen/Core>

#include <vector>

namespace semis {

struct Level {
    int index = 0;               // level / proposal number i
    double r = 0.0;              // threshold fraction; 0 at level 0 (the prior)
    double ln_r = 0.0;           // ln of the fraction; the working representation
                                 // (r itself can underflow for very spread batches)
    double ln_lmax_before = 0;   // ln lmax_{0:i-1}; -inf at level 0
    double ln_threshold = 0;     // ln T_i = ln r + ln_lmax_before; -inf at level 0
    double mean_beta = 1.0;      // realized mean acceptance of the solve; 1 at level 0
    double ln_rho_hat = 0.0;     // cumulative sum of ln mean_beta (normalization estimate)
    Eigen::Index n_samples = 0;  // N_i, filled once the level has been sampled
    bool at_boundary = false;    // solver clamped r at its bracket edge
};

struct ScheduleConfig {
    double p = 0.1;            // target mean acceptance per transition
    int max_levels = 100;      // proposal budget including the prior level
    double beta_tol = 1e-4;    // |mean beta - p| tolerance of the solve
    int max_bisect = 200;      // bisection iteration cap
    double ln_r_term = -1e-4;  // terminate once ln r >= this
};

struct SolveResult {
    double r = 1.0;        // exp(ln_r); display value, may underflow to 0
    double ln_r = 0.0;
    double mean_beta = 1.0;
    bool at_boundary = false;
};

// ln of the seed acceptance probability
//   beta = min[L/T_cur, 1] / min[L/T_prev, 1]  in  (0, 1],
// with a threshold of -inf meaning the untruncated factor 1.
double log_beta(double ln_like, double ln_thresh_prev, double ln_thresh_cur);

// Solve mean_k beta(r) = p over the previous level's batch by bisection in
// ln r on (r_low, 1], r_low = exp(ln_thresh_prev - ln_lmax_new). Clamps to
// r = 1 (at_boundary) when even the tightest threshold keeps the mean
// acceptance above p.
SolveResult solve_next_r(const Eigen::Ref<const Eigen::VectorXd>& ln_like_batch,
                         double ln_thresh_prev, double ln_lmax_new, double p,
                         double beta_tol = 1e-4, int max_bisect = 200);

bool is_terminated(const Level& level, double ln_r_term = -1e-4);

class Schedule {
   public:
    Schedule() : Schedule(ScheduleConfig{}) {}
    explicit Schedule(ScheduleConfig cfg);

    // Install level 0 (the prior proposal). Must be called exactly once.
    void push_root(Eigen::Index n0);

    bool can_advance() const;

    // Solve the next threshold from the latest level's batch and append the
    // new level. `ln_like_batch` are the log-likelihoods of the samples drawn
    // at the current last level.
    const Level& advance(const Eigen::Ref<const Eigen::VectorXd>& ln_like_batch);

    void set_n_samples(int level_index, Eigen::Index n);

    const std::vector<Level>& levels() const { return levels_; }
    const Level& back() const { return levels_.back(); }
    int size() const { return static_cast<int>(levels_.size()); }
    bool terminated() const { return terminated_; }
    const ScheduleConfig& config() const { return cfg_; }

   private:
    ScheduleConfig cfg_;
    std::vector<Level> levels_;
    bool terminated_ = false;
};

}  // namespace semis
