#include "semis/schedule.hpp"

#include "semis/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace semis {

double log_beta(double ln_like, double ln_thresh_prev, double ln_thresh_cur) {
    // A -inf threshold denotes the untruncated factor min[L/T, 1] = 1, which
    // covers level 0 and also keeps zero-likelihood samples well-defined.
    if (ln_like == kNegInf) return (ln_thresh_cur == kNegInf) ? 0.0 : kNegInf;
    const double cur = (ln_thresh_cur == kNegInf) ? 0.0 : std::min(ln_like - ln_thresh_cur, 0.0);
    const double prev = (ln_thresh_prev == kNegInf) ? 0.0 : std::min(ln_like - ln_thresh_prev, 0.0);
    return cur - prev;
}

namespace {

// mean_k exp(log_beta) at threshold ln r + ln_lmax, with the denominator part
// precomputed; fixed-order pairwise mean for determinism.
double mean_beta_at(const Eigen::VectorXd& ln_like, const Eigen::VectorXd& ln_beta_denom,
                    double ln_r, double ln_lmax, std::vector<double>& scratch) {
    const double ln_t = ln_r + ln_lmax;
    const Eigen::Index n = ln_like.size();
    scratch.resize(static_cast<size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        const double lk = ln_like[k];
        const double num = (lk == kNegInf) ? kNegInf : std::min(lk - ln_t, 0.0);
        scratch[static_cast<size_t>(k)] = std::exp(num - ln_beta_denom[k]);
    }
    return pairwise_sum(scratch) / static_cast<double>(n);
}

}  // namespace

SolveResult solve_next_r(const Eigen::Ref<const Eigen::VectorXd>& ln_like_batch,
                         double ln_thresh_prev, double ln_lmax_new, double p,
                         double beta_tol, int max_bisect) {
    const Eigen::Index n = ln_like_batch.size();
    if (n == 0) throw std::invalid_argument("solve_next_r: empty batch");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("solve_next_r: p must be in (0,1)");
    if (!std::isfinite(ln_lmax_new))
        throw std::invalid_argument("solve_next_r: no finite likelihood observed");

    Eigen::VectorXd ln_like = ln_like_batch;
    Eigen::VectorXd denom(n);
    double ln_min_finite = 0.0;  // min finite ln_like - ln_lmax_new
    bool any_finite = false;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double lk = ln_like[k];
        denom[k] = (ln_thresh_prev == kNegInf || lk == kNegInf)
                       ? 0.0
                       : std::min(lk - ln_thresh_prev, 0.0);
        if (lk != kNegInf) {
            const double rel = lk - ln_lmax_new;
            if (!any_finite || rel < ln_min_finite) ln_min_finite = rel;
            any_finite = true;
        }
    }
    if (!any_finite) throw std::invalid_argument("solve_next_r: batch has no finite likelihood");

    std::vector<double> scratch;
    auto f = [&](double ln_r) {
        return mean_beta_at(ln_like, denom, ln_r, ln_lmax_new, scratch);
    };

    // Bracket in ln r. Below lo every beta saturates (mean at its maximum);
    // the threshold must stay strictly above the previous one.
    double lo = ln_min_finite;
    if (ln_thresh_prev != kNegInf)
        lo = std::max(lo, ln_thresh_prev - ln_lmax_new);
    lo = std::min(lo + 1e-12 * std::max(1.0, std::fabs(lo)), 0.0);
    const double hi = 0.0;

    const double f_hi = f(hi);
    if (f_hi >= p) return {1.0, 0.0, f_hi, true};  // tightest threshold still accepts >= p
    const double f_lo = f(lo);
    if (f_lo < p) return {std::exp(lo), lo, f_lo, true};  // degenerate batch; keep minimal step

    double a = lo, b = hi;
    double mid = 0.5 * (a + b), f_mid = f(mid);
    for (int it = 0; it < max_bisect; ++it) {
        if (std::fabs(f_mid - p) <= beta_tol || (b - a) < 1e-14) break;
        if (f_mid > p)
            a = mid;  // mean beta too high -> raise threshold
        else
            b = mid;
        mid = 0.5 * (a + b);
        f_mid = f(mid);
    }
    return {std::exp(mid), mid, f_mid, false};
}

bool is_terminated(const Level& level, double ln_r_term) {
    return level.index > 0 && level.ln_r >= ln_r_term;
}

Schedule::Schedule(ScheduleConfig cfg) : cfg_(cfg) {
    if (!(cfg_.p > 0.0 && cfg_.p < 1.0)) throw std::invalid_argument("schedule: p must be in (0,1)");
    if (cfg_.max_levels < 2) throw std::invalid_argument("schedule: max_levels must be >= 2");
}

void Schedule::push_root(Eigen::Index n0) {
    if (!levels_.empty()) throw std::logic_error("schedule: root level already present");
    if (n0 <= 0) throw std::invalid_argument("schedule: n0 must be positive");
    Level root;
    root.index = 0;
    root.r = 0.0;
    root.ln_r = kNegInf;
    root.ln_lmax_before = kNegInf;
    root.ln_threshold = kNegInf;
    root.mean_beta = 1.0;
    root.ln_rho_hat = 0.0;
    root.n_samples = n0;
    levels_.push_back(root);
}

bool Schedule::can_advance() const {
    return !levels_.empty() && !terminated_ && size() < cfg_.max_levels;
}

const Level& Schedule::advance(const Eigen::Ref<const Eigen::VectorXd>& ln_like_batch) {
    if (levels_.empty()) throw std::logic_error("schedule: advance before root");
    if (terminated_) throw std::logic_error("schedule: already terminated");
    if (size() >= cfg_.max_levels) throw std::logic_error("schedule: level budget exhausted");

    const Level& prev = levels_.back();
    const double batch_max = ln_like_batch.size() > 0 ? ln_like_batch.maxCoeff() : kNegInf;
    const double ln_lmax_new = std::max(prev.ln_lmax_before, batch_max);

    const SolveResult s = solve_next_r(ln_like_batch, prev.ln_threshold, ln_lmax_new,
                                       cfg_.p, cfg_.beta_tol, cfg_.max_bisect);

    Level next;
    next.index = prev.index + 1;
    next.r = s.r;
    next.ln_r = s.ln_r;
    next.ln_lmax_before = ln_lmax_new;
    next.ln_threshold = s.ln_r + ln_lmax_new;
    next.mean_beta = s.mean_beta;
    next.ln_rho_hat = prev.ln_rho_hat + std::log(s.mean_beta);
    next.n_samples = 0;
    next.at_boundary = s.at_boundary;
    levels_.push_back(next);
    if (is_terminated(levels_.back(), cfg_.ln_r_term)) terminated_ = true;
    return levels_.back();
}

void Schedule::set_n_samples(int level_index, Eigen::Index n) {
    levels_.at(static_cast<size_t>(level_index)).n_samples = n;
}

}  // namespace semis
