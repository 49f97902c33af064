#include "semis/sampler.hpp"

#include "semis/numerics.hpp"
#include "semis/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace semis {

ChainPlan plan_chains(Eigen::Index n_target, Eigen::Index n_seeds_raw) {
    if (n_target <= 0) throw std::invalid_argument("plan_chains: n_target must be positive");
    if (n_seeds_raw <= 0) throw std::invalid_argument("plan_chains: no seeds");
    const double n = static_cast<double>(n_target);
    Eigen::Index n_chains = 1;
    for (Eigen::Index j = 1; j <= n_target; ++j) {
        const auto cand = static_cast<Eigen::Index>(std::llround(n / static_cast<double>(j)));
        if (cand <= n_seeds_raw) {
            n_chains = std::max<Eigen::Index>(cand, 1);
            break;
        }
    }
    const auto n_steps = std::max<Eigen::Index>(
        1, static_cast<Eigen::Index>(std::llround(n / static_cast<double>(n_chains))));
    return {n_chains, n_steps};
}

LevelSamples draw_prior_level(const TargetModel& model, Eigen::Index n,
                              std::uint64_t run_seed, int workers) {
    if (n <= 0) throw std::invalid_argument("draw_prior_level: n must be positive");
    LevelSamples out;
    out.u.resize(model.dim(), n);
    out.ln_like.resize(n);
    {
        RngStream rng(run_seed, 0, 0, SubStream::prior_draw);
        for (Eigen::Index k = 0; k < n; ++k) out.u.col(k) = rng.normal_vector(model.dim());
    }
    parallel_for(n, workers, [&](std::int64_t k) {
        out.ln_like[static_cast<Eigen::Index>(k)] = model.log_likelihood_u(out.u.col(k));
    });
    return out;
}

std::vector<Seed> select_seeds(const LevelSamples& prev_level, double ln_thresh_prev,
                               double ln_thresh_cur, RngStream& rng) {
    std::vector<Seed> seeds;
    const Eigen::Index n = prev_level.count();
    for (Eigen::Index k = 0; k < n; ++k) {
        const double lb = log_beta(prev_level.ln_like[k], ln_thresh_prev, ln_thresh_cur);
        const double uu = rng.uniform_open01();  // always consume one draw per sample
        if (lb >= 0.0 || std::log(uu) < lb)
            seeds.push_back({prev_level.u.col(k), prev_level.ln_like[k]});
    }
    return seeds;
}

void thin_seeds(std::vector<Seed>& seeds, Eigen::Index n_keep, RngStream& rng) {
    const auto n = static_cast<Eigen::Index>(seeds.size());
    if (n_keep > n) throw std::invalid_argument("thin_seeds: asked for more seeds than available");
    if (n_keep == n) return;
    // Floyd-style selection of n_keep distinct indices, then order-preserving
    // compaction.
    std::vector<char> chosen(static_cast<size_t>(n), 0);
    for (Eigen::Index j = n - n_keep; j < n; ++j) {
        const auto t = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(j + 1)));
        if (chosen[static_cast<size_t>(t)])
            chosen[static_cast<size_t>(j)] = 1;
        else
            chosen[static_cast<size_t>(t)] = 1;
    }
    size_t w = 0;
    for (size_t k = 0; k < static_cast<size_t>(n); ++k)
        if (chosen[k]) seeds[w++] = std::move(seeds[k]);
    seeds.resize(static_cast<size_t>(n_keep));
}

namespace {

inline double ln_factor(double ln_like, const SliceTarget& t) {
    if (t.hard) return ln_like > t.ln_threshold ? 0.0 : kNegInf;
    return ln_like == kNegInf ? kNegInf : std::min(ln_like - t.ln_threshold, 0.0);
}

}  // namespace

StepResult ess_step(Eigen::VectorXd& u, double ln_like, const SliceTarget& target,
                    const TargetModel& model, RngStream& rng, int max_shrink) {
    const Eigen::Index n = u.size();
    const ProbTransform& tr = model.transform();

    double ln_y = ln_factor(ln_like, target);
    if (target.jacobian_in_slice) ln_y += tr.log_jacobian(u);
    ln_y += std::log(rng.uniform_open01());

    const Eigen::VectorXd v = rng.normal_vector(n);
    double alpha = rng.uniform(0.0, 2.0 * M_PI);
    double alpha_min = alpha - 2.0 * M_PI;
    double alpha_max = alpha;

    StepResult res;
    for (int it = 0; it < max_shrink; ++it) {
        const Eigen::VectorXd cand = u * std::cos(alpha) + v * std::sin(alpha);
        const double cand_ln_like = model.log_likelihood_u(cand);
        ++res.n_evals;
        double cand_ln = ln_factor(cand_ln_like, target);
        if (target.jacobian_in_slice) cand_ln += tr.log_jacobian(cand);
        if (cand_ln > ln_y) {
            u = cand;
            res.ln_like = cand_ln_like;
            return res;
        }
        if (alpha < 0.0)
            alpha_min = alpha;
        else
            alpha_max = alpha;
        alpha = rng.uniform(alpha_min, alpha_max);
    }
    throw std::runtime_error("ess_step: slice bracket failed to shrink after " +
                             std::to_string(max_shrink) + " candidates");
}

LevelSamples run_level(const std::vector<Seed>& seeds, const ChainPlan& plan,
                       const SliceTarget& target, const TargetModel& model,
                       std::uint64_t run_seed, int level_index, int workers,
                       int max_shrink) {
    if (static_cast<Eigen::Index>(seeds.size()) != plan.n_chains)
        throw std::invalid_argument("run_level: seed count does not match plan");
    const Eigen::Index n_out = plan.n_chains * plan.n_steps;
    LevelSamples out;
    out.u.resize(model.dim(), n_out);
    out.ln_like.resize(n_out);

    parallel_for(plan.n_chains, workers, [&](std::int64_t c) {
        RngStream rng(run_seed, static_cast<std::uint64_t>(level_index),
                      static_cast<std::uint64_t>(c), SubStream::chain);
        Eigen::VectorXd u = seeds[static_cast<size_t>(c)].u;
        double ln_like = seeds[static_cast<size_t>(c)].ln_like;
        for (Eigen::Index s = 0; s < plan.n_steps; ++s) {
            const StepResult r = ess_step(u, ln_like, target, model, rng, max_shrink);
            ln_like = r.ln_like;
            const Eigen::Index slot = static_cast<Eigen::Index>(c) * plan.n_steps + s;
            out.u.col(slot) = u;
            out.ln_like[slot] = ln_like;
        }
    });
    return out;
}

}  // namespace semis
