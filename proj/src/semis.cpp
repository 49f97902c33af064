#include "semis/semis.hpp"

#include "semis/numerics.hpp"
#include "semis/parallel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace semis {

SemisResult run_semis(const TargetModel& model, const SemisConfig& cfg) {
    if (cfg.n_per_level < 2) throw std::invalid_argument("run: n_per_level must be >= 2");
    const std::int64_t evals_at_start = model.eval_count();

    ScheduleConfig scfg;
    scfg.p = cfg.p;
    scfg.max_levels = cfg.max_levels;
    scfg.beta_tol = cfg.beta_tol;
    scfg.ln_r_term = cfg.ln_r_term;

    SemisResult res;
    RunTrace& trace = res.trace;
    trace.schedule = Schedule(scfg);
    trace.schedule.push_root(cfg.n_per_level);
    trace.samples.push_back(draw_prior_level(model, cfg.n_per_level, cfg.seed, cfg.workers));
    trace.ln_lmax_final = trace.samples.back().ln_like.maxCoeff();

    while (trace.schedule.can_advance()) {
        const LevelSamples& prev = trace.samples.back();
        const double prev_thresh = trace.schedule.back().ln_threshold;
        const Level lvl = trace.schedule.advance(prev.ln_like);  // copy: advance reallocates

        // Screen the previous batch into seeds; an empty screen is retried on
        // a derived substream once before giving up.
        std::vector<Seed> seeds;
        for (int attempt = 0; attempt < 2 && seeds.empty(); ++attempt) {
            RngStream rng(cfg.seed + static_cast<std::uint64_t>(attempt),
                          static_cast<std::uint64_t>(lvl.index), 0, SubStream::screen);
            seeds = select_seeds(prev, prev_thresh, lvl.ln_threshold, rng);
        }
        if (seeds.empty())
            throw std::runtime_error("run: level " + std::to_string(lvl.index) +
                                     " collapsed (no surviving seeds; mean acceptance " +
                                     std::to_string(lvl.mean_beta) + ")");

        const ChainPlan plan = plan_chains(cfg.n_per_level,
                                           static_cast<Eigen::Index>(seeds.size()));
        {
            RngStream rng(cfg.seed, static_cast<std::uint64_t>(lvl.index), 0, SubStream::thin);
            thin_seeds(seeds, plan.n_chains, rng);
        }

        SliceTarget target;
        target.ln_threshold = lvl.ln_threshold;
        target.hard = false;
        target.jacobian_in_slice = cfg.jacobian_in_slice;
        LevelSamples block = run_level(seeds, plan, target, model, cfg.seed, lvl.index,
                                       cfg.workers, cfg.max_shrink);
        trace.schedule.set_n_samples(lvl.index, block.count());
        trace.ln_lmax_final = std::max(trace.ln_lmax_final, block.ln_like.maxCoeff());
        trace.samples.push_back(std::move(block));

        if (trace.schedule.terminated()) break;
    }

    trace.terminated = res.terminated = trace.schedule.terminated();
    trace.n_cal = res.n_cal = model.eval_count() - evals_at_start;
    res.levels_used = trace.schedule.size();

    res.ln_z_mis = log_evidence_mis(trace);
    if (trace.terminated) res.ln_z_sis = log_evidence_sis(trace);

    res.posterior = posterior_weights(trace);
    res.ess = res.posterior.ess;

    const Eigen::Index m =
        cfg.n_posterior >= 0 ? cfg.n_posterior
                             : static_cast<Eigen::Index>(std::floor(res.posterior.ess));
    RngStream rng(cfg.seed, 0, 0, SubStream::resample);
    const Eigen::MatrixXd u_draws =
        resample(trace, res.posterior.w, m, rng, cfg.systematic_resample);
    res.draws.resize(model.dim(), m);
    for (Eigen::Index j = 0; j < m; ++j)
        res.draws.col(j) = model.transform().to_physical(u_draws.col(j));
    return res;
}

}  // namespace semis
