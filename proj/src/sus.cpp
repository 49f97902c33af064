#include "semis/sus.hpp"

#include "semis/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace semis {

namespace {

// ln(e^a - e^b) for a > b (b may be -inf).
inline double ln_diff(double a, double b) { return a + log1mexp(b - a); }

// Per-sample segment terms ln min{L - l_i, cap - l_i} restricted to L > l_i;
// -inf elsewhere. Shared by the evidence sum and the posterior weights.
Eigen::VectorXd segment_terms(const LevelSamples& block, double ln_l, double ln_cap) {
    Eigen::VectorXd t(block.count());
    const double ln_seg = ln_diff(ln_cap, ln_l);
    for (Eigen::Index k = 0; k < block.count(); ++k) {
        const double lnL = block.ln_like[k];
        t[k] = (lnL > ln_l) ? std::min(ln_diff(lnL, ln_l), ln_seg) : kNegInf;
    }
    return t;
}

// Empirical (1 - p_c) quantile: the ceil((1-p_c) N)-th smallest value.
double quantile_candidate(const Eigen::VectorXd& ln_like, double p_c) {
    std::vector<double> v(ln_like.data(), ln_like.data() + ln_like.size());
    std::sort(v.begin(), v.end());
    const auto n = static_cast<double>(v.size());
    auto idx = static_cast<std::ptrdiff_t>(std::ceil((1.0 - p_c) * n)) - 1;
    idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(v.size()) - 1);
    double t = v[static_cast<size_t>(idx)];
    // A nonempty strict-exceedance set is required for seeding; under ties
    // nudge down to the largest value that still has one.
    const double vmax = v.back();
    if (t >= vmax) {
        auto it = std::lower_bound(v.begin(), v.end(), vmax);
        if (it == v.begin()) return kNegInf;  // all samples identical: no usable threshold
        t = *(it - 1);
    }
    return t;
}

}  // namespace

std::string to_string(SusStop s) {
    switch (s) {
        case SusStop::contribution: return "contribution";
        case SusStop::quantile_stalled: return "quantile_stalled";
        case SusStop::max_levels: return "max_levels";
    }
    return "?";
}

double sus_log_evidence(const SusTrace& trace) {
    if (trace.levels.empty() || trace.samples.size() != trace.levels.size())
        throw std::invalid_argument("sus trace: malformed");
    std::vector<double> terms;
    for (size_t i = 0; i < trace.levels.size(); ++i) {
        const SusLevel& lv = trace.levels[i];
        const double cap = (i + 1 < trace.levels.size()) ? trace.levels[i + 1].ln_l : trace.ln_lmax;
        const Eigen::VectorXd t = segment_terms(trace.samples[i], lv.ln_l, cap);
        const double base = lv.ln_phi_hat - std::log(static_cast<double>(lv.n_samples));
        for (Eigen::Index k = 0; k < t.size(); ++k)
            if (t[k] != kNegInf) terms.push_back(base + t[k]);
    }
    return logsumexp(std::span<const double>(terms.data(), terms.size()));
}

PosteriorSummary sus_posterior_weights(const SusTrace& trace) {
    if (trace.levels.empty() || trace.samples.size() != trace.levels.size())
        throw std::invalid_argument("sus trace: malformed");
    Eigen::Index n_total = 0;
    for (const auto& b : trace.samples) n_total += b.count();
    const double ln_nt = std::log(static_cast<double>(n_total));

    PosteriorSummary out;
    out.ln_w.resize(n_total);
    Eigen::Index pos = 0;
    for (size_t i = 0; i < trace.levels.size(); ++i) {
        const SusLevel& lv = trace.levels[i];
        const double cap = (i + 1 < trace.levels.size()) ? trace.levels[i + 1].ln_l : trace.ln_lmax;
        const Eigen::VectorXd t = segment_terms(trace.samples[i], lv.ln_l, cap);
        const double base = ln_nt - std::log(static_cast<double>(lv.n_samples)) + lv.ln_phi_hat;
        for (Eigen::Index k = 0; k < t.size(); ++k, ++pos)
            out.ln_w[pos] = t[k] == kNegInf ? kNegInf : base + t[k];
    }
    const double ln_sum = logsumexp(out.ln_w);
    if (ln_sum == kNegInf) throw std::runtime_error("posterior weights are all zero");
    // scalar exp: the vectorized one clamps -inf to a denormal instead of 0
    out.w.resize(out.ln_w.size());
    for (Eigen::Index k = 0; k < out.ln_w.size(); ++k)
        out.w[k] = std::exp(out.ln_w[k] - ln_sum);
    out.ess = ess_from_log_weights(out.ln_w);
    return out;
}

SusResult run_sus(const TargetModel& model, const SusConfig& cfg) {
    if (cfg.n_per_level < 2) throw std::invalid_argument("run: n_per_level must be >= 2");
    if (!(cfg.p_c > 0.0 && cfg.p_c < 1.0))
        throw std::invalid_argument("run: p_c must be in (0,1)");
    const std::int64_t evals_at_start = model.eval_count();

    SusResult res;
    SusTrace& trace = res.trace;
    trace.samples.push_back(draw_prior_level(model, cfg.n_per_level, cfg.seed, cfg.workers));
    trace.levels.push_back({0, kNegInf, 0.0, cfg.n_per_level});
    trace.ln_lmax = trace.samples.back().ln_like.maxCoeff();

    double cum_ln_z = kNegInf;
    for (;;) {
        const SusLevel cur = trace.levels.back();
        const LevelSamples& block = trace.samples.back();

        const double t = quantile_candidate(block.ln_like, cfg.p_c);
        if (t == kNegInf || t <= cur.ln_l) {
            trace.stop = SusStop::quantile_stalled;
            break;
        }

        // Committed segment of the current level under the candidate cap; if
        // it no longer moves the running total the ladder is done.
        const Eigen::VectorXd seg = segment_terms(block, cur.ln_l, t);
        std::vector<double> terms;
        terms.reserve(static_cast<size_t>(seg.size()));
        const double base = cur.ln_phi_hat - std::log(static_cast<double>(cur.n_samples));
        for (Eigen::Index k = 0; k < seg.size(); ++k)
            if (seg[k] != kNegInf) terms.push_back(base + seg[k]);
        const double contrib = logsumexp(std::span<const double>(terms.data(), terms.size()));
        cum_ln_z = logaddexp(cum_ln_z, contrib);
        if (std::exp(contrib - cum_ln_z) < cfg.contrib_tol) {
            trace.stop = SusStop::contribution;
            break;
        }
        if (static_cast<int>(trace.levels.size()) >= cfg.max_levels) {
            trace.stop = SusStop::max_levels;
            break;
        }

        // Survivors of the strict exceedance screen seed the next level.
        std::vector<Seed> seeds;
        for (Eigen::Index k = 0; k < block.count(); ++k)
            if (block.ln_like[k] > t) seeds.push_back({block.u.col(k), block.ln_like[k]});
        const double frac =
            static_cast<double>(seeds.size()) / static_cast<double>(block.count());
        const int next_index = cur.index + 1;

        const ChainPlan plan =
            plan_chains(cfg.n_per_level, static_cast<Eigen::Index>(seeds.size()));
        {
            RngStream rng(cfg.seed, static_cast<std::uint64_t>(next_index), 0, SubStream::thin);
            thin_seeds(seeds, plan.n_chains, rng);
        }
        SliceTarget target;
        target.ln_threshold = t;
        target.hard = true;
        LevelSamples next = run_level(seeds, plan, target, model, cfg.seed, next_index,
                                      cfg.workers, cfg.max_shrink);
        trace.ln_lmax = std::max(trace.ln_lmax, next.ln_like.maxCoeff());
        trace.levels.push_back(
            {next_index, t, cur.ln_phi_hat + std::log(frac), next.count()});
        trace.samples.push_back(std::move(next));
    }

    trace.n_cal = res.n_cal = model.eval_count() - evals_at_start;
    res.levels_used = static_cast<int>(trace.levels.size());
    res.ln_z = sus_log_evidence(trace);
    res.posterior = sus_posterior_weights(trace);
    res.ess = res.posterior.ess;

    const Eigen::Index m =
        cfg.n_posterior >= 0 ? cfg.n_posterior
                             : static_cast<Eigen::Index>(std::floor(res.posterior.ess));
    RngStream rng(cfg.seed, 0, 0, SubStream::resample);
    const Eigen::MatrixXd u_draws =
        resample_states(trace.samples, res.posterior.w, m, rng, cfg.systematic_resample);
    res.draws.resize(model.dim(), m);
    for (Eigen::Index j = 0; j < m; ++j)
        res.draws.col(j) = model.transform().to_physical(u_draws.col(j));
    return res;
}

}  // namespace semis
