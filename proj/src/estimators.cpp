#include "semis/estimators.hpp"

#include "semis/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace semis {

namespace {

void validate(const RunTrace& trace) {
    const auto& levels = trace.schedule.levels();
    if (levels.empty()) throw std::invalid_argument("trace: no levels");
    if (trace.samples.size() != levels.size())
        throw std::invalid_argument("trace: sample blocks do not match schedule");
    for (size_t i = 0; i < levels.size(); ++i) {
        if (trace.samples[i].count() != levels[i].n_samples)
            throw std::invalid_argument("trace: level " + std::to_string(i) +
                                        " sample count mismatch");
        const auto& ll = trace.samples[i].ln_like;
        for (Eigen::Index k = 0; k < ll.size(); ++k)
            if (std::isnan(ll[k]) || ll[k] == std::numeric_limits<double>::infinity())
                throw std::invalid_argument("trace: non-finite log-likelihood at level " +
                                            std::to_string(i) + ", sample " + std::to_string(k));
    }
}

}  // namespace

Eigen::Index RunTrace::total_samples() const {
    Eigen::Index n = 0;
    for (const auto& s : samples) n += s.count();
    return n;
}

Eigen::VectorXd mis_log_denominators(const RunTrace& trace) {
    validate(trace);
    const auto& levels = trace.schedule.levels();
    const size_t n_lvl = levels.size();

    // Per-level constants ln N_j - ln rho_hat_j.
    std::vector<double> base(n_lvl);
    for (size_t j = 0; j < n_lvl; ++j)
        base[j] = std::log(static_cast<double>(levels[j].n_samples)) - levels[j].ln_rho_hat;

    Eigen::VectorXd d(trace.total_samples());
    std::vector<double> terms(n_lvl);
    Eigen::Index pos = 0;
    for (const auto& block : trace.samples) {
        for (Eigen::Index k = 0; k < block.count(); ++k) {
            const double lnL = block.ln_like[k];
            for (size_t j = 0; j < n_lvl; ++j) {
                const double t = levels[j].ln_threshold;
                const double trunc =
                    (t == kNegInf) ? 0.0
                                   : (lnL == kNegInf ? kNegInf : std::min(lnL - t, 0.0));
                terms[j] = base[j] + trunc;
            }
            d[pos++] = logsumexp(std::span<const double>(terms.data(), terms.size()));
        }
    }
    return d;
}

double log_evidence_mis(const RunTrace& trace) {
    const Eigen::VectorXd d = mis_log_denominators(trace);
    Eigen::VectorXd terms(d.size());
    Eigen::Index pos = 0;
    for (const auto& block : trace.samples)
        for (Eigen::Index k = 0; k < block.count(); ++k, ++pos)
            terms[pos] = block.ln_like[k] == kNegInf ? kNegInf : block.ln_like[k] - d[pos];
    return logsumexp(terms);
}

double log_evidence_sis(const RunTrace& trace) {
    validate(trace);
    if (!trace.terminated)
        throw std::logic_error("sequential estimator undefined: ladder did not terminate");
    // ln rho_hat of the last level already accumulates every transition's
    // realized mean acceptance.
    return trace.ln_lmax_final + trace.schedule.levels().back().ln_rho_hat;
}

PosteriorSummary posterior_weights(const RunTrace& trace) {
    const Eigen::VectorXd d = mis_log_denominators(trace);
    const double ln_nt = std::log(static_cast<double>(trace.total_samples()));
    PosteriorSummary out;
    out.ln_w.resize(d.size());
    Eigen::Index pos = 0;
    for (const auto& block : trace.samples)
        for (Eigen::Index k = 0; k < block.count(); ++k, ++pos)
            out.ln_w[pos] =
                block.ln_like[k] == kNegInf ? kNegInf : ln_nt + block.ln_like[k] - d[pos];
    const double ln_sum = logsumexp(out.ln_w);
    if (ln_sum == kNegInf) throw std::runtime_error("posterior weights are all zero");
    // scalar exp: the vectorized one clamps -inf to a denormal instead of 0
    out.w.resize(out.ln_w.size());
    for (Eigen::Index k = 0; k < out.ln_w.size(); ++k)
        out.w[k] = std::exp(out.ln_w[k] - ln_sum);
    out.ess = ess_from_log_weights(out.ln_w);
    return out;
}

double ess_from_log_weights(const Eigen::Ref<const Eigen::VectorXd>& ln_w) {
    const double ln_s1 = logsumexp(ln_w);
    if (ln_s1 == kNegInf) return 0.0;
    const Eigen::VectorXd twice = 2.0 * ln_w;
    const double ln_s2 = logsumexp(twice);
    return std::exp(2.0 * ln_s1 - ln_s2);
}

Eigen::VectorXd mis_variance_diagnostic(const RunTrace& trace) {
    const Eigen::VectorXd d = mis_log_denominators(trace);
    const auto& levels = trace.schedule.levels();
    Eigen::VectorXd sigma(levels.size());
    Eigen::Index pos = 0;
    std::vector<double> vals;
    for (size_t i = 0; i < levels.size(); ++i) {
        const auto& block = trace.samples[i];
        const double ln_ni = std::log(static_cast<double>(levels[i].n_samples));
        vals.assign(static_cast<size_t>(block.count()), 0.0);
        // v_{i,k} = N_i exp(lnL - D); shift by the max exponent to stay finite.
        double m = kNegInf;
        for (Eigen::Index k = 0; k < block.count(); ++k) {
            const double lnL = block.ln_like[k];
            const double e = lnL == kNegInf ? kNegInf : ln_ni + lnL - d[pos + k];
            vals[static_cast<size_t>(k)] = e;
            m = std::max(m, e);
        }
        if (m == kNegInf) {
            sigma[static_cast<Eigen::Index>(i)] = 0.0;
            pos += block.count();
            continue;
        }
        std::vector<double> shifted(vals.size());
        for (size_t k = 0; k < vals.size(); ++k) shifted[k] = std::exp(vals[k] - m);
        const double n = static_cast<double>(block.count());
        const double mean = pairwise_sum(shifted) / n;
        std::vector<double> sq(vals.size());
        for (size_t k = 0; k < vals.size(); ++k) {
            const double c = shifted[k] - mean;
            sq[k] = c * c;
        }
        sigma[static_cast<Eigen::Index>(i)] = std::exp(2.0 * m) * pairwise_sum(sq) / n;
        pos += block.count();
    }
    return sigma;
}

std::vector<Eigen::Index> resample_indices(const Eigen::Ref<const Eigen::VectorXd>& w,
                                           Eigen::Index m, RngStream& rng, bool systematic) {
    const Eigen::Index n = w.size();
    if (n == 0 || m < 0) throw std::invalid_argument("resample: bad sizes");
    Eigen::VectorXd cum(n);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        acc += w[k];
        cum[k] = acc;
    }
    const double total = cum[n - 1];
    if (!(total > 0.0)) throw std::invalid_argument("resample: weights sum to zero");
    std::vector<Eigen::Index> idx(static_cast<size_t>(m));
    auto locate = [&](double x) {
        const double* beg = cum.data();
        const double* it = std::lower_bound(beg, beg + n, x);
        return static_cast<Eigen::Index>(std::min<std::ptrdiff_t>(it - beg, n - 1));
    };
    if (systematic) {
        const double step = total / static_cast<double>(m);
        const double u0 = rng.uniform01() * step;
        for (Eigen::Index j = 0; j < m; ++j) idx[static_cast<size_t>(j)] = locate(u0 + step * static_cast<double>(j));
    } else {
        for (Eigen::Index j = 0; j < m; ++j) idx[static_cast<size_t>(j)] = locate(rng.uniform01() * total);
    }
    return idx;
}

Eigen::MatrixXd resample_states(const std::vector<LevelSamples>& samples,
                                const Eigen::Ref<const Eigen::VectorXd>& w, Eigen::Index m,
                                RngStream& rng, bool systematic) {
    if (samples.empty()) throw std::invalid_argument("resample: no sample blocks");
    std::vector<Eigen::Index> offsets(samples.size() + 1, 0);
    for (size_t i = 0; i < samples.size(); ++i) offsets[i + 1] = offsets[i] + samples[i].count();
    if (w.size() != offsets.back())
        throw std::invalid_argument("resample: weight vector does not match samples");
    const std::vector<Eigen::Index> idx = resample_indices(w, m, rng, systematic);

    Eigen::MatrixXd draws(samples.front().u.rows(), m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::Index flat = idx[static_cast<size_t>(j)];
        const auto lvl = static_cast<size_t>(
            std::upper_bound(offsets.begin(), offsets.end(), flat) - offsets.begin() - 1);
        draws.col(j) = samples[lvl].u.col(flat - offsets[lvl]);
    }
    return draws;
}

Eigen::MatrixXd resample(const RunTrace& trace, const Eigen::Ref<const Eigen::VectorXd>& w,
                         Eigen::Index m, RngStream& rng, bool systematic) {
    validate(trace);
    return resample_states(trace.samples, w, m, rng, systematic);
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        const double hi = (static_cast<double>(i) + 1.0) / n - f;
        const double lo = f - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    return d;
}

}  // namespace semis
