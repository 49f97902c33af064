#include "semis/sus.hpp"

#include "semis/benchmarks.hpp"
#include "semis/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace semis;

namespace {

LevelSamples block_1d(const std::vector<double>& ln_like) {
    LevelSamples b;
    const auto n = static_cast<Eigen::Index>(ln_like.size());
    b.u.resize(1, n);
    b.ln_like.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        b.u(0, k) = double(k);
        b.ln_like[k] = ln_like[static_cast<size_t>(k)];
    }
    return b;
}

// level 0: L in {1,2,3,5}; level 1 above l=2 with phi=1/2: L in {3,4,6,2}
// (the last sample sits on the threshold and must drop out)
SusTrace hand_trace() {
    SusTrace tr;
    tr.samples.push_back(block_1d({std::log(1.0), std::log(2.0), std::log(3.0), std::log(5.0)}));
    tr.levels.push_back({0, kNegInf, 0.0, 4});
    tr.samples.push_back(block_1d({std::log(3.0), std::log(4.0), std::log(6.0), std::log(2.0)}));
    tr.levels.push_back({1, std::log(2.0), std::log(0.5), 4});
    tr.ln_lmax = std::log(6.0);
    return tr;
}

}  // namespace

TEST_CASE("segment sums reproduce a linear-space hand computation") {
    // level 0 caps at l_1 = 2:   mean min(L, 2)         = (1+2+2+2)/4 = 7/4
    // level 1 caps at lmax = 6:  phi * mean min(L-2, 4) = (1+2+4+0)/8 = 7/8
    const SusTrace tr = hand_trace();
    CHECK(sus_log_evidence(tr) == doctest::Approx(std::log(21.0 / 8.0)).epsilon(1e-13));

    const PosteriorSummary post = sus_posterior_weights(tr);
    REQUIRE(post.w.size() == 8);
    const std::vector<double> expect{2.0 / 21, 4.0 / 21, 4.0 / 21, 4.0 / 21,
                                     1.0 / 21, 2.0 / 21, 4.0 / 21, 0.0};
    for (Eigen::Index k = 0; k < 8; ++k)
        CHECK(post.w[k] == doctest::Approx(expect[static_cast<size_t>(k)]).epsilon(1e-12));
    CHECK(post.w.sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(post.ess == doctest::Approx(441.0 / 73.0).epsilon(1e-12));

    // the weight identity: lse(ln w) = ln N_t + ln z
    CHECK(logsumexp(post.ln_w) ==
          doctest::Approx(std::log(8.0) + std::log(21.0 / 8.0)).epsilon(1e-13));
}

TEST_CASE("malformed subset traces are rejected") {
    SusTrace tr;
    CHECK_THROWS_AS(sus_log_evidence(tr), std::invalid_argument);
    tr = hand_trace();
    tr.samples.pop_back();
    CHECK_THROWS_AS(sus_log_evidence(tr), std::invalid_argument);
    CHECK_THROWS_AS(sus_posterior_weights(tr), std::invalid_argument);
}

TEST_CASE("a constant likelihood stalls at the prior and integrates exactly") {
    TargetModel model(PriorSpec::iid_uniform(2, 0.0, 1.0),
                      [](const Eigen::VectorXd&) { return 1.7; }, "flat");
    SusConfig cfg;
    cfg.n_per_level = 100;
    cfg.seed = 5;

    const SusResult res = run_sus(model, cfg);
    CHECK(res.levels_used == 1);
    CHECK(res.trace.stop == SusStop::quantile_stalled);
    CHECK(res.ln_z == doctest::Approx(1.7).epsilon(1e-12));
    CHECK(res.ess == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(res.n_cal == model.eval_count());
    for (Eigen::Index j = 0; j < res.draws.cols(); ++j) {
        CHECK(res.draws(0, j) > 0.0);
        CHECK(res.draws(0, j) < 1.0);
    }
}

TEST_CASE("the baseline lands near the known two-dim evidence") {
    auto model = make_benchmark(ExampleId::nlg, 2);
    SusConfig cfg;
    cfg.n_per_level = 400;
    cfg.seed = 13;

    const SusResult res = run_sus(*model, cfg);
    CHECK(std::fabs(res.ln_z - (-8.188689124444201)) < 0.8);
    CHECK(res.levels_used > 2);
    CHECK(res.trace.stop == SusStop::contribution);
    CHECK(res.n_cal == model->eval_count());
    CHECK(res.ess > 0.0);
    for (Eigen::Index j = 0; j < res.draws.cols(); ++j) {
        CHECK(res.draws(0, j) >= -30.0);
        CHECK(res.draws(0, j) <= 30.0);
    }
}

TEST_CASE("baseline runs are reproducible and worker-count invariant") {
    SusConfig cfg;
    cfg.n_per_level = 150;
    cfg.seed = 21;

    auto m1 = make_benchmark(ExampleId::nlg, 2);
    const SusResult a = run_sus(*m1, cfg);
    auto m2 = make_benchmark(ExampleId::nlg, 2);
    const SusResult b = run_sus(*m2, cfg);
    CHECK(a.ln_z == b.ln_z);
    CHECK(a.n_cal == b.n_cal);
    CHECK((a.draws.array() == b.draws.array()).all());

    cfg.workers = 4;
    auto m3 = make_benchmark(ExampleId::nlg, 2);
    const SusResult c = run_sus(*m3, cfg);
    CHECK(a.ln_z == c.ln_z);
    CHECK((a.draws.array() == c.draws.array()).all());
}

TEST_CASE("stop reasons print as stable strings") {
    CHECK(to_string(SusStop::contribution) == "contribution");
    CHECK(to_string(SusStop::quantile_stalled) == "quantile_stalled");
    CHECK(to_string(SusStop::max_levels) == "max_levels");
}

TEST_CASE("bad baseline configurations are rejected") {
    TargetModel model(PriorSpec::iid_uniform(1, 0.0, 1.0),
                      [](const Eigen::VectorXd&) { return 0.0; }, "flat1");
    SusConfig cfg;
    cfg.n_per_level = 1;
    CHECK_THROWS_AS(run_sus(model, cfg), std::invalid_argument);
    cfg.n_per_level = 10;
    cfg.p_c = 0.0;
    CHECK_THROWS_AS(run_sus(model, cfg), std::invalid_argument);
    cfg.p_c = 1.0;
    CHECK_THROWS_AS(run_sus(model, cfg), std::invalid_argument);
}
