#include "semis/fem.hpp"

#include "semis/numerics.hpp"
#include "semis/rng.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

using namespace semis;

namespace {

ShearBuilding uniform_building(Eigen::Index n, double k, double m) {
    ShearBuilding b;
    b.k_story = Eigen::VectorXd::Constant(n, k);
    b.m_floor = Eigen::VectorXd::Constant(n, m);
    return b;
}

}  // namespace

TEST_CASE("stiffness and mass assembly follows the shear-chain layout") {
    const ShearBuilding b = four_story_nominal();
    CHECK(b.n_stories() == 4);
    Eigen::VectorXd theta(8);
    theta << 2.0, 1.0, 1.0, 1.0, 1.05, 1.0, 1.0, 0.95;
    Eigen::MatrixXd K, M;
    assemble(b, theta, K, M);
    CHECK(K(0, 0) == 6.0e7);   // k1 + k2 with k1 doubled
    CHECK(K(0, 1) == -2.0e7);
    CHECK(K(1, 0) == -2.0e7);
    CHECK(K(1, 1) == 4.0e7);
    CHECK(K(3, 3) == 2.0e7);   // top story carries only its own spring
    CHECK(K(0, 2) == 0.0);
    CHECK(M(0, 0) == 1.05e4);
    CHECK(M(3, 3) == 0.95e4);
    CHECK(M(0, 1) == 0.0);

    Eigen::VectorXd wrong(7);
    wrong.setOnes();
    CHECK_THROWS_AS(assemble(b, wrong, K, M), std::invalid_argument);
    theta[2] = 0.0;
    CHECK_THROWS_AS(assemble(b, theta, K, M), std::invalid_argument);
    theta[2] = -1.0;
    CHECK_THROWS_AS(assemble(b, theta, K, M), std::invalid_argument);
}

TEST_CASE("a two-story chain reproduces the golden-ratio spectrum") {
    const double k = 2.0e7, m = 1.0e4;
    const ShearBuilding b = uniform_building(2, k, m);
    Eigen::MatrixXd K, M;
    assemble(b, Eigen::VectorXd::Ones(4), K, M);
    const ModalSolution sol = eigensolve(K, M);

    const double s5 = std::sqrt(5.0);
    const double lam1 = (k / m) * (3.0 - s5) / 2.0;
    const double lam2 = (k / m) * (3.0 + s5) / 2.0;
    CHECK(sol.freq_hz[0] ==
          doctest::Approx(std::sqrt(lam1) / (2.0 * M_PI)).epsilon(1e-10));
    CHECK(sol.freq_hz[1] ==
          doctest::Approx(std::sqrt(lam2) / (2.0 * M_PI)).epsilon(1e-10));

    // mode shapes: top/bottom ratio is the golden ratio, then its negative inverse
    CHECK(sol.shapes(1, 0) / sol.shapes(0, 0) ==
          doctest::Approx((1.0 + s5) / 2.0).epsilon(1e-9));
    CHECK(sol.shapes(1, 1) / sol.shapes(0, 1) ==
          doctest::Approx((1.0 - s5) / 2.0).epsilon(1e-9));
}

TEST_CASE("the four-story uniform chain matches the closed-form eigenvalues") {
    const double k = 2.0e7, m = 1.0e4;
    const ShearBuilding b = uniform_building(4, k, m);
    Eigen::MatrixXd K, M;
    assemble(b, Eigen::VectorXd::Ones(8), K, M);
    const ModalSolution sol = eigensolve(K, M);
    for (int j = 1; j <= 4; ++j) {
        const double sine = std::sin((2.0 * j - 1.0) * M_PI / 18.0);
        const double lam = 4.0 * (k / m) * sine * sine;
        CHECK(sol.freq_hz[j - 1] ==
              doctest::Approx(std::sqrt(lam) / (2.0 * M_PI)).epsilon(1e-10));
    }
}

TEST_CASE("the jacobi solve agrees with a library eigensolver off the uniform case") {
    const ShearBuilding b = four_story_nominal();
    Eigen::VectorXd theta(8);
    theta << 0.8, 1.2, 0.95, 1.05, 1.05, 0.92, 1.1, 0.98;
    Eigen::MatrixXd K, M;
    assemble(b, theta, K, M);
    const ModalSolution sol = eigensolve(K, M);

    const Eigen::VectorXd mis = M.diagonal().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd A = mis.asDiagonal() * K * mis.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
    REQUIRE(es.info() == Eigen::Success);
    for (Eigen::Index j = 0; j < 4; ++j)
        CHECK(sol.freq_hz[j] ==
              doctest::Approx(std::sqrt(es.eigenvalues()[j]) / (2.0 * M_PI)).epsilon(1e-10));

    // mass-orthonormal columns with the largest entry positive
    const Eigen::MatrixXd gram = sol.shapes.transpose() * M * sol.shapes;
    CHECK((gram - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-8);
    for (Eigen::Index j = 0; j < 4; ++j) {
        Eigen::Index imax = 0;
        sol.shapes.col(j).cwiseAbs().maxCoeff(&imax);
        CHECK(sol.shapes(imax, j) > 0.0);
        const double lam = std::pow(2.0 * M_PI * sol.freq_hz[j], 2);
        const double resid = (K * sol.shapes.col(j) - lam * M * sol.shapes.col(j)).norm();
        CHECK(resid < 1e-8 * K.norm() * sol.shapes.col(j).norm());
    }
}

TEST_CASE("the eigensolver rejects what it cannot factor") {
    Eigen::MatrixXd K = Eigen::MatrixXd::Identity(3, 3);
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(3, 3);
    M(0, 1) = 0.5;
    CHECK_THROWS_AS(eigensolve(K, M), std::invalid_argument);  // off-diagonal mass
    M = Eigen::MatrixXd::Identity(3, 3);
    M(1, 1) = 0.0;
    CHECK_THROWS_AS(eigensolve(K, M), std::invalid_argument);  // singular mass
    M = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(eigensolve(Eigen::MatrixXd::Identity(2, 2), M), std::invalid_argument);
    CHECK_THROWS_AS(eigensolve(-K, M), std::runtime_error);  // negative spectrum
}

TEST_CASE("the modal assurance criterion measures shape collinearity") {
    Eigen::VectorXd a(2), c(2);
    a << 1.0, 0.0;
    CHECK(mac(a, a) == 1.0);
    CHECK(mac(a, Eigen::VectorXd(-2.0 * a)) == doctest::Approx(1.0).epsilon(1e-15));
    c << 0.0, 3.0;
    CHECK(mac(a, c) == 0.0);
    c << 1.0, 1.0;
    CHECK(mac(a, c) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(mac(a, Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST_CASE("noiseless data score exactly zero at the generating parameters") {
    RngStream rng(0, 0, 0, SubStream::noise);
    for (int pattern = 0; pattern <= 2; ++pattern) {
        const FemCase c = make_case(pattern, 0.0, rng);
        CHECK(modal_loglik(c.building, c.data, c.theta_true) == 0.0);

        Eigen::VectorXd off = c.theta_true;
        off[0] *= 1.01;
        CHECK(modal_loglik(c.building, c.data, off) < 0.0);
    }
}

TEST_CASE("mode pairing is recovered even when the data arrive permuted") {
    RngStream rng(0, 0, 0, SubStream::noise);
    FemCase c = make_case(1, 0.0, rng);
    ModalData shuffled = c.data;
    shuffled.freq_hz[0] = c.data.freq_hz[2];
    shuffled.freq_hz[2] = c.data.freq_hz[0];
    shuffled.shapes.col(0) = c.data.shapes.col(2);
    shuffled.shapes.col(2) = c.data.shapes.col(0);
    // covariance entries follow their mode
    shuffled.cov_diag[0] = c.data.cov_diag[10];
    shuffled.cov_diag[10] = c.data.cov_diag[0];
    CHECK(modal_loglik(c.building, shuffled, c.theta_true) == 0.0);
}

TEST_CASE("infeasible parameters are soft failures, malformed calls are hard ones") {
    RngStream rng(0, 0, 0, SubStream::noise);
    const FemCase c = make_case(0, 0.0, rng);
    Eigen::VectorXd theta = c.theta_true;
    theta[1] = -0.2;
    CHECK(modal_loglik(c.building, c.data, theta) == kNegInf);
    theta[1] = 0.0;
    CHECK(modal_loglik(c.building, c.data, theta) == kNegInf);
    Eigen::VectorXd wrong = Eigen::VectorXd::Ones(7);
    CHECK_THROWS_AS(modal_loglik(c.building, c.data, wrong), std::invalid_argument);
}

TEST_CASE("damage cases carry the documented truth and covariance") {
    RngStream rng(3, 0, 0, SubStream::noise);
    const FemCase c0 = make_case(0, 0.0, rng);
    CHECK((c0.theta_true.array() == 1.0).all());
    const FemCase c1 = make_case(1, 0.0, rng);
    CHECK(c1.theta_true[0] == 0.6);
    CHECK(c1.theta_true[1] == 1.0);
    const FemCase c2 = make_case(2, 0.0, rng);
    CHECK(c2.theta_true[0] == 0.6);
    CHECK(c2.theta_true[2] == 0.6);
    CHECK(c2.theta_true[3] == 1.0);

    // softening the first story must lower the fundamental frequency
    CHECK(c1.data.freq_hz[0] < c0.data.freq_hz[0]);

    REQUIRE(c0.data.cov_diag.size() == 20);
    Eigen::MatrixXd K, M;
    assemble(c0.building, c0.theta_true, K, M);
    const ModalSolution sol = eigensolve(K, M);
    for (Eigen::Index j = 0; j < 4; ++j) {
        const double sf = 0.005 * sol.freq_hz[j];
        CHECK(c0.data.cov_diag[5 * j] == doctest::Approx(sf * sf).epsilon(1e-14));
        for (Eigen::Index i = 1; i <= 4; ++i)
            CHECK(c0.data.cov_diag[5 * j + i] == doctest::Approx(1e-4).epsilon(1e-15));
    }
    for (Eigen::Index j = 0; j < 4; ++j)
        CHECK(c0.data.shapes.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(make_case(3, 0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(make_case(-1, 0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(make_case(0, -0.5, rng), std::invalid_argument);
}

TEST_CASE("noisy data keep the reported covariance at its base values") {
    RngStream clean_rng(9, 0, 0, SubStream::noise);
    const FemCase clean = make_case(1, 0.0, clean_rng);
    RngStream noisy_rng(9, 0, 0, SubStream::noise);
    const FemCase noisy = make_case(1, 4.0, noisy_rng);

    CHECK((clean.data.cov_diag.array() == noisy.data.cov_diag.array()).all());
    CHECK((clean.data.freq_hz - noisy.data.freq_hz).norm() > 0.0);
    for (Eigen::Index j = 0; j < 4; ++j)
        CHECK(noisy.data.shapes.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
    // perturbed data no longer score zero at the truth
    CHECK(modal_loglik(noisy.building, noisy.data, noisy.theta_true) < 0.0);
}

TEST_CASE("the updating target wires the prior box to the modal likelihood") {
    RngStream rng(1, 0, 0, SubStream::noise);
    const FemCase c = make_case(2, 0.0, rng);
    auto model = make_fem_model(c);
    CHECK(model->dim() == 8);
    CHECK(model->name() == "fem-pattern-2");
    CHECK(model->log_likelihood(c.theta_true) == 0.0);

    const PriorSpec& prior = model->prior();
    REQUIRE(prior.dim() == 8);
    for (int j = 0; j < 4; ++j) {
        CHECK(prior.marginals[static_cast<size_t>(j)].a == 0.0);
        CHECK(prior.marginals[static_cast<size_t>(j)].b == 1.5);
        CHECK(prior.marginals[static_cast<size_t>(j + 4)].a == 0.9);
        CHECK(prior.marginals[static_cast<size_t>(j + 4)].b == 1.1);
    }
}
