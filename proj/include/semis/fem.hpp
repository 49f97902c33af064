#pragma once

// Reduced-scale structural model updating demo: an n-story shear building
// with per-story stiffness multipliers and per-floor mass multipliers as the
// uncertain parameters, identified from noisy modal data (natural frequencies
// plus mode shapes). The generalized eigenproblem K phi = w^2 M phi is solved
// by scaling with M^{-1/2} and running cyclic Jacobi rotations.

#include "semis/model.hpp"
#include "semis/rng.hpp"

#include <Eigen/Core>

#include <memory>

namespace semis {

struct ShearBuilding {
    Eigen::VectorXd k_story;  // nominal story stiffnesses [N/m], ground up
    Eigen::VectorXd m_floor;  // nominal floor masses [kg]

    Eigen::Index n_stories() const { return k_story.size(); }
};

// The demo structure: four stories, 2.0e7 N/m per story, 1.0e4 kg per floor.
ShearBuilding four_story_nominal();

// Parameter layout: theta = [stiffness multipliers (n), mass multipliers (n)].
// Stiffness multipliers Uniform(0, 1.5), mass multipliers Uniform(0.9, 1.1).
PriorSpec fem_prior(Eigen::Index n_stories);

// Stiffness (tridiagonal) and mass (diagonal) matrices under the multipliers.
// Throws if any multiplier is non-positive.
void assemble(const ShearBuilding& b, const Eigen::Ref<const Eigen::VectorXd>& theta,
              Eigen::MatrixXd& K, Eigen::MatrixXd& M);

struct ModalSolution {
    Eigen::VectorXd freq_hz;  // ascending natural frequencies
    Eigen::MatrixXd shapes;   // columns M-orthonormal, largest-entry-positive
};

// Generalized symmetric eigensolve for diagonal positive M (the shear model):
// A = M^{-1/2} K M^{-1/2}, cyclic Jacobi sweeps until the off-diagonal
// Frobenius norm falls below 1e-12 of the matrix scale.
ModalSolution eigensolve(const Eigen::Ref<const Eigen::MatrixXd>& K,
                         const Eigen::Ref<const Eigen::MatrixXd>& M);

// Modal assurance criterion (a'b)^2 / ((a'a)(b'b)).
double mac(const Eigen::Ref<const Eigen::VectorXd>& a,
           const Eigen::Ref<const Eigen::VectorXd>& b);

// Observed modal data: per mode one frequency and one unit-norm shape with
// the largest-magnitude entry positive; cov_diag matches the stacked layout
// [f_1, shape_1..., f_2, shape_2, ...].
struct ModalData {
    Eigen::VectorXd freq_hz;
    Eigen::MatrixXd shapes;
    Eigen::VectorXd cov_diag;

    Eigen::Index n_modes() const { return freq_hz.size(); }
};

// Gaussian modal likelihood: computed modes are paired to data modes by
// greedy maximum-MAC matching with sign alignment, stacked in data order, and
// scored as -(d - m(theta))' C^{-1} (d - m(theta)) / 2. Infeasible theta
// (non-positive multipliers) scores -inf.
double modal_loglik(const ShearBuilding& b, const ModalData& data,
                    const Eigen::Ref<const Eigen::VectorXd>& theta);

struct FemCase {
    ShearBuilding building;
    Eigen::VectorXd theta_true;
    ModalData data;
    int pattern = 0;
};

// Damage patterns: 0 intact, 1 story 1 stiffness at 0.6, 2 stories 1 and 3 at
// 0.6. Data are the true modes of theta_true plus zero-mean Gaussian noise
// scaled by noise_cov_scale (frequencies: 0.5% c.o.v.; shape entries:
// sigma = 0.01); the reported covariance stays at the unscaled base values.
FemCase make_case(int pattern, double noise_cov_scale, RngStream& rng);

std::unique_ptr<TargetModel> make_fem_model(const FemCase& c);

}  // namespace semis
