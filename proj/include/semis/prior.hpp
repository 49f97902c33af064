#pragma once

// Independent prior marginals and the probability transform to standard
// normal coordinates: theta_j = F_j^{-1}(Phi(u_j)). All MCMC runs in u-space;
// physical parameters only appear at likelihood evaluations and in outputs.

#include <Eigen/Core>

#include <vector>

namespace semis {

enum class MarginalKind { uniform, normal };

struct Marginal {
    MarginalKind kind = MarginalKind::uniform;
    double a = 0.0;      // uniform lower bound
    double b = 1.0;      // uniform upper bound
    double mu = 0.0;     // normal mean
    double sigma = 1.0;  // normal std

    static Marginal Uniform(double a, double b);
    static Marginal Normal(double mu, double sigma);
};

struct PriorSpec {
    std::vector<Marginal> marginals;

    Eigen::Index dim() const { return static_cast<Eigen::Index>(marginals.size()); }
    static PriorSpec iid_uniform(Eigen::Index n, double a, double b);
};

class ProbTransform {
   public:
    explicit ProbTransform(PriorSpec prior);

    Eigen::Index dim() const { return prior_.dim(); }
    const PriorSpec& prior() const { return prior_; }

    // u -> theta. Finite u always maps into the prior support.
    Eigen::VectorXd to_physical(const Eigen::Ref<const Eigen::VectorXd>& u) const;

    // theta -> u. Inverse of to_physical; uses the better-conditioned tail of
    // each uniform marginal. Support boundaries map to +/-inf.
    Eigen::VectorXd to_standard(const Eigen::Ref<const Eigen::VectorXd>& theta) const;

    // ln |dT/du| (u) = sum_j [ ln phi(u_j) - ln pi_j(T_j(u_j)) ].
    // Kept as a diagnostic: with this transform pi(T(u)) |dT/du| = phi_n(u)
    // identically, so the slice sampler does not need it.
    double log_jacobian(const Eigen::Ref<const Eigen::VectorXd>& u) const;

   private:
    PriorSpec prior_;
};

}  // namespace semis
