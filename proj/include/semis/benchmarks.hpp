#pragma once

// Analytic benchmark targets with known log evidence:
//   eggbox  - ln L = (2 + cos(t1/2) cos(t2/2))^5 on Uniform(0, 10*pi)^2
//   shells  - two Gaussian shells (radius 2, width 0.1, centers +/-3.5 e1)
//             on Uniform(-6, 6)^n
//   nlg     - product of normal / log-gamma factors on Uniform(-30, 30)^n:
//             coord 1 a LogGamma(+/-10) mixture, coord 2 a normal mixture,
//             coords 3..floor((n+2)/2) LogGamma(10), the rest Normal(10,1)

#include "semis/model.hpp"

#include <Eigen/Core>

#include <memory>
#include <optional>
#include <string>

namespace semis {

enum class ExampleId { eggbox, shells, nlg };

std::string to_string(ExampleId id);
ExampleId example_from_string(const std::string& s);

double loglik_eggbox(const Eigen::Ref<const Eigen::VectorXd>& theta);
double loglik_shells(const Eigen::Ref<const Eigen::VectorXd>& theta);
double loglik_nlg(const Eigen::Ref<const Eigen::VectorXd>& theta);

PriorSpec benchmark_prior(ExampleId id, Eigen::Index dim);
std::unique_ptr<TargetModel> make_benchmark(ExampleId id, Eigen::Index dim);

// Tabulated reference ln z where available (eggbox 2; shells 2/10/30;
// nlg 2/5/10/20). Empty otherwise.
std::optional<double> reference_log_evidence(ExampleId id, Eigen::Index dim);

// Posterior marginal cdf of coordinate `coord` (0-based) of the nlg target,
// truncated to the prior box [-30, 30].
double nlg_marginal_cdf(Eigen::Index coord, Eigen::Index dim, double x);

}  // namespace semis
