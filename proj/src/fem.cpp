#include "semis/fem.hpp"

#include "semis/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace semis {

namespace {

constexpr double kFreqCov = 0.005;   // frequency noise c.o.v.
constexpr double kShapeSigma = 0.01; // mode-shape entry noise std

void sign_align_largest(Eigen::MatrixXd& shapes) {
    for (Eigen::Index j = 0; j < shapes.cols(); ++j) {
        Eigen::Index imax = 0;
        shapes.col(j).cwiseAbs().maxCoeff(&imax);
        if (shapes(imax, j) < 0.0) shapes.col(j) = -shapes.col(j);
    }
}

}  // namespace

ShearBuilding four_story_nominal() {
    ShearBuilding b;
    b.k_story = Eigen::VectorXd::Constant(4, 2.0e7);
    b.m_floor = Eigen::VectorXd::Constant(4, 1.0e4);
    return b;
}

PriorSpec fem_prior(Eigen::Index n_stories) {
    PriorSpec p;
    for (Eigen::Index i = 0; i < n_stories; ++i)
        p.marginals.push_back(Marginal::Uniform(0.0, 1.5));
    for (Eigen::Index i = 0; i < n_stories; ++i)
        p.marginals.push_back(Marginal::Uniform(0.9, 1.1));
    return p;
}

void assemble(const ShearBuilding& b, const Eigen::Ref<const Eigen::VectorXd>& theta,
              Eigen::MatrixXd& K, Eigen::MatrixXd& M) {
    const Eigen::Index n = b.n_stories();
    if (theta.size() != 2 * n) throw std::invalid_argument("assemble: theta must have 2n entries");
    for (Eigen::Index i = 0; i < 2 * n; ++i)
        if (!(theta[i] > 0.0)) throw std::invalid_argument("assemble: non-positive multiplier");

    Eigen::VectorXd k = b.k_story.cwiseProduct(theta.head(n));
    K.setZero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = k[i] + (i + 1 < n ? k[i + 1] : 0.0);
        if (i + 1 < n) {
            K(i, i + 1) = -k[i + 1];
            K(i + 1, i) = -k[i + 1];
        }
    }
    M = b.m_floor.cwiseProduct(theta.tail(n)).asDiagonal();
}

ModalSolution eigensolve(const Eigen::Ref<const Eigen::MatrixXd>& K,
                         const Eigen::Ref<const Eigen::MatrixXd>& M) {
    const Eigen::Index n = K.rows();
    if (K.cols() != n || M.rows() != n || M.cols() != n)
        throw std::invalid_argument("eigensolve: dimension mismatch");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(M(i, i) > 0.0)) throw std::invalid_argument("eigensolve: mass must be positive");
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && M(i, j) != 0.0)
                throw std::invalid_argument("eigensolve: mass matrix must be diagonal");
    }

    const Eigen::VectorXd m_inv_sqrt = M.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd A = m_inv_sqrt.asDiagonal() * K * m_inv_sqrt.asDiagonal();
    A = 0.5 * (A + A.transpose());  // kill asymmetric rounding residue
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);

    const double scale = A.norm();
    const double tol = 1e-12 * std::max(scale, 1.0);
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off2 = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off2 += 2.0 * A(p, q) * A(p, q);
        if (std::sqrt(off2) <= tol) break;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (apq == 0.0) continue;
                const double tau = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // A <- J' A J with the Givens rotation in the (p,q) plane.
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double aip = A(i, p), aiq = A(i, q);
                    A(i, p) = c * aip - s * aiq;
                    A(i, q) = s * aip + c * aiq;
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double api = A(p, i), aqi = A(q, i);
                    A(p, i) = c * api - s * aqi;
                    A(q, i) = s * api + c * aqi;
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double vip = V(i, p), viq = V(i, q);
                    V(i, p) = c * vip - s * viq;
                    V(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    // Ascending eigenvalue order.
    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return A(a, a) < A(b, b); });

    ModalSolution sol;
    sol.freq_hz.resize(n);
    sol.shapes.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index src = order[static_cast<size_t>(j)];
        const double lambda = A(src, src);
        if (!(lambda > 0.0))
            throw std::runtime_error("eigensolve: non-positive eigenvalue (structure not stable)");
        sol.freq_hz[j] = std::sqrt(lambda) / (2.0 * M_PI);
        sol.shapes.col(j) = m_inv_sqrt.asDiagonal() * V.col(src);  // M-orthonormal
    }
    sign_align_largest(sol.shapes);
    return sol;
}

double mac(const Eigen::Ref<const Eigen::VectorXd>& a,
           const Eigen::Ref<const Eigen::VectorXd>& b) {
    const double num = a.dot(b);
    const double den = a.squaredNorm() * b.squaredNorm();
    if (!(den > 0.0)) throw std::invalid_argument("mac: zero vector");
    return num * num / den;
}

double modal_loglik(const ShearBuilding& b, const ModalData& data,
                    const Eigen::Ref<const Eigen::VectorXd>& theta) {
    const Eigen::Index n = b.n_stories();
    for (Eigen::Index i = 0; i < theta.size(); ++i)
        if (!(theta[i] > 0.0)) return kNegInf;

    Eigen::MatrixXd K, M;
    assemble(b, theta, K, M);
    ModalSolution sol;
    try {
        sol = eigensolve(K, M);
    } catch (const std::runtime_error&) {
        return kNegInf;  // numerically infeasible configuration
    }

    const Eigen::Index m = data.n_modes();
    if (m > n) throw std::invalid_argument("modal_loglik: more data modes than model modes");

    // Greedy maximum-MAC pairing of computed modes to data modes.
    Eigen::MatrixXd macs(m, n);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index c = 0; c < n; ++c) macs(a, c) = mac(data.shapes.col(a), sol.shapes.col(c));
    std::vector<Eigen::Index> match(static_cast<size_t>(m), -1);
    std::vector<bool> data_used(static_cast<size_t>(m), false), comp_used(static_cast<size_t>(n), false);
    for (Eigen::Index pick = 0; pick < m; ++pick) {
        double best = -1.0;
        Eigen::Index ba = -1, bc = -1;
        for (Eigen::Index a = 0; a < m; ++a) {
            if (data_used[static_cast<size_t>(a)]) continue;
            for (Eigen::Index c = 0; c < n; ++c) {
                if (comp_used[static_cast<size_t>(c)]) continue;
                if (macs(a, c) > best) {
                    best = macs(a, c);
                    ba = a;
                    bc = c;
                }
            }
        }
        data_used[static_cast<size_t>(ba)] = true;
        comp_used[static_cast<size_t>(bc)] = true;
        match[static_cast<size_t>(ba)] = bc;
    }

    // Stack [f, shape...] per data mode with unit-norm, sign-aligned shapes.
    double s = 0.0;
    Eigen::Index pos = 0;
    for (Eigen::Index a = 0; a < m; ++a) {
        const Eigen::Index c = match[static_cast<size_t>(a)];
        Eigen::VectorXd shape = sol.shapes.col(c) / sol.shapes.col(c).norm();
        if (shape.dot(data.shapes.col(a)) < 0.0) shape = -shape;
        const double df = data.freq_hz[a] - sol.freq_hz[c];
        s += df * df / data.cov_diag[pos];
        ++pos;
        for (Eigen::Index i = 0; i < n; ++i, ++pos) {
            const double d = data.shapes(i, a) - shape[i];
            s += d * d / data.cov_diag[pos];
        }
    }
    return -0.5 * s;
}

FemCase make_case(int pattern, double noise_cov_scale, RngStream& rng) {
    if (pattern < 0 || pattern > 2) throw std::invalid_argument("make_case: pattern must be 0..2");
    if (noise_cov_scale < 0.0) throw std::invalid_argument("make_case: negative noise scale");

    FemCase c;
    c.pattern = pattern;
    c.building = four_story_nominal();
    const Eigen::Index n = c.building.n_stories();
    c.theta_true = Eigen::VectorXd::Ones(2 * n);
    if (pattern >= 1) c.theta_true[0] = 0.6;
    if (pattern == 2) c.theta_true[2] = 0.6;

    Eigen::MatrixXd K, M;
    assemble(c.building, c.theta_true, K, M);
    const ModalSolution sol = eigensolve(K, M);

    c.data.freq_hz = sol.freq_hz;
    c.data.shapes.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) c.data.shapes.col(j) = sol.shapes.col(j) / sol.shapes.col(j).norm();
    sign_align_largest(c.data.shapes);

    c.data.cov_diag.resize(n * (n + 1));
    Eigen::Index pos = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double sf = kFreqCov * sol.freq_hz[j];
        c.data.cov_diag[pos++] = sf * sf;
        for (Eigen::Index i = 0; i < n; ++i) c.data.cov_diag[pos++] = kShapeSigma * kShapeSigma;
    }

    if (noise_cov_scale > 0.0) {
        const double root = std::sqrt(noise_cov_scale);
        for (Eigen::Index j = 0; j < n; ++j) {
            c.data.freq_hz[j] += root * kFreqCov * sol.freq_hz[j] * rng.normal();
            for (Eigen::Index i = 0; i < n; ++i)
                c.data.shapes(i, j) += root * kShapeSigma * rng.normal();
            c.data.shapes.col(j) /= c.data.shapes.col(j).norm();
        }
        sign_align_largest(c.data.shapes);
    }
    return c;
}

std::unique_ptr<TargetModel> make_fem_model(const FemCase& c) {
    const ShearBuilding building = c.building;
    const ModalData data = c.data;
    return std::make_unique<TargetModel>(
        fem_prior(building.n_stories()),
        [building, data](const Eigen::VectorXd& theta) {
            return modal_loglik(building, data, theta);
        },
        "fem-pattern-" + std::to_string(c.pattern));
}

}  // namespace semis
