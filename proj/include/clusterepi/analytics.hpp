#pragma once

// Branching-process predictions for two-strain spreading on clustered graphs:
// triangle endpoint configurations, emergence probability, the linearized
// threshold matrix and the single-strain size heuristic.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include "degree_models.hpp"
#include "spread_sim.hpp"

namespace clusterepi {

/// Probabilities of the six endpoint configurations of a triangle whose
/// parent carries strain i (row i):
///   0 none infected, 1 one endpoint strain-1, 2 both strain-1,
///   3 one endpoint strain-2, 4 both strain-2, 5 one of each.
struct ConfigProbs {
    std::array<std::array<double, 6>, 2> p{};

    double operator()(std::size_t parent, std::size_t config) const { return p[parent][config]; }
};

inline ConfigProbs triangle_config_probs(const StrainParams& params) {
    const auto& T = params.T;
    const auto& mu = params.mu;
    ConfigProbs out;
    for (std::size_t i = 0; i < 2; ++i) {
        const double Ti = T[i];
        const double a1 = Ti * mu[i][0];  // direct hit landing as strain 1
        const double a2 = Ti * mu[i][1];
        const double miss = 1.0 - Ti;
        auto& row = out.p[i];
        row[0] = miss * miss;
        row[1] = 2.0 * a1 * miss * (1.0 - T[0]);
        row[2] = a1 * a1 + 2.0 * a1 * miss * T[0] * mu[0][0];
        row[3] = 2.0 * a2 * miss * (1.0 - T[1]);
        row[4] = a2 * a2 + 2.0 * a2 * miss * T[1] * mu[1][1];
        row[5] = 2.0 * (a1 * a2 + a1 * miss * T[0] * mu[0][1] + a2 * miss * T[1] * mu[1][0]);
    }
    return out;
}

/// Single-edge kernel: Pi(i,j) = T_i mu_ij.
inline Eigen::Matrix2d pi_matrix(const StrainParams& params) {
    Eigen::Matrix2d m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            m(i, j) = params.T[static_cast<std::size_t>(i)] *
                      params.mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

/// Mean number of strain-j triangle endpoints produced by a strain-i parent.
inline Eigen::Matrix2d delta_matrix(const StrainParams& params) {
    const auto c = triangle_config_probs(params);
    Eigen::Matrix2d m;
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& p = c.p[i];
        m(static_cast<int>(i), 0) = p[1] + 2.0 * p[2] + p[5];
        m(static_cast<int>(i), 1) = p[3] + 2.0 * p[4] + p[5];
    }
    return m;
}

/// Largest eigenvalue modulus, via a dense eigen-decomposition.
inline double spectral_radius(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("spectral_radius: matrix must be square");
    if (!m.allFinite()) throw std::invalid_argument("spectral_radius: non-finite entry");
    if (m.rows() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("spectral_radius: eigenvalue computation failed");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

class DegenerateModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Linearization of the fixed-point map at h = g = 1, in (h1, h2, g1, g2) order.
struct JacobianMatrix {
    Eigen::Matrix4d values = Eigen::Matrix4d::Zero();

    double spectral_radius() const { return clusterepi::spectral_radius(values); }
};

inline JacobianMatrix jacobian(const JointDegreeModel& model, const StrainParams& params) {
    const MomentSet m = model.moments();
    if (m.mean_s <= 0.0 && m.mean_t <= 0.0)
        throw DegenerateModelError("jacobian: model has neither single-edges nor triangles");
    // A missing edge type contributes nothing to the linearization.
    const double beta_s = m.mean_s > 0.0 ? (m.ex2_s - m.mean_s) / m.mean_s : 0.0;
    const double cross_s = m.mean_s > 0.0 ? m.cross / m.mean_s : 0.0;
    const double beta_t = m.mean_t > 0.0 ? (m.ex2_t - m.mean_t) / m.mean_t : 0.0;
    const double cross_t = m.mean_t > 0.0 ? m.cross / m.mean_t : 0.0;

    const Eigen::Matrix2d pi = pi_matrix(params);
    const Eigen::Matrix2d delta = delta_matrix(params);
    JacobianMatrix J;
    J.values.block<2, 2>(0, 0) = beta_s * pi;
    J.values.block<2, 2>(0, 2) = cross_s * pi;
    J.values.block<2, 2>(2, 0) = cross_t * delta;
    J.values.block<2, 2>(2, 2) = beta_t * delta;
    return J;
}

inline double threshold_rho(const JointDegreeModel& model, const StrainParams& params) {
    return jacobian(model, params).spectral_radius();
}

/// Closed-form rho(J) for one-step irreversible mutation (mu22 = 1) on a
/// doubly Poisson network. Requires lambda_s > 0.
inline double one_step_irreversible_rho(double lambda_s, double lambda_t, double t2) {
    if (!(lambda_s > 0.0) || !(lambda_t >= 0.0) || !(t2 >= 0.0 && t2 <= 1.0))
        throw std::invalid_argument(
            "one_step_irreversible_rho: need lambda_s > 0, lambda_t >= 0, T2 in [0,1]");
    return lambda_s * t2 * (1.0 + (2.0 * lambda_t / lambda_s) * (1.0 - t2 * t2 + t2));
}

/// Same as above, checking that (model, params) is in the closed form's domain.
inline double one_step_irreversible_rho(const DoublyPoisson& model, const StrainParams& params) {
    params.validate();
    if (params.mu[1][1] != 1.0 || params.mu[1][0] != 0.0)
        throw std::invalid_argument("one_step_irreversible_rho: requires mu22 = 1, mu21 = 0");
    if (!(params.T[0] < params.T[1]))
        throw std::invalid_argument("one_step_irreversible_rho: requires T1 < T2");
    return one_step_irreversible_rho(model.lambda_s, model.lambda_t, params.T[1]);
}

struct SolverOptions {
    double tolerance = 1e-12;
    std::uint64_t max_iterations = 1'000'000;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual, std::uint64_t iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
    double residual() const { return residual_; }
    std::uint64_t iterations() const { return iterations_; }

private:
    double residual_;
    std::uint64_t iterations_;
};

struct EmergenceSolution {
    std::array<double, 2> h{1.0, 1.0};  // extinction along a single-edge from strain i
    std::array<double, 2> g{1.0, 1.0};  // extinction along a triangle from strain i
    std::array<double, 2> prob_emergence{0.0, 0.0};  // indexed by seed strain
    std::uint64_t iterations = 0;
    double residual = 0.0;
    bool decomposable = false;

    double pe(Strain seed) const { return prob_emergence[index(seed)]; }
};

/// Extinction state (h1, h2, g1, g2).
using ExtinctionState = std::array<double, 4>;

/// One application of the extinction-probability equations: h_i from the
/// single-edge recursion, g_i from the triangle configurations.
inline ExtinctionState extinction_map(const JointDegreeModel& model, const StrainParams& params,
                                      const ConfigProbs& cp, const ExtinctionState& x) {
    const auto& T = params.T;
    const auto& mu = params.mu;
    const PgfTerms f1 = model.pgf_terms(x[0], x[2]);
    const PgfTerms f2 = model.pgf_terms(x[1], x[3]);
    ExtinctionState y{};
    for (std::size_t i = 0; i < 2; ++i) {
        y[i] = 1.0 - T[i] + T[i] * (mu[i][0] * f1.edge + mu[i][1] * f2.edge);
        const auto& p = cp.p[i];
        y[2 + i] = p[0] + p[1] * f1.tri + p[2] * f1.tri * f1.tri + p[3] * f2.tri +
                   p[4] * f2.tri * f2.tri + p[5] * f1.tri * f2.tri;
    }
    for (double& v : y) v = std::clamp(v, 0.0, 1.0);
    return y;
}

inline ExtinctionState extinction_map(const JointDegreeModel& model, const StrainParams& params,
                                      const ExtinctionState& x) {
    return extinction_map(model, params, triangle_config_probs(params), x);
}

/// Smallest non-negative fixed point of the extinction equations, reached by
/// monotone iteration from zero, and the per-seed-strain emergence probability.
inline EmergenceSolution emergence_probability(const JointDegreeModel& model,
                                               const StrainParams& params,
                                               const SolverOptions& opts = {}) {
    params.validate();
    const ConfigProbs cp = triangle_config_probs(params);
    using State = ExtinctionState;
    auto step = [&](const State& x) { return extinction_map(model, params, cp, x); };
    auto sup_diff = [](const State& a, const State& b) {
        double d = 0.0;
        for (std::size_t k = 0; k < 4; ++k) d = std::max(d, std::abs(a[k] - b[k]));
        return d;
    };

    State x{0.0, 0.0, 0.0, 0.0};
    double residual = 1.0;
    std::uint64_t it = 0;
    while (it < opts.max_iterations) {
        const State y = step(x);
        ++it;
        residual = sup_diff(x, y);
        x = y;
        if (residual <= opts.tolerance) break;
    }
    if (residual > opts.tolerance)
        throw ConvergenceError("emergence_probability: fixed point did not converge", residual, it);

    EmergenceSolution sol;
    sol.h = {x[0], x[1]};
    sol.g = {x[2], x[3]};
    for (std::size_t i = 0; i < 2; ++i)
        sol.prob_emergence[i] = std::clamp(1.0 - model.pgf_terms(x[i], x[2 + i]).G, 0.0, 1.0);
    sol.iterations = it;
    sol.residual = residual;
    sol.decomposable = params.decomposable();
    return sol;
}

/// A one-parameter curve of degree models, e.g. lambda -> DoublyPoisson(lambda, lambda).
using ModelFamily = std::function<JointDegreeModel(double)>;

inline ModelFamily doubly_poisson_diagonal() {
    return [](double lambda) { return JointDegreeModel(DoublyPoisson{lambda, lambda}); };
}

inline ModelFamily cluster_tunable_family(double c) {
    return [c](double lambda) { return JointDegreeModel(ClusterTunable{lambda, c}); };
}

/// Bisects the family parameter to the point where rho(J) = 1.
inline double critical_parameter(const ModelFamily& family, const StrainParams& params, double lo,
                                 double hi, double rho_tolerance = 1e-9) {
    if (!(lo < hi)) throw std::invalid_argument("critical_parameter: need lo < hi");
    auto excess = [&](double x) { return threshold_rho(family(x), params) - 1.0; };
    const double f_lo = excess(lo);
    const double f_hi = excess(hi);
    if (!(f_lo < 0.0 && f_hi > 0.0))
        throw std::invalid_argument("critical_parameter: rho(J) does not cross 1 inside bracket");
    for (int k = 0; k < 400; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double f = excess(mid);
        if (std::abs(f) < rho_tolerance) return mid;
        if (mid <= lo || mid >= hi) return mid;
        (f < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Collapse onto one strain with transmissibility rho(Pi).
inline double effective_transmissibility(const StrainParams& params) {
    return spectral_radius(pi_matrix(params));
}

/// Predicted conditional epidemic size: emergence probability of the collapsed
/// single-strain process, which equals its giant-component fraction since
/// uniform transmissibility makes percolation symmetric.
inline double size_heuristic(const JointDegreeModel& model, const StrainParams& params,
                             const SolverOptions& opts = {}) {
    params.validate();
    const double t = std::clamp(effective_transmissibility(params), 0.0, 1.0);
    const auto collapsed = StrainParams::make(t, t, 1.0, 0.0, 0.0, 1.0);
    return emergence_probability(model, collapsed, opts).prob_emergence[0];
}

/// Mean progeny matrix divided by the excess degree, over types
/// {1,1}, {1,2}, {2,1}, {2,2} (infecting strain, strain after mutation).
inline Eigen::Matrix4d progeny_mean_matrix(const StrainParams& params) {
    const auto& T = params.T;
    const auto& mu = params.mu;
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    // A type carries the strain given by its second index.
    for (int row = 0; row < 4; ++row) {
        const std::size_t carried = static_cast<std::size_t>(row % 2);
        const int col0 = static_cast<int>(2 * carried);
        m(row, col0) = T[carried] * mu[carried][0];
        m(row, col0 + 1) = T[carried] * mu[carried][1];
    }
    return m;
}

}  // namespace clusterepi
