#pragma once

#include <Eigen/Dense>
#include <optional>

#include "agg/bic_solver.hpp"
#include "agg/dictionary.hpp"
#include "agg/penalty.hpp"

namespace agg {

struct CdSettings {
    double tol = 1e-8;               // max allowed stationarity violation
    int max_sweeps = 100000;
    std::optional<WeightVector> initial;  // warm start; default cold start at 0
};

/// sign(z) * max(|z| - t, 0).
double soft_threshold(double z, double t);

/// Cyclic coordinate descent for S_hat(lambda) + sum_j w_j |lambda_j|.
/// Columns with zero empirical norm are frozen at 0. The returned solution
/// carries a stationarity certificate: every coordinate violation <= tol.
/// Throws ConvergenceError when max_sweeps is reached uncertified.
Solution solve_l1_cd(const Dictionary& dict, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& weights, const CdSettings& settings = {});

/// Per-coordinate stationarity violations: with g_j = (2/n)<f_j, y - f_lambda>,
/// |g_j - w_j sign(lambda_j)| for nonzero coordinates and max(|g_j| - w_j, 0)
/// for zero ones. Zero-norm columns report 0.
Eigen::VectorXd kkt_report(const Dictionary& dict, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& weights, const WeightVector& lambda);

/// True iff 32 * rho(lambda) * M(lambda) <= 1; lambda = 0 passes trivially.
bool check_coherence_condition(const GramData& gd, const WeightVector& lambda);

}  // namespace agg
