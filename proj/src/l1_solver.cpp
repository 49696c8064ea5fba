#include "agg/l1_solver.hpp"

#include <cassert>
#include <cmath>

namespace agg {

double soft_threshold(double z, double t) {
    if (t < 0.0) throw DomainError("soft_threshold: negative threshold");
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

namespace {

double l1_objective(int n, const Eigen::VectorXd& resid, const Eigen::VectorXd& weights,
                    const Eigen::VectorXd& lambda) {
    return resid.squaredNorm() / n + weights.dot(lambda.cwiseAbs());
}

Eigen::VectorXd violations(const Dictionary& dict, const Eigen::VectorXd& resid,
                           const Eigen::VectorXd& weights, const Eigen::VectorXd& lambda,
                           const Eigen::VectorXd& col_norms_sq) {
    const int m = dict.m_dict();
    Eigen::VectorXd v(m);
    for (int j = 0; j < m; ++j) {
        if (col_norms_sq(j) == 0.0) {
            v(j) = 0.0;
            continue;
        }
        const double g = 2.0 / dict.n() * dict.column(j).dot(resid);
        if (lambda(j) != 0.0) {
            v(j) = std::abs(g - weights(j) * (lambda(j) > 0.0 ? 1.0 : -1.0));
        } else {
            v(j) = std::max(std::abs(g) - weights(j), 0.0);
        }
    }
    return v;
}

}  // namespace

Solution solve_l1_cd(const Dictionary& dict, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& weights, const CdSettings& settings) {
    const int n = dict.n();
    const int m = dict.m_dict();
    if (y.size() != n) throw DimensionError("solve_l1_cd: y length != n");
    if (weights.size() != m) throw DimensionError("solve_l1_cd: weights length != M");
    if (weights.minCoeff() < 0.0) throw DomainError("solve_l1_cd: negative weight");
    if (settings.tol <= 0.0) throw DomainError("solve_l1_cd: tol must be > 0");
    if (settings.max_sweeps < 1) throw DomainError("solve_l1_cd: max_sweeps must be >= 1");

    Eigen::VectorXd col_norms_sq(m);
    for (int j = 0; j < m; ++j) col_norms_sq(j) = dict.column(j).squaredNorm() / n;
    const double max_norm_sq = col_norms_sq.maxCoeff();
    for (int j = 0; j < m; ++j) {
        if (col_norms_sq(j) <= 1e-24 * max_norm_sq) col_norms_sq(j) = 0.0;
    }

    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
    if (settings.initial) {
        if (settings.initial->size() != m) throw DimensionError("solve_l1_cd: bad warm start size");
        lambda = settings.initial->coeffs();
        for (int j = 0; j < m; ++j) {
            if (col_norms_sq(j) == 0.0) lambda(j) = 0.0;  // frozen
        }
    }
    Eigen::VectorXd resid = y - dict.values() * lambda;

#ifndef NDEBUG
    double prev_obj = l1_objective(n, resid, weights, lambda);
#endif

    int sweeps = 0;
    double worst = 0.0;
    for (; sweeps < settings.max_sweeps; ++sweeps) {
        for (int j = 0; j < m; ++j) {
            if (col_norms_sq(j) == 0.0) continue;
            // z_j = (1/n) <f_j, r_{-j}> with r_{-j} the residual excluding column j.
            const double z = dict.column(j).dot(resid) / n + lambda(j) * col_norms_sq(j);
            const double new_val = soft_threshold(z, weights(j) / 2.0) / col_norms_sq(j);
            const double delta = new_val - lambda(j);
            if (delta != 0.0) {
                resid -= dict.column(j) * delta;
                lambda(j) = new_val;
            }
        }
#ifndef NDEBUG
        const double obj = l1_objective(n, resid, weights, lambda);
        assert(obj <= prev_obj + 1e-10 * (1.0 + std::abs(prev_obj)));
        prev_obj = obj;
#endif
        worst = violations(dict, resid, weights, lambda, col_norms_sq).maxCoeff();
        if (worst <= settings.tol) break;
    }
    if (worst > settings.tol) {
        throw ConvergenceError("solve_l1_cd: max_sweeps reached, worst violation " +
                                   std::to_string(worst),
                               worst);
    }

    Solution sol;
    sol.lambda_hat = WeightVector::snapped(lambda);
    Eigen::VectorXd snapped_resid = y - dict.values() * sol.lambda_hat.coeffs();
    sol.rss_over_n = snapped_resid.squaredNorm() / n;
    sol.penalty_value = pen_l1(sol.lambda_hat, weights);
    sol.objective = sol.rss_over_n + sol.penalty_value;
    sol.search_stats = {sweeps + 1, SearchMode::CoordinateDescent};
    return sol;
}

Eigen::VectorXd kkt_report(const Dictionary& dict, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& weights, const WeightVector& lambda) {
    const int n = dict.n();
    const int m = dict.m_dict();
    if (y.size() != n) throw DimensionError("kkt_report: y length != n");
    if (weights.size() != m || lambda.size() != m) throw DimensionError("kkt_report: size mismatch");
    Eigen::VectorXd col_norms_sq(m);
    for (int j = 0; j < m; ++j) col_norms_sq(j) = dict.column(j).squaredNorm() / n;
    const double max_norm_sq = col_norms_sq.maxCoeff();
    for (int j = 0; j < m; ++j) {
        if (col_norms_sq(j) <= 1e-24 * max_norm_sq) col_norms_sq(j) = 0.0;
    }
    Eigen::VectorXd resid = y - dict.values() * lambda.coeffs();
    return violations(dict, resid, weights, lambda.coeffs(), col_norms_sq);
}

bool check_coherence_condition(const GramData& gd, const WeightVector& lambda) {
    if (lambda.m_of_lambda() == 0) return true;
    const double rho = rho_of_support(gd, lambda.support());
    return 32.0 * rho * lambda.m_of_lambda() <= 1.0;
}

}  // namespace agg
