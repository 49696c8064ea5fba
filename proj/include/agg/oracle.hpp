#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "agg/dictionary.hpp"
#include "agg/penalty.hpp"

namespace agg {

/// Noiseless oracle risk inf ||f_lambda - f||_n^2 over one aggregation class.
struct OracleResult {
    RateKind kind = RateKind::MS;
    double value = 0.0;       // squared empirical norm
    WeightVector argmin;
    double certificate = 0.0; // duality gap for C; 0 for exactly solved kinds
};

/// Best single dictionary function; ties go to the smallest index.
OracleResult ms_oracle(const Dictionary& dict, const Eigen::VectorXd& f_vals);

/// Best d-sparse linear combination, exhaustive over supports of size <= d.
OracleResult s_oracle(const Dictionary& dict, const Eigen::VectorXd& f_vals, int d);

/// Best linear combination (minimum-norm least squares on all columns).
OracleResult l_oracle(const Dictionary& dict, const Eigen::VectorXd& f_vals);

/// Best convex combination over {lambda >= 0, sum lambda <= 1} via away-step
/// Frank-Wolfe; stops when the duality gap is <= gap_tol.
OracleResult c_oracle(const Dictionary& dict, const Eigen::VectorXd& f_vals,
                      double gap_tol = 1e-8);

/// Randomized rounding of a simplex point onto the 1/m grid: samples m i.i.d.
/// indices from (1 - sum lambda*, lambda*_1, ..., lambda*_M) and returns the
/// empirical frequencies of indices 1..M.
WeightVector maurey_round(const WeightVector& lambda_star, int m, std::uint64_t seed);

/// Exact E||f_bar_m - f||_n^2 for the rounding above:
/// ||f_{lambda*} - f||_n^2 + (1/m) (sum_j lambda*_j ||f_j||_n^2 - ||f_{lambda*}||_n^2).
double maurey_expected_risk(const Dictionary& dict, const Eigen::VectorXd& f_vals,
                            const WeightVector& lambda_star, int m);

}  // namespace agg
