#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "agg/bic_solver.hpp"
#include "agg/dictionary.hpp"
#include "agg/l1_solver.hpp"
#include "agg/penalty.hpp"

namespace agg {

struct NoiseModel {
    double sigma = 1.0;        // noise standard deviation, > 0
    std::uint64_t seed = 0;

    void validate() const {
        if (sigma <= 0.0) throw DomainError("NoiseModel: sigma must be > 0");
    }
};

struct IneqReport {
    double lhs = 0.0;         // Monte Carlo estimate of E||f_tilde - f||_n^2
    double lhs_stderr = 0.0;
    double rhs = 0.0;         // risk-bound right-hand side
    double slack = 0.0;       // rhs - lhs
    int replicates = 0;
    bool violated = false;    // lhs - 2*stderr > rhs
};

struct McEstimate {
    double mean = 0.0;
    double std_err = 0.0;
};

using SolverFn = std::function<Solution(const Dictionary&, const Eigen::VectorXd& y)>;

/// Y_i = f_vals_i + W_i with W_i iid N(0, sigma^2), deterministic in the seed.
/// Warns on stderr when the target exceeds the dictionary bound.
Eigen::VectorXd generate_responses(const Dictionary& dict, const Eigen::VectorXd& f_vals,
                                   const NoiseModel& noise);

/// Monte Carlo risk of the solver over fresh replicates; replicate r uses
/// seed noise.seed ^ r.
McEstimate mc_risk(const Dictionary& dict, const Eigen::VectorXd& f_vals,
                   const NoiseModel& noise, const SolverFn& solver, int replicates);

/// Right-hand side of the BIC-type oracle inequality, with the infimum taken
/// exactly by per-support least squares on the noiseless target.
double rhs_bic(const Dictionary& dict, const Eigen::VectorXd& f_vals, double a,
               double sigma_sq);

/// Right-hand side of the weighted-l1 oracle inequality.
double rhs_l1(const Dictionary& dict, const Eigen::VectorXd& f_vals, double eps,
              double sigma_sq, double kappa, double bound_l);

IneqReport check_inequality(const McEstimate& lhs, double rhs, int replicates);

/// Unbiased sample variance of training responses; requires >= 2 values.
double estimate_sigma_sq(const Eigen::VectorXd& training_responses);

struct Instance {
    Dictionary dict;
    Eigen::VectorXd f_vals;
};

using InstanceBuilder = std::function<Instance(int n, int m)>;

/// Orthogonal design from disjoint index blocks, scaled to unit empirical
/// norm per column. Requires M <= n.
Dictionary make_block_orthogonal(int n, int m);

/// Random design with AR(1)-correlated Gaussian columns (correlation rho).
Dictionary make_correlated_gaussian(int n, int m, double rho, std::uint64_t seed);

/// Instance with zero oracle risk for the given aggregation class on the
/// block-orthogonal design.
Instance default_rate_instance(RateKind kind, int n, int m, int d = 2);

struct SweepRow {
    int n = 0;
    int m = 0;
    double risk = 0.0;
    double risk_stderr = 0.0;
    double psi = 0.0;
    double ratio = 0.0;  // risk / psi
};

std::vector<SweepRow> rate_sweep(RateKind kind, const std::vector<int>& n_grid,
                                 const std::vector<int>& m_grid, std::optional<int> d,
                                 const InstanceBuilder& builder, const SolverFn& solver,
                                 const NoiseModel& noise, int replicates);

/// Solver handles for mc_risk / rate_sweep.
SolverFn make_bic_solver(PenaltyConfig cfg, int max_support, bool greedy = false);
SolverFn make_l1_solver(PenaltyConfig cfg, CdSettings settings = {});

}  // namespace agg
