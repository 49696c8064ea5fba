#include "agg/sim.hpp"

#include <cmath>
#include <iostream>

#include "agg/rng.hpp"

namespace agg {

Eigen::VectorXd generate_responses(const Dictionary& dict, const Eigen::VectorXd& f_vals,
                                   const NoiseModel& noise) {
    noise.validate();
    if (f_vals.size() != dict.n()) throw DimensionError("generate_responses: f length != n");
    if (f_vals.cwiseAbs().maxCoeff() > dict.bound_l()) {
        std::cerr << "warning: target exceeds the dictionary bound L\n";
    }
    auto eng = make_engine(noise.seed);
    Eigen::VectorXd y(dict.n());
    for (int i = 0; i < dict.n(); ++i) {
        y(i) = f_vals(i) + noise.sigma * standard_normal(eng);
    }
    return y;
}

McEstimate mc_risk(const Dictionary& dict, const Eigen::VectorXd& f_vals,
                   const NoiseModel& noise, const SolverFn& solver, int replicates) {
    noise.validate();
    if (replicates < 2) throw DomainError("mc_risk: replicates must be >= 2");
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int r = 1; r <= replicates; ++r) {
        NoiseModel rep_noise{noise.sigma, noise.seed ^ static_cast<std::uint64_t>(r)};
        Eigen::VectorXd y = generate_responses(dict, f_vals, rep_noise);
        Solution sol;
        try {
            sol = solver(dict, y);
        } catch (const std::exception& e) {
            throw ConvergenceError("mc_risk: solver failed on replicate " + std::to_string(r) +
                                       ": " + e.what(),
                                   0.0);
        }
        const double risk =
            empirical_norm_sq(dict.values() * sol.lambda_hat.coeffs() - f_vals, dict.n());
        sum += risk;
        sum_sq += risk * risk;
    }
    McEstimate est;
    est.mean = sum / replicates;
    const double var = std::max(0.0, (sum_sq - sum * sum / replicates) / (replicates - 1));
    est.std_err = std::sqrt(var / replicates);
    return est;
}

double rhs_bic(const Dictionary& dict, const Eigen::VectorXd& f_vals, double a,
               double sigma_sq) {
    if (a <= 0.0) throw DomainError("rhs_bic: a must be > 0");
    const int n = dict.n();
    const int m_dict = dict.m_dict();
    double inf = std::numeric_limits<double>::infinity();
    for_each_support(m_dict, m_dict, [&](const std::vector<int>& support) {
        const int m = static_cast<int>(support.size());
        const double rss = ols_on_support(dict, f_vals, support).rss_over_n;
        const double bracket =
            rss + sigma_sq / n * (5.0 + (2.0 + 3.0 * a) / a * l_of_lambda(m, m_dict)) * m;
        inf = std::min(inf, bracket);
    });
    const double remainder =
        sigma_sq / n * 6.0 * (1.0 + a) * (1.0 + a) / (a * (std::exp(1.0) - 1.0));
    return (1.0 + a) * inf + remainder;
}

double rhs_l1(const Dictionary& dict, const Eigen::VectorXd& f_vals, double eps,
              double sigma_sq, double kappa, double bound_l) {
    if (eps <= 0.0) throw DomainError("rhs_l1: eps must be > 0");
    if (kappa <= 0.0) throw DomainError("rhs_l1: kappa must be > 0 (A3 fails)");
    const int n = dict.n();
    const int m_dict = dict.m_dict();
    const double log_mn = std::log(static_cast<double>(m_dict)) + std::log(static_cast<double>(n));
    double inf = std::numeric_limits<double>::infinity();
    for_each_support(m_dict, m_dict, [&](const std::vector<int>& support) {
        const int m = static_cast<int>(support.size());
        const double rss = ols_on_support(dict, f_vals, support).rss_over_n;
        const double val = (1.0 + eps) * rss +
                           8.0 * (4.0 + eps + 4.0 / eps) * sigma_sq * log_mn / (kappa * n) * m;
        inf = std::min(inf, val);
    });
    const double tail1 =
        (4.0 * bound_l * bound_l + 12.0 * sigma_sq) / (n * std::sqrt(M_PI * log_mn));
    const double tail2 =
        6.0 * sigma_sq * std::sqrt((n + 2.0) / n) * std::exp(-static_cast<double>(n) / 16.0);
    return inf + tail1 + tail2;
}

IneqReport check_inequality(const McEstimate& lhs, double rhs, int replicates) {
    if (replicates < 2) throw DomainError("check_inequality: replicates must be >= 2");
    IneqReport rep;
    rep.lhs = lhs.mean;
    rep.lhs_stderr = lhs.std_err;
    rep.rhs = rhs;
    rep.slack = rhs - lhs.mean;
    rep.replicates = replicates;
    rep.violated = lhs.mean - 2.0 * lhs.std_err > rhs;
    return rep;
}

double estimate_sigma_sq(const Eigen::VectorXd& training_responses) {
    const auto l = training_responses.size();
    if (l < 2) throw DomainError("estimate_sigma_sq: need at least 2 responses");
    const double mean = training_responses.mean();
    return (training_responses.array() - mean).square().sum() / (l - 1);
}

Dictionary make_block_orthogonal(int n, int m) {
    if (m > n) throw DomainError("make_block_orthogonal: M must be <= n");
    const int block = n / m;
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, m);
    const double amp = std::sqrt(static_cast<double>(n) / block);
    for (int j = 0; j < m; ++j) {
        for (int i = j * block; i < (j + 1) * block; ++i) values(i, j) = amp;
    }
    return Dictionary(std::move(values), amp);
}

Dictionary make_correlated_gaussian(int n, int m, double rho, std::uint64_t seed) {
    if (std::abs(rho) >= 1.0) throw DomainError("make_correlated_gaussian: |rho| must be < 1");
    auto eng = make_engine(seed);
    Eigen::MatrixXd values(n, m);
    const double fresh = std::sqrt(1.0 - rho * rho);
    for (int i = 0; i < n; ++i) {
        double prev = standard_normal(eng);
        values(i, 0) = prev;
        for (int j = 1; j < m; ++j) {
            prev = rho * prev + fresh * standard_normal(eng);
            values(i, j) = prev;
        }
    }
    return Dictionary(values, values.cwiseAbs().maxCoeff());
}

Instance default_rate_instance(RateKind kind, int n, int m, int d) {
    Dictionary dict = make_block_orthogonal(n, m);
    Eigen::VectorXd f_vals;
    switch (kind) {
        case RateKind::MS:
            f_vals = dict.column(0);
            break;
        case RateKind::S: {
            if (d < 1 || d > m) throw DomainError("default_rate_instance: bad d");
            f_vals = Eigen::VectorXd::Zero(n);
            for (int j = 0; j < d; ++j) f_vals += 0.5 * dict.column(j);
            break;
        }
        case RateKind::L:
            f_vals = dict.column(0) - dict.column(1);
            break;
        case RateKind::C:
            f_vals = 0.5 * dict.column(0) + 0.5 * dict.column(1);
            break;
    }
    return Instance{std::move(dict), std::move(f_vals)};
}

std::vector<SweepRow> rate_sweep(RateKind kind, const std::vector<int>& n_grid,
                                 const std::vector<int>& m_grid, std::optional<int> d,
                                 const InstanceBuilder& builder, const SolverFn& solver,
                                 const NoiseModel& noise, int replicates) {
    if (n_grid.empty() || m_grid.empty()) throw DomainError("rate_sweep: empty grid");
    std::vector<SweepRow> rows;
    for (int n : n_grid) {
        for (int m : m_grid) {
            Instance inst = builder(n, m);
            // Per-cell seed so cells are independent streams.
            NoiseModel cell_noise{noise.sigma,
                                  noise.seed ^ splitmix64((static_cast<std::uint64_t>(n) << 20) |
                                                          static_cast<std::uint64_t>(m))};
            McEstimate est = mc_risk(inst.dict, inst.f_vals, cell_noise, solver, replicates);
            SweepRow row;
            row.n = n;
            row.m = m;
            row.risk = est.mean;
            row.risk_stderr = est.std_err;
            row.psi = rate_psi(kind, n, m, d);
            row.ratio = est.mean / row.psi;
            rows.push_back(row);
        }
    }
    return rows;
}

SolverFn make_bic_solver(PenaltyConfig cfg, int max_support, bool greedy) {
    return [cfg, max_support, greedy](const Dictionary& dict, const Eigen::VectorXd& y) {
        const int cap = std::min(max_support, dict.m_dict());
        return greedy ? solve_bic_greedy(dict, y, cfg, cap)
                      : solve_bic_exhaustive(dict, y, cfg, cap);
    };
}

SolverFn make_l1_solver(PenaltyConfig cfg, CdSettings settings) {
    return [cfg, settings](const Dictionary& dict, const Eigen::VectorXd& y) {
        GramData gd = make_gram(dict);
        Eigen::VectorXd w = l1_weights(gd, cfg, dict.n());
        return solve_l1_cd(dict, y, w, settings);
    };
}

}  // namespace agg
