#include "agg/oracle.hpp"

#include <cmath>

#include "agg/bic_solver.hpp"
#include "agg/rng.hpp"

namespace agg {

namespace {

Eigen::VectorXd scatter(const Eigen::VectorXd& coeffs, const std::vector<int>& support, int m) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(m);
    for (size_t k = 0; k < support.size(); ++k) full(support[k]) = coeffs(static_cast<int>(k));
    return full;
}

}  // namespace

OracleResult ms_oracle(const Dictionary& dict, const Eigen::VectorXd& f_vals) {
    if (f_vals.size() != dict.n()) throw DimensionError("ms_oracle: f length != n");
    OracleResult res;
    res.kind = RateKind::MS;
    int best_j = 0;
    double best = empirical_norm_sq(dict.column(0) - f_vals, dict.n());
    for (int j = 1; j < dict.m_dict(); ++j) {
        const double v = empirical_norm_sq(dict.column(j) - f_vals, dict.n());
        if (v < best) {
            best = v;
            best_j = j;
        }
    }
    Eigen::VectorXd vertex = Eigen::VectorXd::Zero(dict.m_dict());
    vertex(best_j) = 1.0;
    res.value = best;
    res.argmin = WeightVector(std::move(vertex));
    return res;
}

OracleResult s_oracle(const Dictionary& dict, const Eigen::VectorXd& f_vals, int d) {
    if (d < 1 || d > dict.m_dict()) throw DomainError("s_oracle: need 1 <= d <= M");
    OracleResult res;
    res.kind = RateKind::S;
    bool have = false;
    for_each_support(dict.m_dict(), d, [&](const std::vector<int>& support) {
        OlsFit fit = ols_on_support(dict, f_vals, support);
        if (!have || fit.rss_over_n < res.value) {
            res.value = fit.rss_over_n;
            res.argmin = WeightVector::snapped(scatter(fit.coeffs, support, dict.m_dict()));
            have = true;
        }
    });
    return res;
}

OracleResult l_oracle(const Dictionary& dict, const Eigen::VectorXd& f_vals) {
    std::vector<int> all(dict.m_dict());
    for (int j = 0; j < dict.m_dict(); ++j) all[j] = j;
    OlsFit fit = ols_on_support(dict, f_vals, all);
    OracleResult res;
    res.kind = RateKind::L;
    res.value = fit.rss_over_n;
    res.argmin = WeightVector::snapped(fit.coeffs);
    return res;
}

OracleResult c_oracle(const Dictionary& dict, const Eigen::VectorXd& f_vals, double gap_tol) {
    if (gap_tol <= 0.0) throw DomainError("c_oracle: gap_tol must be > 0");
    if (f_vals.size() != dict.n()) throw DimensionError("c_oracle: f length != n");
    const int n = dict.n();
    const int m = dict.m_dict();
    const Eigen::MatrixXd& X = dict.values();

    // Away-step Frank-Wolfe over conv{0, e_1, ..., e_M}. The barycentric
    // decomposition of lambda over these vertices is lambda itself plus
    // weight 1 - sum(lambda) on the origin, so no active-set bookkeeping.
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd fit = Eigen::VectorXd::Zero(n);  // X * lambda
    double gap = 0.0;
    const std::int64_t max_iters = 2'000'000;
    for (std::int64_t it = 0; it < max_iters; ++it) {
        Eigen::VectorXd grad = 2.0 / n * (X.transpose() * (fit - f_vals));

        int fw_j = -1;
        double fw_val = 0.0;  // origin
        for (int j = 0; j < m; ++j) {
            if (grad(j) < fw_val) {
                fw_val = grad(j);
                fw_j = j;
            }
        }
        const double lambda_sum = lambda.sum();
        gap = grad.dot(lambda) - fw_val;
        if (gap <= gap_tol) break;

        int aw_j = -1;
        double aw_val = (lambda_sum < 1.0) ? 0.0 : -std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) {
            if (lambda(j) > 0.0 && grad(j) > aw_val) {
                aw_val = grad(j);
                aw_j = j;
            }
        }

        // Directions in lambda space; d_vals = X * d.
        Eigen::VectorXd d;
        Eigen::VectorXd d_vals;
        double gamma_max;
        const double fw_gap = grad.dot(lambda) - fw_val;
        const double aw_gap = aw_val - grad.dot(lambda);
        if (fw_gap >= aw_gap) {
            d = -lambda;
            if (fw_j >= 0) d(fw_j) += 1.0;
            d_vals = X * d;
            gamma_max = 1.0;
        } else {
            // Move away from the worst active vertex.
            d = lambda;
            double alpha;
            if (aw_j >= 0) {
                d(aw_j) -= 1.0;
                alpha = lambda(aw_j);
            } else {
                alpha = 1.0 - lambda_sum;  // away from the origin
            }
            d_vals = X * d;
            gamma_max = (alpha < 1.0) ? alpha / (1.0 - alpha)
                                      : std::numeric_limits<double>::infinity();
        }

        const double slope = grad.dot(d);
        const double curv = d_vals.squaredNorm() / n;
        double gamma;
        if (curv > 0.0) {
            gamma = std::min(gamma_max, -slope / (2.0 * curv));
        } else {
            gamma = (slope < 0.0) ? gamma_max : 0.0;
        }
        if (gamma <= 0.0) break;  // no admissible progress left
        lambda += gamma * d;
        fit += gamma * d_vals;
        // Clean tiny negatives from the away updates.
        for (int j = 0; j < m; ++j) {
            if (lambda(j) < 0.0) lambda(j) = 0.0;
        }
    }
    if (gap > gap_tol) {
        throw ConvergenceError("c_oracle: iteration cap reached, gap " + std::to_string(gap), gap);
    }

    OracleResult res;
    res.kind = RateKind::C;
    res.argmin = WeightVector::snapped(lambda);
    res.value = empirical_norm_sq(X * res.argmin.coeffs() - f_vals, n);
    res.certificate = gap;
    return res;
}

WeightVector maurey_round(const WeightVector& lambda_star, int m, std::uint64_t seed) {
    if (m < 1) throw DomainError("maurey_round: m must be >= 1");
    const Eigen::VectorXd& p = lambda_star.coeffs();
    const double sum = p.sum();
    if (p.size() == 0 || p.minCoeff() < 0.0 || sum > 1.0 + 1e-12) {
        throw DomainError("maurey_round: lambda_star outside the simplex");
    }
    auto eng = make_engine(seed);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(p.size());
    for (int k = 0; k < m; ++k) {
        // Inverse CDF over (pi_0, pi_1, ..., pi_M) with pi_0 = 1 - sum.
        double u = uniform01(eng) - (1.0 - sum);
        if (u < 0.0) continue;  // landed on the origin
        int j = 0;
        while (j < p.size() - 1 && u >= p(j)) u -= p(j), ++j;
        counts(j) += 1.0;
    }
    return WeightVector(counts / static_cast<double>(m));
}

double maurey_expected_risk(const Dictionary& dict, const Eigen::VectorXd& f_vals,
                            const WeightVector& lambda_star, int m) {
    if (m < 1) throw DomainError("maurey_expected_risk: m must be >= 1");
    const Eigen::VectorXd& p = lambda_star.coeffs();
    if (p.minCoeff() < 0.0 || p.sum() > 1.0 + 1e-12) {
        throw DomainError("maurey_expected_risk: lambda_star outside the simplex");
    }
    const int n = dict.n();
    Eigen::VectorXd f_star = dict.values() * p;
    const double bias = empirical_norm_sq(f_star - f_vals, n);
    double second_moment = 0.0;
    for (int j = 0; j < dict.m_dict(); ++j) {
        second_moment += p(j) * dict.column(j).squaredNorm() / n;
    }
    const double variance = second_moment - empirical_norm_sq(f_star, n);
    return bias + variance / m;
}

}  // namespace agg
