#include "agg/bic_solver.hpp"

#include <algorithm>
#include <cmath>

namespace agg {

namespace {

Eigen::VectorXd scatter(const Eigen::VectorXd& coeffs, const std::vector<int>& support, int m) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(m);
    for (size_t k = 0; k < support.size(); ++k) full(support[k]) = coeffs(static_cast<int>(k));
    return full;
}

// Advances `comb` to the next k-combination of {0..m-1} in lexicographic
// order; returns false after the last one.
bool next_combination(std::vector<int>& comb, int m) {
    const int k = static_cast<int>(comb.size());
    for (int i = k - 1; i >= 0; --i) {
        if (comb[i] < m - k + i) {
            ++comb[i];
            for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
            return true;
        }
    }
    return false;
}

Solution make_solution(const Dictionary& dict, const PenaltyConfig& cfg,
                       const std::vector<int>& support, const OlsFit& fit,
                       SearchStats stats) {
    Solution sol;
    sol.lambda_hat = WeightVector::snapped(scatter(fit.coeffs, support, dict.m_dict()));
    sol.rss_over_n = fit.rss_over_n;
    sol.penalty_value = pen_bic(sol.lambda_hat, cfg, dict.n());
    sol.objective = sol.rss_over_n + sol.penalty_value;
    sol.search_stats = stats;
    return sol;
}

}  // namespace

double residual_sum(const Dictionary& dict, const Eigen::VectorXd& y,
                    const WeightVector& lambda) {
    if (y.size() != dict.n()) throw DimensionError("residual_sum: y length != n");
    if (lambda.size() != dict.m_dict()) throw DimensionError("residual_sum: lambda length != M");
    Eigen::VectorXd resid = y - dict.values() * lambda.coeffs();
    return empirical_norm_sq(resid, dict.n());
}

OlsFit ols_on_support(const Dictionary& dict, const Eigen::VectorXd& y,
                      const std::vector<int>& support) {
    if (y.size() != dict.n()) throw DimensionError("ols_on_support: y length != n");
    OlsFit fit;
    if (support.empty()) {
        fit.coeffs = Eigen::VectorXd(0);
        fit.rss_over_n = empirical_norm_sq(y, dict.n());
        return fit;
    }
    const int k = static_cast<int>(support.size());
    Eigen::MatrixXd cols(dict.n(), k);
    for (int c = 0; c < k; ++c) cols.col(c) = dict.column(support[c]);
    // Complete orthogonal decomposition gives the minimum-norm solution for
    // rank-deficient supports.
    fit.coeffs = cols.completeOrthogonalDecomposition().solve(y);
    fit.rss_over_n = (y - cols * fit.coeffs).squaredNorm() / dict.n();
    return fit;
}

void for_each_support(int m_dict, int max_size,
                      const std::function<void(const std::vector<int>&)>& visit) {
    constexpr std::int64_t kBudget = std::int64_t{1} << 25;
    if (max_size < 0 || max_size > m_dict) {
        throw DomainError("for_each_support: max_size out of range");
    }
    if (support_count(m_dict, max_size, kBudget) > kBudget) {
        throw BudgetError("support enumeration exceeds 2^25; use solve_bic_greedy");
    }
    std::vector<int> empty;
    visit(empty);
    for (int m = 1; m <= max_size; ++m) {
        std::vector<int> comb(m);
        for (int i = 0; i < m; ++i) comb[i] = i;
        do {
            visit(comb);
        } while (next_combination(comb, m_dict));
    }
}

std::int64_t support_count(int m_dict, int max_support, std::int64_t cap) {
    std::int64_t total = 0;
    double binom = 1.0;  // C(m_dict, 0)
    for (int m = 0; m <= max_support; ++m) {
        if (m > 0) binom = binom * (m_dict - m + 1) / m;
        if (binom > static_cast<double>(cap) || (total += static_cast<std::int64_t>(binom)) > cap) {
            return cap + 1;
        }
    }
    return total;
}

Solution solve_bic_exhaustive(const Dictionary& dict, const Eigen::VectorXd& y,
                              const PenaltyConfig& cfg, int max_support) {
    cfg.validate();
    if (cfg.kind != PenaltyKind::BicType) throw DomainError("solve_bic_exhaustive: wrong penalty kind");
    if (max_support < 0 || max_support > dict.m_dict()) {
        throw DomainError("solve_bic_exhaustive: max_support out of range");
    }
    SearchStats stats{0, SearchMode::Exhaustive};
    Solution best;
    bool have_best = false;
    // Size-ascending lexicographic scan: strict improvement implements the
    // smaller-support-then-lex tie-break.
    for_each_support(dict.m_dict(), max_support, [&](const std::vector<int>& support) {
        ++stats.supports_visited;
        Solution cand = make_solution(dict, cfg, support, ols_on_support(dict, y, support), stats);
        if (!have_best || cand.objective < best.objective) {
            best = cand;
            have_best = true;
        }
    });
    best.search_stats = stats;
    return best;
}

Solution solve_bic_greedy(const Dictionary& dict, const Eigen::VectorXd& y,
                          const PenaltyConfig& cfg, int max_support) {
    cfg.validate();
    if (cfg.kind != PenaltyKind::BicType) throw DomainError("solve_bic_greedy: wrong penalty kind");
    if (max_support < 0 || max_support > dict.m_dict()) {
        throw DomainError("solve_bic_greedy: max_support out of range");
    }
    SearchStats stats{0, SearchMode::Greedy};
    std::vector<int> support;
    Solution best = make_solution(dict, cfg, support, ols_on_support(dict, y, support), stats);
    ++stats.supports_visited;

    while (static_cast<int>(support.size()) < max_support) {
        int best_j = -1;
        Solution best_cand;
        for (int j = 0; j < dict.m_dict(); ++j) {
            if (std::find(support.begin(), support.end(), j) != support.end()) continue;
            std::vector<int> cand_support = support;
            cand_support.insert(std::upper_bound(cand_support.begin(), cand_support.end(), j), j);
            ++stats.supports_visited;
            Solution cand = make_solution(dict, cfg, cand_support,
                                          ols_on_support(dict, y, cand_support), stats);
            if (cand.objective < best.objective &&
                (best_j < 0 || cand.objective < best_cand.objective)) {
                best_j = j;
                best_cand = cand;
            }
        }
        if (best_j < 0) break;
        support.insert(std::upper_bound(support.begin(), support.end(), best_j), best_j);
        best = best_cand;
    }
    best.search_stats = stats;
    return best;
}

}  // namespace agg
