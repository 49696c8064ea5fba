#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "agg/dictionary.hpp"
#include "agg/penalty.hpp"

namespace agg {

enum class SearchMode { Exhaustive, Greedy, CoordinateDescent };

struct SearchStats {
    std::int64_t supports_visited = 0;  // supports scanned, or CD sweeps
    SearchMode mode = SearchMode::Exhaustive;
};

struct Solution {
    WeightVector lambda_hat;
    double objective = 0.0;      // rss_over_n + penalty_value
    double rss_over_n = 0.0;     // S_hat(lambda_hat)
    double penalty_value = 0.0;
    SearchStats search_stats;
};

/// S_hat(lambda) = (1/n) sum_i (y_i - f_lambda(X_i))^2.
double residual_sum(const Dictionary& dict, const Eigen::VectorXd& y,
                    const WeightVector& lambda);

struct OlsFit {
    Eigen::VectorXd coeffs;  // restricted to the support, same order
    double rss_over_n = 0.0;
};

/// Minimum-norm least squares of y on the selected columns. Empty support
/// yields coeffs of size 0 and rss ||y||_n^2.
OlsFit ols_on_support(const Dictionary& dict, const Eigen::VectorXd& y,
                      const std::vector<int>& support);

/// Visits every support of size <= max_size over {0..m_dict-1}, size
/// ascending then lexicographic. Throws BudgetError past 2^25 supports.
void for_each_support(int m_dict, int max_size,
                      const std::function<void(const std::vector<int>&)>& visit);

/// Number of supports of size <= max_support over M columns, saturating at cap.
std::int64_t support_count(int m_dict, int max_support, std::int64_t cap);

/// Exact minimizer of S_hat + pen over supports of size <= max_support.
/// Ties: smaller M(lambda) wins, then lexicographically smallest support.
/// Throws BudgetError when the enumeration exceeds 2^25 supports.
Solution solve_bic_exhaustive(const Dictionary& dict, const Eigen::VectorXd& y,
                              const PenaltyConfig& cfg, int max_support);

/// Forward stepwise heuristic: greedily add the column with the largest
/// objective decrease; stops at max_support or when no addition helps.
Solution solve_bic_greedy(const Dictionary& dict, const Eigen::VectorXd& y,
                          const PenaltyConfig& cfg, int max_support);

}  // namespace agg
