#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "agg/dictionary.hpp"
#include "agg/errors.hpp"

namespace agg {

enum class PenaltyKind { BicType, L1 };

// Constant in front of the l1 weights: 2*sqrt(2) for the baseline penalty,
// 4*sqrt(2) for the coherence-based variant.
enum class L1Factor { TwoSqrtTwo, FourSqrtTwo };

struct PenaltyConfig {
    PenaltyKind kind = PenaltyKind::BicType;
    double a = 1.0;            // BIC parameter, > 0
    double sigma_sq = 1.0;     // noise variance, > 0
    L1Factor l1_factor = L1Factor::TwoSqrtTwo;

    void validate() const {
        if (a <= 0.0) throw DomainError("PenaltyConfig: a must be > 0");
        if (sigma_sq <= 0.0) throw DomainError("PenaltyConfig: sigma_sq must be > 0");
    }
};

/// Coefficient vector with exact-zero support bookkeeping. A coordinate is
/// in the support iff its stored value is exactly 0.0; construction through
/// snapped() applies the shared snap-to-zero rule first.
class WeightVector {
public:
    WeightVector() = default;
    explicit WeightVector(Eigen::VectorXd coeffs);

    /// Snaps |coeffs_j| <= 1e-12 * max_k |coeffs_k| to exact zero, then builds.
    static WeightVector snapped(Eigen::VectorXd coeffs);

    static WeightVector zero(int m) { return WeightVector(Eigen::VectorXd::Zero(m)); }

    const Eigen::VectorXd& coeffs() const { return coeffs_; }
    const std::vector<int>& support() const { return support_; }
    int m_of_lambda() const { return static_cast<int>(support_.size()); }
    int size() const { return static_cast<int>(coeffs_.size()); }

private:
    Eigen::VectorXd coeffs_;
    std::vector<int> support_;  // ascending
};

/// L(lambda) as a function of the support size: 2*log(e*M / (m v 1)).
double l_of_lambda(int m_lambda, int m_dict);

/// BIC-type penalty (2*sigma^2/n)*{1 + ((2+a)/(1+a))sqrt(L) + ((1+a)/a)L}*M(lambda).
double pen_bic(const WeightVector& lambda, const PenaltyConfig& cfg, int n);

/// Same penalty evaluated directly from the support size.
double pen_bic_m(int m_lambda, const PenaltyConfig& cfg, int n, int m_dict);

/// Weighted-l1 penalty weights r_{n,j} = c * sigma * sqrt((log M + log n)/n) * ||f_j||_n.
Eigen::VectorXd l1_weights(const GramData& gd, const PenaltyConfig& cfg, int n);

/// pen(lambda) = sum_j w_j |lambda_j|.
double pen_l1(const WeightVector& lambda, const Eigen::VectorXd& weights);

enum class RateKind { MS, C, L, S };

/// Reference aggregation rate psi_{n,M} for the given class; d required for S.
double rate_psi(RateKind kind, int n, int m_dict, std::optional<int> d = std::nullopt);

/// The convex-class rate variant with log(e*M/sqrt(n)) in the M > sqrt(n) branch.
double rate_psi_c_variant(int n, int m_dict);

}  // namespace agg
