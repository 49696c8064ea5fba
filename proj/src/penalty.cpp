#include "agg/penalty.hpp"

#include <cmath>

namespace agg {

WeightVector::WeightVector(Eigen::VectorXd coeffs) : coeffs_(std::move(coeffs)) {
    for (int j = 0; j < coeffs_.size(); ++j) {
        if (coeffs_(j) != 0.0) support_.push_back(j);
    }
}

WeightVector WeightVector::snapped(Eigen::VectorXd coeffs) {
    const double max_abs = coeffs.size() > 0 ? coeffs.cwiseAbs().maxCoeff() : 0.0;
    const double thresh = 1e-12 * max_abs;
    for (int j = 0; j < coeffs.size(); ++j) {
        if (std::abs(coeffs(j)) <= thresh) coeffs(j) = 0.0;
    }
    return WeightVector(std::move(coeffs));
}

double l_of_lambda(int m_lambda, int m_dict) {
    if (m_lambda < 0 || m_lambda > m_dict) {
        throw DomainError("l_of_lambda: m_lambda out of [0, M]");
    }
    const int m_eff = std::max(m_lambda, 1);
    return 2.0 * std::log(std::exp(1.0) * static_cast<double>(m_dict) / m_eff);
}

double pen_bic_m(int m_lambda, const PenaltyConfig& cfg, int n, int m_dict) {
    cfg.validate();
    if (cfg.kind != PenaltyKind::BicType) throw DomainError("pen_bic: wrong penalty kind");
    if (m_lambda == 0) return 0.0;
    const double a = cfg.a;
    const double big_l = l_of_lambda(m_lambda, m_dict);
    const double factor = 1.0 + (2.0 + a) / (1.0 + a) * std::sqrt(big_l) +
                          (1.0 + a) / a * big_l;
    return 2.0 * cfg.sigma_sq / n * factor * m_lambda;
}

double pen_bic(const WeightVector& lambda, const PenaltyConfig& cfg, int n) {
    return pen_bic_m(lambda.m_of_lambda(), cfg, n, lambda.size());
}

Eigen::VectorXd l1_weights(const GramData& gd, const PenaltyConfig& cfg, int n) {
    cfg.validate();
    if (cfg.kind != PenaltyKind::L1) throw DomainError("l1_weights: wrong penalty kind");
    const int m = static_cast<int>(gd.col_norms_sq.size());
    const double c = (cfg.l1_factor == L1Factor::TwoSqrtTwo) ? 2.0 * std::sqrt(2.0)
                                                             : 4.0 * std::sqrt(2.0);
    const double r_n = c * std::sqrt(cfg.sigma_sq) *
                       std::sqrt((std::log(static_cast<double>(m)) + std::log(static_cast<double>(n))) / n);
    Eigen::VectorXd w(m);
    for (int j = 0; j < m; ++j) w(j) = r_n * std::sqrt(gd.col_norms_sq(j));
    return w;
}

double pen_l1(const WeightVector& lambda, const Eigen::VectorXd& weights) {
    if (lambda.size() != weights.size()) throw DimensionError("pen_l1: size mismatch");
    return weights.dot(lambda.coeffs().cwiseAbs());
}

double rate_psi(RateKind kind, int n, int m_dict, std::optional<int> d) {
    if (n < 1 || m_dict < 2) throw DomainError("rate_psi: need n >= 1 and M >= 2");
    const double nn = n;
    const double mm = m_dict;
    switch (kind) {
        case RateKind::MS:
            return std::log(mm) / nn;
        case RateKind::L:
            return mm / nn;
        case RateKind::S: {
            if (!d || *d < 1 || *d > m_dict) throw DomainError("rate_psi: S needs 1 <= d <= M");
            const double dd = *d;
            return dd * std::log(1.0 + mm / dd) / nn;
        }
        case RateKind::C: {
            if (mm <= std::sqrt(nn)) return mm / nn;
            return std::sqrt(std::log(1.0 + mm / std::sqrt(nn)) / nn);
        }
    }
    throw DomainError("rate_psi: bad kind");
}

double rate_psi_c_variant(int n, int m_dict) {
    if (n < 1 || m_dict < 2) throw DomainError("rate_psi_c_variant: need n >= 1 and M >= 2");
    const double nn = n;
    const double mm = m_dict;
    if (mm <= std::sqrt(nn)) return mm / nn;
    return std::sqrt(std::log(std::exp(1.0) * mm / std::sqrt(nn)) / nn);
}

}  // namespace agg
