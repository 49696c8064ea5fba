#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "agg/errors.hpp"

namespace agg {

/// Fixed design: the n x M table of dictionary values f_j(X_i) together
/// with the uniform bound L on all entries. Immutable after construction.
class Dictionary {
public:
    Dictionary(Eigen::MatrixXd values, double bound_l);

    int n() const { return static_cast<int>(values_.rows()); }
    int m_dict() const { return static_cast<int>(values_.cols()); }
    double bound_l() const { return bound_l_; }
    const Eigen::MatrixXd& values() const { return values_; }
    Eigen::MatrixXd::ConstColXpr column(int j) const { return values_.col(j); }

private:
    Eigen::MatrixXd values_;
    double bound_l_;
};

/// Empirical Gram matrix Psi_n, its diagonal and the indices of columns
/// with zero empirical norm.
struct GramData {
    Eigen::MatrixXd gram;          // M x M, symmetric
    Eigen::VectorXd col_norms_sq;  // diag(Psi_n)
    std::vector<int> zero_cols;    // ascending

    bool is_zero_col(int j) const;
};

/// (1/n) sum_i g_i^2. Throws DimensionError if g.size() != n.
double empirical_norm_sq(const Eigen::VectorXd& g, int n);

GramData make_gram(const Dictionary& dict);

/// Largest kappa with Psi_n - kappa*diag(Psi_n) >= 0, i.e. the smallest
/// eigenvalue of the empirical correlation matrix over nonzero columns.
/// Clamped below at 0. Throws DomainError if every column is zero.
double kappa(const GramData& gd);

/// rho_n(i,j) = <f_i,f_j>_n / (||f_i||_n ||f_j||_n). Requires i != j and
/// both columns nonzero.
double pairwise_correlation(const GramData& gd, int i, int j);

/// max over i in support, j > i (j over all nonzero columns) of |rho_n(i,j)|.
/// Empty support returns 0.
double rho_of_support(const GramData& gd, const std::vector<int>& support);

struct CsvData {
    Dictionary dict;
    std::optional<Eigen::VectorXd> response;  // present when the file has a "y" column
    std::vector<std::string> column_names;    // dictionary columns only
};

/// Loads a dictionary from CSV. Header row required; a first column named
/// "y" is read as the response, all other columns are dictionary values.
/// bound_l is taken as the largest absolute dictionary entry.
CsvData load_dictionary_csv(const std::string& path);

}  // namespace agg
