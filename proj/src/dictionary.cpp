#include "agg/dictionary.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace agg {

Dictionary::Dictionary(Eigen::MatrixXd values, double bound_l)
    : values_(std::move(values)), bound_l_(bound_l) {
    if (values_.rows() < 1) throw DomainError("dictionary needs n >= 1");
    if (values_.cols() < 2) throw DomainError("dictionary needs M >= 2");
    if (bound_l_ < 0.0) throw DomainError("bound_l must be nonnegative");
    const double max_abs = values_.cwiseAbs().maxCoeff();
    if (max_abs > bound_l_) {
        throw DomainError("dictionary entry exceeds bound_l: " + std::to_string(max_abs));
    }
}

bool GramData::is_zero_col(int j) const {
    return std::binary_search(zero_cols.begin(), zero_cols.end(), j);
}

double empirical_norm_sq(const Eigen::VectorXd& g, int n) {
    if (g.size() != n) {
        throw DimensionError("empirical_norm_sq: vector length " +
                             std::to_string(g.size()) + " != n " + std::to_string(n));
    }
    return g.squaredNorm() / static_cast<double>(n);
}

GramData make_gram(const Dictionary& dict) {
    const int n = dict.n();
    const int m = dict.m_dict();
    GramData gd;
    gd.gram = (dict.values().transpose() * dict.values()) / static_cast<double>(n);
    // Symmetrize: the product above is symmetric up to rounding.
    gd.gram = ((gd.gram + gd.gram.transpose()) * 0.5).eval();
    gd.col_norms_sq = gd.gram.diagonal();
    const double max_norm_sq = gd.col_norms_sq.maxCoeff();
    const double thresh = 1e-24 * max_norm_sq;
    for (int j = 0; j < m; ++j) {
        if (gd.col_norms_sq(j) <= thresh) {
            gd.zero_cols.push_back(j);
            gd.col_norms_sq(j) = 0.0;
            gd.gram.row(j).setZero();
            gd.gram.col(j).setZero();
        }
    }
    return gd;
}

double kappa(const GramData& gd) {
    const int m = static_cast<int>(gd.gram.rows());
    std::vector<int> live;
    for (int j = 0; j < m; ++j) {
        if (!gd.is_zero_col(j)) live.push_back(j);
    }
    if (live.empty()) throw DomainError("kappa: all dictionary columns are zero");
    const int k = static_cast<int>(live.size());
    Eigen::MatrixXd corr(k, k);
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            corr(a, b) = gd.gram(live[a], live[b]) /
                         std::sqrt(gd.col_norms_sq(live[a]) * gd.col_norms_sq(live[b]));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr, Eigen::EigenvaluesOnly);
    return std::max(0.0, es.eigenvalues().minCoeff());
}

double pairwise_correlation(const GramData& gd, int i, int j) {
    if (i == j) throw DomainError("pairwise_correlation: i == j");
    if (gd.is_zero_col(i) || gd.is_zero_col(j)) {
        throw DomainError("pairwise_correlation: zero-norm column");
    }
    return gd.gram(i, j) / std::sqrt(gd.col_norms_sq(i) * gd.col_norms_sq(j));
}

double rho_of_support(const GramData& gd, const std::vector<int>& support) {
    const int m = static_cast<int>(gd.gram.rows());
    double rho = 0.0;
    for (int i : support) {
        if (gd.is_zero_col(i)) {
            throw DomainError("rho_of_support: support touches a zero column");
        }
        for (int j = i + 1; j < m; ++j) {
            if (gd.is_zero_col(j)) continue;
            rho = std::max(rho, std::abs(pairwise_correlation(gd, i, j)));
        }
    }
    return rho;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

CsvData load_dictionary_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty CSV: " + path);
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = trim(h);
    if (header.empty()) throw IoError("missing header row: " + path);

    const bool has_response = header[0] == "y";
    const int first_dict_col = has_response ? 1 : 0;
    const int m = static_cast<int>(header.size()) - first_dict_col;
    if (m < 2) throw IoError("CSV needs at least 2 dictionary columns: " + path);

    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw IoError(path + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(header.size()) + " fields, got " +
                          std::to_string(fields.size()));
        }
        std::vector<double> row(fields.size());
        for (size_t c = 0; c < fields.size(); ++c) {
            try {
                size_t pos = 0;
                row[c] = std::stod(trim(fields[c]), &pos);
                if (pos != trim(fields[c]).size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw IoError(path + ":" + std::to_string(lineno) +
                              ": bad numeric field '" + fields[c] + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("CSV has no data rows: " + path);

    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXd values(n, m);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        if (has_response) y(i) = rows[i][0];
        for (int j = 0; j < m; ++j) values(i, j) = rows[i][first_dict_col + j];
    }
    const double bound_l = values.cwiseAbs().maxCoeff();

    CsvData out{Dictionary(std::move(values), bound_l),
                has_response ? std::optional<Eigen::VectorXd>(y) : std::nullopt,
                {}};
    out.column_names.assign(header.begin() + first_dict_col, header.end());
    return out;
}

}  // namespace agg
