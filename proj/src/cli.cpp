#include "agg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "agg/oracle.hpp"

namespace agg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return it.key() == k;
            }) == allowed.end()) {
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
        }
    }
}

Command command_from_string(const std::string& s) {
    if (s == "aggregate") return Command::Aggregate;
    if (s == "oracle") return Command::Oracle;
    if (s == "check-ineq") return Command::CheckIneq;
    if (s == "rate-sweep") return Command::RateSweep;
    throw ConfigError("unknown command '" + s + "'");
}

std::string command_to_string(Command c) {
    switch (c) {
        case Command::Aggregate: return "aggregate";
        case Command::Oracle: return "oracle";
        case Command::CheckIneq: return "check-ineq";
        case Command::RateSweep: return "rate-sweep";
    }
    throw ConfigError("bad command enum");
}

RateKind kind_from_string(const std::string& s) {
    if (s == "MS") return RateKind::MS;
    if (s == "C") return RateKind::C;
    if (s == "L") return RateKind::L;
    if (s == "S") return RateKind::S;
    throw ConfigError("unknown aggregation kind '" + s + "'");
}

std::string kind_to_string(RateKind k) {
    switch (k) {
        case RateKind::MS: return "MS";
        case RateKind::C: return "C";
        case RateKind::L: return "L";
        case RateKind::S: return "S";
    }
    throw ConfigError("bad kind enum");
}

PenaltyConfig penalty_from_json(const json& j) {
    reject_unknown_keys(j, {"kind", "a", "sigma_sq", "l1_factor"}, "penalty");
    PenaltyConfig cfg;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "bic") {
        cfg.kind = PenaltyKind::BicType;
    } else if (kind == "l1") {
        cfg.kind = PenaltyKind::L1;
    } else {
        throw ConfigError("penalty.kind must be 'bic' or 'l1'");
    }
    if (j.contains("a")) cfg.a = j.at("a").get<double>();
    cfg.sigma_sq = j.at("sigma_sq").get<double>();
    if (j.contains("l1_factor")) {
        const std::string f = j.at("l1_factor").get<std::string>();
        if (f == "2sqrt2") {
            cfg.l1_factor = L1Factor::TwoSqrtTwo;
        } else if (f == "4sqrt2") {
            cfg.l1_factor = L1Factor::FourSqrtTwo;
        } else {
            throw ConfigError("penalty.l1_factor must be '2sqrt2' or '4sqrt2'");
        }
    }
    cfg.validate();
    return cfg;
}

json penalty_to_json(const PenaltyConfig& cfg) {
    json j;
    j["kind"] = cfg.kind == PenaltyKind::BicType ? "bic" : "l1";
    j["a"] = cfg.a;
    j["sigma_sq"] = cfg.sigma_sq;
    j["l1_factor"] = cfg.l1_factor == L1Factor::TwoSqrtTwo ? "2sqrt2" : "4sqrt2";
    return j;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    reject_unknown_keys(j,
                        {"schema_version", "input", "command", "penalty", "target", "noise",
                         "replicates", "oracle", "grids", "max_support", "greedy", "output_dir"},
                        "config");
    ExperimentConfig cfg;
    try {
        cfg.schema_version = j.at("schema_version").get<int>();
        if (cfg.schema_version != 1) {
            throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version));
        }
        cfg.input_path = j.at("input").get<std::string>();
        cfg.command = command_from_string(j.at("command").get<std::string>());
        cfg.penalty = penalty_from_json(j.at("penalty"));
        if (j.contains("target")) {
            const json& t = j.at("target");
            reject_unknown_keys(t, {"column", "coeffs"}, "target");
            TargetSpec ts;
            if (t.contains("column")) ts.column = t.at("column").get<std::string>();
            if (t.contains("coeffs")) ts.coeffs = t.at("coeffs").get<std::vector<double>>();
            if (ts.column.has_value() == ts.coeffs.has_value()) {
                throw ConfigError("target needs exactly one of 'column' or 'coeffs'");
            }
            cfg.target = ts;
        }
        if (j.contains("noise")) {
            const json& nj = j.at("noise");
            reject_unknown_keys(nj, {"sigma", "seed"}, "noise");
            NoiseModel nm;
            nm.sigma = nj.at("sigma").get<double>();
            nm.seed = nj.at("seed").get<std::uint64_t>();
            nm.validate();
            cfg.noise = nm;
        }
        if (j.contains("replicates")) cfg.replicates = j.at("replicates").get<int>();
        if (j.contains("oracle")) {
            const json& oj = j.at("oracle");
            reject_unknown_keys(oj, {"kinds", "d", "gap_tol"}, "oracle");
            OracleOptions oo;
            for (const auto& k : oj.at("kinds")) oo.kinds.push_back(kind_from_string(k.get<std::string>()));
            if (oj.contains("d")) oo.d = oj.at("d").get<int>();
            if (oj.contains("gap_tol")) oo.gap_tol = oj.at("gap_tol").get<double>();
            cfg.oracle = oo;
        }
        if (j.contains("grids")) {
            const json& gj = j.at("grids");
            reject_unknown_keys(gj, {"n", "m", "d", "kind"}, "grids");
            Grids g;
            g.n = gj.at("n").get<std::vector<int>>();
            g.m = gj.at("m").get<std::vector<int>>();
            if (gj.contains("d")) g.d = gj.at("d").get<int>();
            g.kind = kind_from_string(gj.at("kind").get<std::string>());
            cfg.grids = g;
        }
        if (j.contains("max_support")) cfg.max_support = j.at("max_support").get<int>();
        if (j.contains("greedy")) cfg.greedy = j.at("greedy").get<bool>();
        if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
    if (cfg.command == Command::RateSweep &&
        (!cfg.grids || cfg.grids->n.empty() || cfg.grids->m.empty())) {
        throw ConfigError("rate-sweep requires nonempty grids");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    j["input"] = cfg.input_path;
    j["command"] = command_to_string(cfg.command);
    j["penalty"] = penalty_to_json(cfg.penalty);
    if (cfg.target) {
        json t;
        if (cfg.target->column) t["column"] = *cfg.target->column;
        if (cfg.target->coeffs) t["coeffs"] = *cfg.target->coeffs;
        j["target"] = t;
    }
    if (cfg.noise) {
        j["noise"] = {{"sigma", cfg.noise->sigma}, {"seed", cfg.noise->seed}};
    }
    if (cfg.replicates > 0) j["replicates"] = cfg.replicates;
    if (cfg.oracle) {
        json o;
        o["kinds"] = json::array();
        for (auto k : cfg.oracle->kinds) o["kinds"].push_back(kind_to_string(k));
        o["d"] = cfg.oracle->d;
        o["gap_tol"] = cfg.oracle->gap_tol;
        j["oracle"] = o;
    }
    if (cfg.grids) {
        json g;
        g["n"] = cfg.grids->n;
        g["m"] = cfg.grids->m;
        if (cfg.grids->d) g["d"] = *cfg.grids->d;
        g["kind"] = kind_to_string(cfg.grids->kind);
        j["grids"] = g;
    }
    if (cfg.max_support >= 0) j["max_support"] = cfg.max_support;
    if (cfg.greedy) j["greedy"] = cfg.greedy;
    j["output_dir"] = cfg.output_dir;
    return j.dump(2);
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void emit_csv(const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot write " + tmp);
        for (size_t c = 0; c < header.size(); ++c) {
            out << header[c] << (c + 1 < header.size() ? "," : "");
        }
        out << "\n";
        for (const auto& row : rows) {
            if (row.size() != header.size()) throw IoError("CSV row width mismatch");
            for (size_t c = 0; c < row.size(); ++c) {
                out << row[c] << (c + 1 < row.size() ? "," : "");
            }
            out << "\n";
        }
        if (!out) throw IoError("write failure on " + tmp);
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp + " -> " + path);
}

bool emit_plot(const std::vector<SweepRow>& rows, const std::string& path) {
    if (rows.size() < 2) {
        std::cerr << "warning: plot skipped, fewer than 2 rows\n";
        return false;
    }
    // Swept variable: whichever of n, M actually varies (n wins if both do).
    const bool sweep_n = rows.front().n != rows.back().n;
    const double width = 640, height = 480, ml = 70, mr = 20, mt = 20, mb = 50;

    auto xval = [&](const SweepRow& r) { return std::log10(double(sweep_n ? r.n : r.m)); };
    auto series_y = [](double v) { return std::log10(std::max(v, 1e-300)); };

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& r : rows) {
        xmin = std::min(xmin, xval(r));
        xmax = std::max(xmax, xval(r));
        for (double v : {series_y(r.risk), series_y(r.psi)}) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto sy = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

    auto polyline = [&](auto value_of, const char* color) {
        std::ostringstream p;
        p << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& r : rows) p << sx(xval(r)) << "," << sy(series_y(value_of(r))) << " ";
        p << "\"/>\n";
        return p.str();
    };

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot write " + tmp);
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
            << height << "\">\n";
        out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
            << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
            << height - mb << "\" stroke=\"black\"/>\n";
        out << polyline([](const SweepRow& r) { return r.risk; }, "#1f77b4");
        out << polyline([](const SweepRow& r) { return r.psi; }, "#d62728");
        out << "<text x=\"" << width - 130 << "\" y=\"" << mt + 20
            << "\" fill=\"#1f77b4\">risk</text>\n";
        out << "<text x=\"" << width - 130 << "\" y=\"" << mt + 40
            << "\" fill=\"#d62728\">psi</text>\n";
        out << "<text x=\"" << width / 2 << "\" y=\"" << height - 10
            << "\" text-anchor=\"middle\">log10 " << (sweep_n ? "n" : "M") << "</text>\n";
        out << "<text x=\"15\" y=\"" << height / 2
            << "\" transform=\"rotate(-90 15 " << height / 2
            << ")\" text-anchor=\"middle\">log10 value</text>\n";
        out << "</svg>\n";
        if (!out) throw IoError("write failure on " + tmp);
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp + " -> " + path);
    return true;
}

namespace {

Eigen::VectorXd resolve_target(const CsvData& data, const TargetSpec& target) {
    if (target.column) {
        if (*target.column == "y") {
            if (!data.response) throw ConfigError("target column 'y' but CSV has no response");
            return *data.response;
        }
        for (size_t j = 0; j < data.column_names.size(); ++j) {
            if (data.column_names[j] == *target.column) {
                return data.dict.column(static_cast<int>(j));
            }
        }
        throw ConfigError("target column '" + *target.column + "' not found");
    }
    const auto& c = *target.coeffs;
    if (static_cast<int>(c.size()) != data.dict.m_dict()) {
        throw ConfigError("target coeffs length != M");
    }
    Eigen::VectorXd lam = Eigen::Map<const Eigen::VectorXd>(c.data(), c.size());
    return data.dict.values() * lam;
}

SolverFn solver_from_config(const ExperimentConfig& cfg) {
    if (cfg.penalty.kind == PenaltyKind::BicType) {
        // make_bic_solver caps at the dictionary size of each instance.
        const int cap = cfg.max_support >= 0 ? cfg.max_support : std::numeric_limits<int>::max();
        return make_bic_solver(cfg.penalty, cap, cfg.greedy);
    }
    return make_l1_solver(cfg.penalty);
}

std::vector<std::string> lambda_cells(const WeightVector& w) {
    std::vector<std::string> cells;
    for (int j = 0; j < w.size(); ++j) cells.push_back(format_real(w.coeffs()(j)));
    return cells;
}

}  // namespace

void run(const ExperimentConfig& cfg, const RunOptions& opts) {
    ExperimentConfig c = cfg;
    if (opts.seed_override) {
        if (!c.noise) throw ConfigError("--seed given but config has no noise block");
        c.noise->seed = *opts.seed_override;
    }
    if (opts.out_override) c.output_dir = *opts.out_override;

    CsvData data = load_dictionary_csv(c.input_path);
    const Dictionary& dict = data.dict;

    fs::create_directories(c.output_dir);
    const std::string csv_path = (fs::path(c.output_dir) / "report.csv").string();

    switch (c.command) {
        case Command::Aggregate: {
            Eigen::VectorXd y;
            if (data.response) {
                y = *data.response;
            } else if (c.target && c.noise) {
                y = generate_responses(dict, resolve_target(data, *c.target), *c.noise);
            } else {
                throw ConfigError("aggregate needs a CSV response column or target+noise");
            }
            Solution sol = solver_from_config(c)(dict, y);
            std::vector<std::string> header = {"objective", "rss_over_n", "penalty_value",
                                               "mode", "supports_visited"};
            std::vector<std::string> row = {
                format_real(sol.objective), format_real(sol.rss_over_n),
                format_real(sol.penalty_value),
                sol.search_stats.mode == SearchMode::Exhaustive   ? "exhaustive"
                : sol.search_stats.mode == SearchMode::Greedy     ? "greedy"
                                                                  : "cd",
                std::to_string(sol.search_stats.supports_visited)};
            for (int j = 0; j < dict.m_dict(); ++j) header.push_back("lambda_" + std::to_string(j + 1));
            for (const auto& cell : lambda_cells(sol.lambda_hat)) row.push_back(cell);
            emit_csv(header, {row}, csv_path);
            std::cout << "aggregate: objective " << format_real(sol.objective) << ", M(lambda) "
                      << sol.lambda_hat.m_of_lambda() << " -> " << csv_path << "\n";
            break;
        }
        case Command::Oracle: {
            if (!c.target) throw ConfigError("oracle needs a target");
            if (!c.oracle || c.oracle->kinds.empty()) throw ConfigError("oracle needs oracle.kinds");
            Eigen::VectorXd f_vals = resolve_target(data, *c.target);
            std::vector<std::string> header = {"kind", "value", "certificate"};
            for (int j = 0; j < dict.m_dict(); ++j) header.push_back("lambda_" + std::to_string(j + 1));
            std::vector<std::vector<std::string>> rows;
            for (RateKind k : c.oracle->kinds) {
                OracleResult res;
                switch (k) {
                    case RateKind::MS: res = ms_oracle(dict, f_vals); break;
                    case RateKind::S: res = s_oracle(dict, f_vals, c.oracle->d); break;
                    case RateKind::L: res = l_oracle(dict, f_vals); break;
                    case RateKind::C: res = c_oracle(dict, f_vals, c.oracle->gap_tol); break;
                }
                std::vector<std::string> row = {kind_to_string(k), format_real(res.value),
                                                format_real(res.certificate)};
                for (const auto& cell : lambda_cells(res.argmin)) row.push_back(cell);
                rows.push_back(std::move(row));
            }
            emit_csv(header, rows, csv_path);
            std::cout << "oracle: " << rows.size() << " kinds -> " << csv_path << "\n";
            break;
        }
        case Command::CheckIneq: {
            if (!c.target) throw ConfigError("check-ineq needs a target");
            if (!c.noise) throw ConfigError("check-ineq needs a noise block");
            if (c.replicates < 2) throw ConfigError("check-ineq needs replicates >= 2");
            Eigen::VectorXd f_vals = resolve_target(data, *c.target);
            double rhs;
            if (c.penalty.kind == PenaltyKind::BicType) {
                rhs = rhs_bic(dict, f_vals, c.penalty.a, c.penalty.sigma_sq);
            } else {
                if (c.penalty.l1_factor != L1Factor::TwoSqrtTwo) {
                    throw ConfigError("check-ineq with l1 penalty requires l1_factor 2sqrt2");
                }
                rhs = rhs_l1(dict, f_vals, 2.0, c.penalty.sigma_sq, kappa(make_gram(dict)),
                             dict.bound_l());
            }
            McEstimate lhs = mc_risk(dict, f_vals, *c.noise, solver_from_config(c),
                                     c.replicates);
            IneqReport rep = check_inequality(lhs, rhs, c.replicates);
            emit_csv({"lhs", "lhs_stderr", "rhs", "slack", "replicates"},
                     {{format_real(rep.lhs), format_real(rep.lhs_stderr), format_real(rep.rhs),
                       format_real(rep.slack), std::to_string(rep.replicates)}},
                     csv_path);
            std::cout << "check-ineq: slack " << format_real(rep.slack)
                      << (rep.violated ? " (VIOLATED)" : " (ok)") << " -> " << csv_path << "\n";
            break;
        }
        case Command::RateSweep: {
            if (!c.noise) throw ConfigError("rate-sweep needs a noise block");
            if (c.replicates < 2) throw ConfigError("rate-sweep needs replicates >= 2");
            const Grids& g = *c.grids;
            InstanceBuilder builder = [&](int n, int m) {
                return default_rate_instance(g.kind, n, m, g.d.value_or(2));
            };
            // The dictionary comes from the builder per cell; the CSV input is
            // not used here beyond validation.
            std::vector<SweepRow> rows;
            {
                // Solver is rebuilt per cell inside rate_sweep via the handle.
                SolverFn solver = solver_from_config(c);
                rows = rate_sweep(g.kind, g.n, g.m, g.d, builder, solver, *c.noise, c.replicates);
            }
            std::vector<std::vector<std::string>> cells;
            for (const auto& r : rows) {
                cells.push_back({std::to_string(r.n), std::to_string(r.m), format_real(r.risk),
                                 format_real(r.risk_stderr), format_real(r.psi),
                                 format_real(r.ratio)});
            }
            emit_csv({"n", "m", "risk", "risk_stderr", "psi", "ratio"}, cells, csv_path);
            if (opts.plot) {
                emit_plot(rows, (fs::path(c.output_dir) / "report.svg").string());
            }
            std::cout << "rate-sweep: " << rows.size() << " cells -> " << csv_path << "\n";
            break;
        }
    }
}

int exit_code_for_current_exception() {
    try {
        throw;
    } catch (const ConfigError&) {
        return 2;
    } catch (const BudgetError&) {
        return 3;
    } catch (const ConvergenceError&) {
        return 4;
    } catch (const IoError&) {
        return 5;
    } catch (const std::exception&) {
        return 2;
    }
}

}  // namespace agg::cli
