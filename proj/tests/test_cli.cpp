#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "agg/cli.hpp"

using namespace agg;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kMinimalConfig = R"({
  "schema_version": 1,
  "input": "in.csv",
  "command": "aggregate",
  "penalty": {"kind": "bic", "sigma_sq": 0.01}
})";

std::string bundled_csv() { return std::string(AGG_SOURCE_DIR) + "/data/orthonormal_pair.csv"; }

}  // namespace

TEST_CASE("parse_config minimal and defaults") {
    cli::ExperimentConfig cfg = cli::parse_config(kMinimalConfig);
    CHECK(cfg.schema_version == 1);
    CHECK(cfg.input_path == "in.csv");
    CHECK(cfg.command == cli::Command::Aggregate);
    CHECK(cfg.penalty.kind == PenaltyKind::BicType);
    CHECK(cfg.penalty.a == 1.0);
    CHECK(cfg.penalty.sigma_sq == 0.01);
    CHECK(cfg.max_support == -1);
    CHECK_FALSE(cfg.greedy);
    CHECK(cfg.output_dir == ".");
    CHECK_FALSE(cfg.target.has_value());
    CHECK_FALSE(cfg.noise.has_value());
}

TEST_CASE("parse_config full round trip") {
    const char* text = R"({
      "schema_version": 1,
      "input": "dict.csv",
      "command": "check-ineq",
      "penalty": {"kind": "l1", "a": 0.5, "sigma_sq": 0.25, "l1_factor": "2sqrt2"},
      "target": {"column": "f1"},
      "noise": {"sigma": 0.5, "seed": 42},
      "replicates": 100,
      "max_support": 3,
      "greedy": true,
      "output_dir": "out"
    })";
    cli::ExperimentConfig cfg = cli::parse_config(text);
    cli::ExperimentConfig back = cli::parse_config(cli::serialize_config(cfg));
    CHECK(back.input_path == cfg.input_path);
    CHECK(back.command == cfg.command);
    CHECK(back.penalty.kind == cfg.penalty.kind);
    CHECK(back.penalty.a == cfg.penalty.a);
    CHECK(back.penalty.sigma_sq == cfg.penalty.sigma_sq);
    CHECK(back.penalty.l1_factor == cfg.penalty.l1_factor);
    REQUIRE(back.target.has_value());
    CHECK(back.target->column == cfg.target->column);
    REQUIRE(back.noise.has_value());
    CHECK(back.noise->sigma == cfg.noise->sigma);
    CHECK(back.noise->seed == cfg.noise->seed);
    CHECK(back.replicates == cfg.replicates);
    CHECK(back.max_support == cfg.max_support);
    CHECK(back.greedy == cfg.greedy);
    CHECK(back.output_dir == cfg.output_dir);
    // Idempotent serialization.
    CHECK(cli::serialize_config(back) == cli::serialize_config(cfg));
}

TEST_CASE("parse_config rejects bad input") {
    CHECK_THROWS_AS(cli::parse_config("not json"), ConfigError);
    CHECK_THROWS_AS(cli::parse_config("{}"), ConfigError);  // missing required keys
    CHECK_THROWS_AS(
        cli::parse_config(R"({"schema_version":2,"input":"x","command":"aggregate",
                             "penalty":{"kind":"bic","sigma_sq":1}})"),
        ConfigError);
    CHECK_THROWS_AS(
        cli::parse_config(R"({"schema_version":1,"input":"x","command":"fly",
                             "penalty":{"kind":"bic","sigma_sq":1}})"),
        ConfigError);
    // Unknown keys anywhere are rejected.
    CHECK_THROWS_AS(
        cli::parse_config(R"({"schema_version":1,"input":"x","command":"aggregate",
                             "penalty":{"kind":"bic","sigma_sq":1},"bogus":1})"),
        ConfigError);
    CHECK_THROWS_AS(
        cli::parse_config(R"({"schema_version":1,"input":"x","command":"aggregate",
                             "penalty":{"kind":"bic","sigma_sq":1,"zeta":2}})"),
        ConfigError);
    // Target needs exactly one selector.
    CHECK_THROWS_AS(
        cli::parse_config(R"({"schema_version":1,"input":"x","command":"aggregate",
                             "penalty":{"kind":"bic","sigma_sq":1},
                             "target":{"column":"f1","coeffs":[1,0]}})"),
        ConfigError);
    CHECK_THROWS_AS(
        cli::parse_config(R"({"schema_version":1,"input":"x","command":"aggregate",
                             "penalty":{"kind":"bic","sigma_sq":1},"target":{}})"),
        ConfigError);
    // Invalid numeric domains surface as config errors.
    CHECK_THROWS_AS(
        cli::parse_config(R"({"schema_version":1,"input":"x","command":"aggregate",
                             "penalty":{"kind":"bic","sigma_sq":-1}})"),
        ConfigError);
    CHECK_THROWS_AS(
        cli::parse_config(R"({"schema_version":1,"input":"x","command":"rate-sweep",
                             "penalty":{"kind":"bic","sigma_sq":1}})"),
        ConfigError);  // rate-sweep without grids
    CHECK_THROWS_AS(cli::load_config("no_such_config.json"), IoError);
}

TEST_CASE("format_real uses 17 significant digits and round-trips") {
    for (double v : {1.0 / 3.0, 0.1, -2.5e-17, 1e300, 12345.6789, 0.0, -0.0}) {
        const std::string s = cli::format_real(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(cli::format_real(1.0 / 3.0) == "0.33333333333333331");
    CHECK(cli::format_real(2.0) == "2");
}

TEST_CASE("emit_csv") {
    const std::string path = "emit_test.csv";
    cli::emit_csv({"a", "b"}, {{"1", "2"}, {"3", "4"}}, path);
    CHECK(slurp(path) == "a,b\n1,2\n3,4\n");
    CHECK_FALSE(fs::exists(path + ".tmp"));
    CHECK_THROWS_AS(cli::emit_csv({"a", "b"}, {{"1"}}, path), IoError);
}

TEST_CASE("emit_plot") {
    std::vector<SweepRow> one = {{100, 4, 0.1, 0.01, 0.05, 2.0}};
    CHECK_FALSE(cli::emit_plot(one, "plot_one.svg"));
    CHECK_FALSE(fs::exists("plot_one.svg"));

    std::vector<SweepRow> rows = {
        {100, 4, 0.1, 0.01, 0.05, 2.0},
        {200, 4, 0.06, 0.01, 0.025, 2.4},
        {400, 4, 0.03, 0.01, 0.0125, 2.4},
    };
    CHECK(cli::emit_plot(rows, "plot_test.svg"));
    const std::string svg = slurp("plot_test.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("psi") != std::string::npos);
    CHECK(svg.find("risk") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK_FALSE(fs::exists("plot_test.svg.tmp"));
}

TEST_CASE("run aggregate on the bundled example") {
    cli::ExperimentConfig cfg;
    cfg.input_path = bundled_csv();
    cfg.command = cli::Command::Aggregate;
    cfg.penalty.sigma_sq = 0.01;
    cfg.output_dir = "cli_out_aggregate";
    cli::run(cfg);

    const std::string csv = slurp("cli_out_aggregate/report.csv");
    CHECK(csv.find("objective,rss_over_n,penalty_value,mode,supports_visited,lambda_1,lambda_2") !=
          std::string::npos);
    CHECK(csv.find("exhaustive") != std::string::npos);
    // Recover lambda = (1, 0) from the trailing cells.
    std::istringstream lines(csv);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    std::vector<std::string> cells;
    std::istringstream rs(row);
    for (std::string cell; std::getline(rs, cell, ',');) cells.push_back(cell);
    REQUIRE(cells.size() == 7);
    CHECK(std::strtod(cells[5].c_str(), nullptr) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cells[6] == "0");
}

TEST_CASE("run oracle") {
    cli::ExperimentConfig cfg;
    cfg.input_path = bundled_csv();
    cfg.command = cli::Command::Oracle;
    cfg.penalty.sigma_sq = 1.0;
    cfg.target = cli::TargetSpec{};
    cfg.target->coeffs = std::vector<double>{0.5, 0.5};
    cfg.oracle = cli::OracleOptions{};
    cfg.oracle->kinds = {RateKind::MS, RateKind::C, RateKind::L, RateKind::S};
    cfg.oracle->d = 1;
    cfg.output_dir = "cli_out_oracle";
    cli::run(cfg);

    const std::string csv = slurp("cli_out_oracle/report.csv");
    std::istringstream lines(csv);
    std::string line;
    int rows = 0;
    std::getline(lines, line);
    CHECK(line == "kind,value,certificate,lambda_1,lambda_2");
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 4);
    CHECK(csv.find("MS,") != std::string::npos);
    CHECK(csv.find("C,") != std::string::npos);

    cfg.oracle->kinds.clear();
    CHECK_THROWS_AS(cli::run(cfg), ConfigError);
}

TEST_CASE("run check-ineq and determinism of the report") {
    cli::ExperimentConfig cfg;
    cfg.input_path = bundled_csv();
    cfg.command = cli::Command::CheckIneq;
    cfg.penalty.sigma_sq = 0.04;
    cfg.target = cli::TargetSpec{};
    cfg.target->column = "f1";
    cfg.noise = NoiseModel{0.2, 7};
    cfg.replicates = 20;
    cfg.output_dir = "cli_out_ineq_a";
    cli::run(cfg);
    cfg.output_dir = "cli_out_ineq_b";
    cli::run(cfg);
    CHECK(slurp("cli_out_ineq_a/report.csv") == slurp("cli_out_ineq_b/report.csv"));
    CHECK(slurp("cli_out_ineq_a/report.csv").find("lhs,lhs_stderr,rhs,slack,replicates") !=
          std::string::npos);

    // Seed override changes the Monte Carlo stream.
    cli::RunOptions opts;
    opts.seed_override = 8;
    cfg.output_dir = "cli_out_ineq_c";
    cli::run(cfg, opts);
    CHECK(slurp("cli_out_ineq_c/report.csv") != slurp("cli_out_ineq_a/report.csv"));

    // l1 inequality requires the 2sqrt2 factor.
    cfg.penalty.kind = PenaltyKind::L1;
    cfg.penalty.l1_factor = L1Factor::FourSqrtTwo;
    CHECK_THROWS_AS(cli::run(cfg), ConfigError);

    // Seed override without a noise block is a config error.
    cli::ExperimentConfig no_noise = cfg;
    no_noise.noise.reset();
    CHECK_THROWS_AS(cli::run(no_noise, opts), ConfigError);
}

TEST_CASE("run rate-sweep writes csv and optional plot") {
    cli::ExperimentConfig cfg;
    cfg.input_path = bundled_csv();
    cfg.command = cli::Command::RateSweep;
    cfg.penalty.sigma_sq = 0.25;
    cfg.noise = NoiseModel{0.5, 3};
    cfg.replicates = 4;
    cfg.grids = cli::Grids{};
    cfg.grids->n = {24, 48};
    cfg.grids->m = {4};
    cfg.grids->kind = RateKind::MS;
    cfg.output_dir = "cli_out_sweep";
    cli::run(cfg);
    CHECK(fs::exists("cli_out_sweep/report.csv"));
    CHECK(fs::exists("cli_out_sweep/report.svg"));
    const std::string csv = slurp("cli_out_sweep/report.csv");
    CHECK(csv.find("n,m,risk,risk_stderr,psi,ratio") != std::string::npos);

    cli::RunOptions opts;
    opts.plot = false;
    opts.out_override = "cli_out_sweep2";
    cli::run(cfg, opts);
    CHECK(fs::exists("cli_out_sweep2/report.csv"));
    CHECK_FALSE(fs::exists("cli_out_sweep2/report.svg"));
}

TEST_CASE("exit codes map error types") {
    auto code_of = [](auto thrower) {
        try {
            thrower();
        } catch (...) {
            return cli::exit_code_for_current_exception();
        }
        return 0;
    };
    CHECK(code_of([] { throw ConfigError("x"); }) == 2);
    CHECK(code_of([] { throw BudgetError("x"); }) == 3);
    CHECK(code_of([] { throw ConvergenceError("x", 1.0); }) == 4);
    CHECK(code_of([] { throw IoError("x"); }) == 5);
    CHECK(code_of([] { throw std::runtime_error("x"); }) == 2);
    CHECK(code_of([] { throw DomainError("x"); }) == 2);
}

TEST_CASE("resolve_target failures surface as config errors") {
    cli::ExperimentConfig cfg;
    cfg.input_path = bundled_csv();
    cfg.command = cli::Command::Oracle;
    cfg.penalty.sigma_sq = 1.0;
    cfg.oracle = cli::OracleOptions{};
    cfg.oracle->kinds = {RateKind::MS};
    cfg.target = cli::TargetSpec{};
    cfg.target->column = "nope";
    cfg.output_dir = "cli_out_badtarget";
    CHECK_THROWS_AS(cli::run(cfg), ConfigError);

    cfg.target->column.reset();
    cfg.target->coeffs = std::vector<double>{1.0, 2.0, 3.0};  // wrong length
    CHECK_THROWS_AS(cli::run(cfg), ConfigError);
}
