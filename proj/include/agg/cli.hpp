#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agg/penalty.hpp"
#include "agg/sim.hpp"

namespace agg::cli {

enum class Command { Aggregate, Oracle, CheckIneq, RateSweep };

/// Target f specified either as a named CSV column or as a coefficient
/// vector over the dictionary.
struct TargetSpec {
    std::optional<std::string> column;
    std::optional<std::vector<double>> coeffs;
};

struct OracleOptions {
    std::vector<RateKind> kinds;  // which oracles to compute
    int d = 2;                    // for S
    double gap_tol = 1e-8;        // for C
};

struct Grids {
    std::vector<int> n;
    std::vector<int> m;
    std::optional<int> d;
    RateKind kind = RateKind::MS;
};

struct ExperimentConfig {
    int schema_version = 1;
    std::string input_path;
    Command command = Command::Aggregate;
    PenaltyConfig penalty;
    std::optional<TargetSpec> target;
    std::optional<NoiseModel> noise;
    int replicates = 0;
    std::optional<OracleOptions> oracle;
    std::optional<Grids> grids;
    int max_support = -1;  // -1: all of M
    bool greedy = false;
    std::string output_dir = ".";
};

/// Parses the JSON config text. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Serializes back to JSON; parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

struct RunOptions {
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_override;
    bool plot = true;
};

/// Dispatches the configured command and writes report.csv (and report.svg
/// for sweeps) under the output directory. Prints a one-line summary.
/// Throws the library error types on failure.
void run(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Maps a thrown library error onto the documented exit code.
int exit_code_for_current_exception();

void emit_csv(const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows, const std::string& path);

/// Static log-log plot of risk and psi against the swept variable.
/// Returns false (with a warning) when fewer than 2 rows.
bool emit_plot(const std::vector<SweepRow>& rows, const std::string& path);

/// 17-significant-digit decimal rendering used in every CSV.
std::string format_real(double v);

}  // namespace agg::cli
