#pragma once

#include <stdexcept>
#include <string>

namespace agg {

// All library failures are reported through these types so the CLI can map
// them onto distinct exit codes.

struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Combinatorial search would exceed its enumeration budget.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConvergenceError : std::runtime_error {
    double worst_violation = 0.0;
    ConvergenceError(const std::string& msg, double worst)
        : std::runtime_error(msg), worst_violation(worst) {}
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace agg
