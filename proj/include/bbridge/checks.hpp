#pragma once

// Self-test batteries for the special functions, shared by the command line
// front end and the acceptance runner.

#include <cstdint>
#include <string>
#include <vector>

namespace bbridge::checks {

struct CheckCell {
    std::string group;  ///< contiguous | binomial | connection | recursion | asymptotic
    std::string label;
    double value = 0.0;
    double reference = 0.0;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string error;  ///< exception text when the evaluation threw
};

struct CheckSummary {
    std::vector<CheckCell> cells;
    std::size_t passed = 0;
    std::size_t failed = 0;
    double runtime_ms = 0.0;

    bool all_passed() const { return failed == 0; }
    /// Cells of one group, in battery order.
    std::vector<CheckCell> group(const std::string& name) const;
};

struct SpecfunBatteryOptions {
    /// 100 contiguous draws instead of 1000, coarser grids elsewhere
    bool quick = false;
    /// stop tolerance handed to every 2F1 series
    double series_rel_tol = 1e-14;
    std::uint64_t seed = 2024;
};

/// Contiguous relation on random draws in [0.3, 4]^3 x (0.05, 0.7), binomial
/// collapse, series against connection formula, Gamma recursion, and the
/// z -> 1 divergence rate for ((d+1)/2, (d+1)/2, d/2), d in {1, 1.5, 3}.
/// Evaluation errors become failed cells.
CheckSummary specfun_battery(const SpecfunBatteryOptions& opt = {});

}  // namespace bbridge::checks
