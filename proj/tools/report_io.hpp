#pragma once

// JSON and CSV forms of verification reports, sweep configs read from JSON,
// and the two-point table written by `bbridge tabulate`.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "bbridge/checks.hpp"
#include "bbridge/verifier.hpp"

namespace bbridge::io {

struct WriteOptions {
    /// drop runtime_ms and the generated_at stamp so reruns compare byte for byte
    bool no_timestamp = false;
};

/// {claim_id, params, lhs, rhs, abs_residual, rel_residual, tolerance, passed,
///  runtime_ms, metric, diagnostics, error?}
nlohmann::ordered_json report_json(const verifier::VerificationReport& rep, const WriteOptions& opt);

/// Header plus one row per report; diagnostics are left out.
void write_reports_csv(const std::vector<verifier::VerificationReport>& reps, std::ostream& out,
                       const WriteOptions& opt);

/// Unknown keys, wrong types and out-of-range values throw std::invalid_argument.
verifier::SweepConfig parse_sweep_config(const nlohmann::ordered_json& j);
nlohmann::ordered_json sweep_config_json(const verifier::SweepConfig& cfg);

nlohmann::ordered_json check_summary_json(const checks::CheckSummary& s, const WriteOptions& opt);
void write_check_cells_csv(const checks::CheckSummary& s, std::ostream& out);

struct TwoPointRow {
    double s = 0.0;
    double r = 0.0;
    double value = 0.0;
};

/// s_i = i / (n + 1), i = 1..n, every ordered pair including the diagonal.
std::vector<TwoPointRow> tabulate_two_point(double delta, int n);
void write_table_csv(const std::vector<TwoPointRow>& rows, std::ostream& out);
/// Reads what write_table_csv wrote; throws std::invalid_argument on bad input.
std::vector<TwoPointRow> read_table_csv(std::istream& in);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace bbridge::io
