#pragma once

// Command implementations behind tools/radvel. They never call exit(); the
// returned integer is the process exit code.

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "radvel/eval.hpp"
#include "radvel/pipeline.hpp"

namespace radvel::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,  // bad flags or configuration
  kExitIo = 2,     // unreadable/unwritable/malformed files
  kExitEmpty = 3,  // nothing to score
};

/// Maps an error code onto the exit code table above.
int exit_code_for(Errc code) noexcept;

/// Reads scans from `in` one at a time and writes one log row per scan as
/// soon as the scan is complete. Returns the number of scans processed.
/// Throws on malformed input; per-scan estimation failures only show up in
/// the status column.
std::size_t run_estimation(std::istream& in, std::ostream& out, const EstimatorConfig& cfg,
                           std::ostream& log);

/// "-" selects stdin/stdout. Diagnostics go to `log`.
int run_estimate_command(const std::string& config_path, const std::string& input_path,
                         const std::string& output_path, std::ostream& log);

nlohmann::json report_to_json(const metrics::ErrorReport& report);
/// Per-axis AVE/RMSE rounded to 3 decimals.
std::string format_report_table(const metrics::ErrorReport& report);

/// Writes the JSON report to report_path ("-" or empty for `out`) and the
/// table to `out`.
int run_eval_command(const std::string& estimates_path, const std::string& gt_path,
                     const metrics::ExtrinsicSpec& extrinsics, const std::string& report_path,
                     std::ostream& out, std::ostream& log);

/// Scan fixture from a synth job; optionally the matching ground truth.
int run_synth_command(const std::string& spec_path, const std::string& output_path,
                      const std::string& gt_path, std::ostream& log);

}  // namespace radvel::cli
