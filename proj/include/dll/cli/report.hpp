#pragma once

#include <json.hpp>

#include <string>

#include "dll/cli/args.hpp"
#include "dll/pipeline.hpp"
#include "dll/simulate.hpp"

namespace dll::cli {

using nlohmann::json;

// Report schema (JSON):
//   fit:      estimate, s_n, sigma1, variance, ci_low, ci_high, alpha, reject_zero,
//             n_effective, mode, weight_mode, x0, h, n, p,
//             diagnostics {err_D, C_u, sigma2, centering_shift, underflow_count,
//                          clamp_count, projection_support, projection_method, flags}
//   coverage: report {coverage, mean_ci_length, bias, sd, rmse, rejection_rate,
//                     mean_err_D, mean_err_f2, replications, failures}, records [...]
//   naive:    dll_bias, dll_sd, naive_bias, naive_sd, win_rate, replications,
//             failures, pairs [...]
// Missing or undefined numbers are written as null.

json to_json(const DllFit& fit);
DllFit dll_fit_from_json(const json& j);

json to_json(const MCReport& report);
MCReport mc_report_from_json(const json& j);

json to_json(const ReplicationRecord& record);
ReplicationRecord replication_from_json(const json& j);

json to_json(const MonteCarloResult& result);
json to_json(const NaiveComparison& result);

/// Empty path or "-" writes to standard output. CSV output of Monte Carlo
/// results writes one row per replication to `path` and the aggregate to
/// `<stem>.summary.csv`.
void emit_report(const DllFit& fit, const std::string& path, ReportFormat format);
void emit_report(const MonteCarloResult& result, const std::string& path, ReportFormat format);
void emit_report(const NaiveComparison& result, const std::string& path, ReportFormat format);

/// Path of the aggregate file written next to a per-replication CSV.
std::string summary_path(const std::string& path);

}  // namespace dll::cli
