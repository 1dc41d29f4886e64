#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dll/pipeline.hpp"

namespace dll::cli {

enum class Subcommand { fit, simulate, coverage, bandwidth };
enum class ReportFormat { json, csv };

/// Bad invocation. exit_code is 0 for --help, 2 otherwise; message holds the
/// text to print.
class UsageError : public std::runtime_error {
public:
    UsageError(const std::string& message, int exit_code)
        : std::runtime_error(message), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

struct RunConfig {
    Subcommand subcommand = Subcommand::fit;
    std::string input;
    std::string output;          // empty: standard output
    ReportFormat format = ReportFormat::json;
    std::optional<double> x0;
    std::optional<double> h;
    double alpha = 0.05;
    std::string mode = "linear";          // linear | exact_gaussian | general_density
    std::string error_density = "normal"; // normal | laplace | logistic
    std::string projection = "auto";      // auto | ols | scaled_lasso
    std::optional<std::uint64_t> seed;   // fold split seed, or data seed for simulations
    double bandwidth_c = 0.5;
    double c_rho = 0.01;
    double c_lambda = 2.0;
    double lasso_A = 1.01;
    int knots = -1;
    bool intercept = false;
    bool sigma2_per_fold = false;
    bool ci_literal = false;
    std::optional<double> sigma1;
    int min_window = 10;

    // simulate / coverage
    std::string reference = "quick";
    std::optional<int> replications;
    std::optional<int> n;
    bool oracle = false;
    int threads = 0;
    bool compare_naive = false;
    bool orthogonal = false;
    double contamination = 0.3;
};

/// Parses argv. A `--config file.json` object supplies values for any flag
/// (keys are flag names without the leading dashes); explicit flags win.
RunConfig parse_args(int argc, const char* const* argv);
RunConfig parse_args(const std::vector<std::string>& args);

DllOptions to_dll_options(const RunConfig& config);

}  // namespace dll::cli
