#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dll/pipeline.hpp"

namespace dll {

enum class FunctionId { linear, quadratic, sine, bump, zero };

const char* to_string(FunctionId id);
FunctionId parse_function_id(const std::string& name);

/// Catalog function with its exact derivative.
///   linear a x, quadratic a x^2, sine a sin(b x), bump a exp(-x^2 / (2 b^2)), zero.
struct FunctionSpec {
    FunctionId id = FunctionId::zero;
    double a = 1.0;
    double b = 1.0;

    double value(double x) const;
    double derivative(double x) const;
};

enum class DesignCov { identity, ar1 };

struct NuisanceTerm {
    Eigen::Index coordinate = 0;  // column of X2
    FunctionSpec f;
};

struct SimConfig {
    Eigen::Index n = 500;
    Eigen::Index p = 5;
    DesignCov design = DesignCov::identity;
    double rho = 0.5;                 // ar1 correlation
    Eigen::VectorXd gamma_true;       // length p
    double sigma2_true = 1.0;
    FunctionSpec f1{FunctionId::sine, 1.0, 1.0};
    std::vector<NuisanceTerm> nuisance;
    double sigma1_true = 0.5;
    double x0 = 0.0;
    std::uint64_t seed = 1;

    void validate() const;
    double target() const { return f1.derivative(x0); }
};

/// Independent stream for a named purpose under one replication seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t offset);

/// Rows of X2 drawn i.i.d. N(0, Sigma) and X1 = X2'gamma + N(0, sigma2^2).
std::pair<Eigen::VectorXd, Eigen::MatrixXd> gen_design(const SimConfig& config);

/// X2 rows only, from an explicit seed.
Eigen::MatrixXd gen_covariates(const SimConfig& config, Eigen::Index rows, std::uint64_t seed);

/// y = f1(X1) + sum_j f_j(X2_j) + N(0, sigma1^2).
Eigen::VectorXd gen_response(const Eigen::VectorXd& X1, const Eigen::MatrixXd& X2,
                             const SimConfig& config);

/// sum_j f_j(X2_j) for every row.
Eigen::VectorXd nuisance_truth(const Eigen::MatrixXd& X2, const SimConfig& config);

Dataset gen_dataset(const SimConfig& config);

struct MethodOptions {
    DllOptions dll{};
    bool oracle = false;          // exact shifts from the true projection
    bool known_sigma1 = false;    // use sigma1_true in the variance
    bool compute_errors = true;   // err_D and err_f2 against the truth
    Eigen::Index fresh_draws = 2000;
};

struct ReplicationRecord {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double estimate = 0.0;
    double truth = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double variance = 0.0;
    double sigma1 = 0.0;
    bool covered = false;
    bool rejected = false;
    double err_D = 0.0;   // NaN when not computed
    double err_f2 = 0.0;  // NaN when not computed
};

/// One full pipeline run on fresh data drawn with config.seed. Failures are
/// recorded in the returned record.
ReplicationRecord run_replication(const SimConfig& config, const MethodOptions& method);

struct MCReport {
    double coverage = 0.0;
    double mean_ci_length = 0.0;
    double bias = 0.0;
    double sd = 0.0;
    double rmse = 0.0;
    double rejection_rate = 0.0;
    double mean_err_D = 0.0;
    double mean_err_f2 = 0.0;
    int replications = 0;
    int failures = 0;
};

struct MonteCarloResult {
    MCReport report;
    std::vector<ReplicationRecord> records;
};

/// Worker count from DLL_THREADS, else the hardware concurrency.
int default_thread_count();

/// Replications use seeds config.seed + 1 .. config.seed + B. Throws when every
/// replication fails.
MonteCarloResult monte_carlo(const SimConfig& config, int B, const MethodOptions& method,
                             int threads = 0);

/// Aggregates records; failures are counted and excluded.
MCReport summarize(const std::vector<ReplicationRecord>& records);

enum class Contamination { correlated, orthogonal };

struct NaivePair {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double dll_error = 0.0;
    double naive_error = 0.0;
};

struct NaiveComparison {
    double dll_bias = 0.0;
    double dll_sd = 0.0;
    double naive_bias = 0.0;
    double naive_sd = 0.0;
    double win_rate = 0.0;  // fraction with |dll error| < |naive error|
    int replications = 0;
    int failures = 0;
    std::vector<NaivePair> pairs;
};

/// Paired comparison of the DLL estimator and the plain local linear slope on
/// the same cross-fitted residuals, after adding c * x2'gamma_true (correlated)
/// or c * sd(x2'gamma_true) * xi with independent xi ~ N(0, 1) (orthogonal) to
/// the nuisance prediction.
NaiveComparison compare_naive(const SimConfig& config, int B, double contamination,
                              Contamination kind, const MethodOptions& method, int threads = 0);

/// Named configurations used by the coverage command and the acceptance run.
struct ReferenceCase {
    std::string name;
    std::string description;
    SimConfig config;
    MethodOptions method;
    int replications = 100;
};

std::vector<std::string> reference_names();
ReferenceCase reference_case(const std::string& name);

}  // namespace dll
