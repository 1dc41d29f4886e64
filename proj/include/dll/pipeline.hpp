#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dll/additive.hpp"
#include "dll/decorrelate.hpp"
#include "dll/kernel.hpp"
#include "dll/linear_models.hpp"
#include "dll/transforms.hpp"

namespace dll {

struct Dataset {
    Eigen::VectorXd y;
    Eigen::VectorXd x1;
    Eigen::MatrixXd x2;  // n x p, p may be 0

    Eigen::Index n() const { return y.size(); }
    Eigen::Index p() const { return x2.cols(); }
    void validate() const;
};

enum class ProjectionChoice { automatic, ols, scaled_lasso };

const char* to_string(ProjectionChoice choice);

struct DllOptions {
    double alpha = 0.05;
    std::optional<double> h;     // default: bandwidth_default(x1, x0, bandwidth_c)
    double bandwidth_c = 0.5;
    WeightMode weight_mode = WeightMode::linear;
    ProjectionChoice projection = ProjectionChoice::automatic;
    double lasso_A = 1.01;
    bool projection_intercept = false;
    bool sigma2_pooled = true;   // whole-data sigma2; otherwise the other fold's
    double c_rho = 0.01;
    double c_lambda = 2.0;
    AdditiveOptions additive{};
    std::vector<ScalarFn> known_cdfs;   // one per coordinate (x1 first) or empty
    std::optional<double> sigma1_known;
    std::size_t min_window_points = kDefaultMinWindowPoints;
    std::uint64_t seed = 0;
    bool ci_literal = false;
    ScalarFn error_density;      // standardised projection-error density, general_density mode

    void validate() const;
};

/// Models trained on one fold.
struct FoldModel {
    ProjectionFit projection;
    AdditiveFit additive;
};

/// Cross-fitted nuisance quantities for every observation: fold-a rows use the
/// models trained on fold b and vice versa.
struct CrossFitState {
    SwapPlan plan;
    FoldModel fold_a;
    FoldModel fold_b;
    ProjectionFit whole;         // whole-data projection
    Eigen::VectorXd index;       // x2'gamma (+ intercept)
    Eigen::VectorXd sigma2;      // per-observation projection scale
    Eigen::VectorXd f2hat;       // nuisance prediction
    double sigma1 = 0.0;         // pooled in-fold residual scale
    int clamp_count = 0;
    std::vector<std::string> flags;
};

enum class FitMode { estimated, oracle };

const char* to_string(FitMode mode);

struct DllDiagnostics {
    std::optional<double> err_D;
    double C_u = 0.0;
    double sigma2 = 0.0;
    double centering_shift = 0.0;
    int underflow_count = 0;
    int clamp_count = 0;
    int projection_support = 0;
    std::string projection_method;
    std::vector<std::string> flags;
};

struct DllFit {
    double estimate = 0.0;
    double s_n = 0.0;
    double sigma1 = 0.0;
    double variance = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double alpha = 0.05;
    bool reject_zero = false;
    Eigen::Index n_effective = 0;
    FitMode mode = FitMode::estimated;
    WeightMode weight_mode = WeightMode::linear;
    double x0 = 0.0;
    double h = 0.0;
    Eigen::Index n = 0;
    Eigen::Index p = 0;
    DllDiagnostics diagnostics;
};

/// Intermediate quantities, filled on request.
struct PipelineTrace {
    CrossFitState state;
    DecorrelationWeights weights;
    Eigen::VectorXd residuals;
    Eigen::VectorXd shifts;
};

KernelSpec resolve_bandwidth(const Dataset& data, double x0, const DllOptions& options);

/// Splits the data, trains both folds and cross-applies them. With p = 0 no
/// models are trained; sigma1 then comes from a whole-data spline fit on x1.
CrossFitState cross_fit(const Dataset& data, const DllOptions& options);

/// Estimate, variance, interval and test from precomputed shifts and residuals.
DllFit assemble(const Dataset& data, const CrossFitState& state, const KernelSpec& spec,
                const Eigen::VectorXd& shifts, const Eigen::VectorXd& residuals,
                const DllOptions& options, FitMode mode, PipelineTrace* trace = nullptr);

/// Shifts from the cross-fitted projection for the configured weight mode.
Eigen::VectorXd estimated_shifts(const CrossFitState& state, const KernelSpec& spec,
                                 const DllOptions& options, int* underflow_count = nullptr);

DllFit dll_pipeline(const Dataset& data, double x0, const DllOptions& options = {},
                    PipelineTrace* trace = nullptr);

/// As dll_pipeline, with exact Gaussian shifts from the true projection.
DllFit oracle_pipeline(const Dataset& data, double x0, const Eigen::VectorXd& true_gamma,
                       double true_sigma2, const DllOptions& options = {},
                       PipelineTrace* trace = nullptr);

}  // namespace dll
