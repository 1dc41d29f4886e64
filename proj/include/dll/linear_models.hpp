#pragma once

#include <Eigen/Dense>

#include <vector>

namespace dll {

enum class ProjectionMethod { ols, scaled_lasso, oracle };

const char* to_string(ProjectionMethod method);

/// Linear projection X1 = X2' gamma + delta with residual scale sigma2.
struct ProjectionFit {
    Eigen::VectorXd gamma;        // one entry per column of X2
    double intercept = 0.0;       // nonzero only when fitted with an intercept
    double sigma2 = 0.0;          // residual standard deviation, >= sigma floor
    ProjectionMethod method = ProjectionMethod::ols;
    int iterations = 0;
    bool converged = true;
    std::vector<double> objective_trace;  // scaled Lasso only, one entry per alternation
    double penalty_level = 0.0;           // scaled Lasso: sigma2 * lambda0 of the last Lasso step
    Eigen::VectorXd column_scale;         // scaled Lasso: internal column rescaling

    Eigen::VectorXd predict(const Eigen::MatrixXd& X2) const;
    double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
    int support_size() const;
};

/// Floor on residual scales: 1e-8 * sd(values), or 1e-8 when values are constant.
double sigma_floor(const Eigen::VectorXd& values);

struct LassoOptions {
    double coef_tol = 1e-9;   // max coefficient change (scaled by column norm)
    int max_sweeps = 10000;
    double kkt_tol = 1e-8;
};

/// Coordinate descent for (1/(2n))||y - X beta||^2 + lambda ||beta||_1.
/// Alternates full sweeps with sweeps over the active set. Throws
/// non_convergence when max_sweeps is exhausted.
Eigen::VectorXd lasso_coordinate_descent(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                         double lambda, const Eigen::VectorXd& warm_start,
                                         const LassoOptions& options = {});

/// Largest violation of the Lasso subgradient conditions at beta.
double kkt_check(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                 const Eigen::VectorXd& beta);

/// Least squares projection; requires n > p + 1 and full column rank.
ProjectionFit ols_projection(const Eigen::MatrixXd& X2, const Eigen::VectorXd& X1,
                             bool intercept = false);

struct ScaledLassoOptions {
    double A = 1.01;          // penalty constant, must exceed 1
    int max_outer = 50;
    double sigma_rel_tol = 1e-6;
    bool intercept = false;
    LassoOptions inner{};
};

/// Joint minimiser over (gamma, sigma2) of
///   (1/(2 n sigma2)) ||X1 - X2 gamma||^2 + sigma2/2 + sqrt(2 A log p / n) ||gamma||_1,
/// by alternating a Lasso step at fixed sigma2 with sigma2 <- ||residual|| / sqrt(n).
/// Columns are rescaled to unit root-mean-square internally; gamma is reported on
/// the original scale. Non-convergence of the outer loop is reported through
/// `converged`, not thrown.
ProjectionFit scaled_lasso(const Eigen::MatrixXd& X2, const Eigen::VectorXd& X1,
                           const ScaledLassoOptions& options = {});

/// Objective of the scaled Lasso in the solver's standardized coordinates.
double scaled_lasso_objective(const Eigen::MatrixXd& X2_std, const Eigen::VectorXd& X1,
                              const Eigen::VectorXd& gamma_std, double sigma2, double lambda0);

}  // namespace dll
