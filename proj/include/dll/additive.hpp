#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "dll/bspline.hpp"
#include "dll/transforms.hpp"

namespace dll {

/// Per-coordinate penalty levels: rho on the smoothness seminorm, lambda on
/// the empirical norm.
struct Penalty {
    double rho = 0.0;
    double lambda = 0.0;
};

/// rho = c_rho n^(-m/(2m+1)), lambda = c_lambda sqrt(log(max(p, 2)) / n).
Penalty default_penalties(int n, int p, int m, double c_rho = 0.01, double c_lambda = 2.0);

struct AdditiveOptions {
    int degree = 3;
    int num_interior_knots = -1;  // negative: ceil(n^(1/5)) + 2
    KnotPlacement placement = KnotPlacement::quantile;
    int m = 2;
    double fit_tol = 1e-7;        // relative objective change
    int max_sweeps = 500;
    bool group_lasso_only = false;  // drop the smoothness penalty
};

/// One fitted component g_j(z) = (B(z) - offset)' beta.
struct AdditiveComponent {
    BasisSpec basis;
    Eigen::VectorXd beta;     // spline coefficients
    Eigen::VectorXd offset;   // training column means of the basis
    Penalty penalty;
    bool active = false;
    int dim = 0;              // dimension of the centred basis span
    double smoothness = 0.0;  // ||g_j||_F
    double empirical_norm = 0.0;  // ||g_j||_n on the training sample

    double value(double z) const;
};

struct AdditiveFit {
    double intercept = 0.0;
    std::vector<AdditiveComponent> components;
    std::vector<Transform> transforms;  // empty when fitted on Z directly
    std::vector<std::size_t> active_set;
    std::vector<double> objective_trace;
    bool converged = false;
    int sweeps = 0;
    Eigen::VectorXd fitted;  // in-sample intercept + sum of components

    std::size_t dim() const { return components.size(); }
    /// Sum of active basis dimensions plus one for the intercept.
    int degrees_of_freedom() const;
    /// Sum over components of the smoothness seminorm of g_j.
    double smoothness_total() const;
};

/// Block coordinate descent on
///   (1/n) ||y - a - sum_j g_j||^2 + sum_j (rho_j ||g_j||_F + lambda_j ||g_j||_n)
/// over centred spline components of the columns of Z (entries in [0, 1]).
/// `penalties` holds one entry per column or a single shared entry.
AdditiveFit fit_doubly_penalized(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                                 const std::vector<Penalty>& penalties,
                                 const AdditiveOptions& options = {});

/// Empirical-CDF transforms fitted on each column of X.
std::vector<Transform> empirical_transforms(const Eigen::MatrixXd& X);

/// Transforms each raw column with `transforms` (one per column) and fits.
AdditiveFit fit_additive(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         std::vector<Transform> transforms, const std::vector<Penalty>& penalties,
                         const AdditiveOptions& options = {});

/// Component j evaluated at the raw value x (transformed first when the fit
/// carries transforms).
double component_value(const AdditiveFit& fit, std::size_t j, double x, bool* clamped = nullptr);

/// Intercept plus every component except `exclude`. `row` lists the raw values
/// of the remaining coordinates in order, so it has dim() - 1 entries.
double predict_nuisance(const AdditiveFit& fit, const Eigen::Ref<const Eigen::RowVectorXd>& row,
                        std::size_t exclude = 0, int* clamp_count = nullptr);

/// predict_nuisance for every row of `rows`.
Eigen::VectorXd predict_nuisance_rows(const AdditiveFit& fit, const Eigen::MatrixXd& rows,
                                      std::size_t exclude = 0, int* clamp_count = nullptr);

Eigen::VectorXd nuisance_residuals(const Eigen::VectorXd& y, const Eigen::VectorXd& f2hat);

/// Largest root-mean-square difference between either fit's nuisance
/// prediction and the true nuisance values, over the rows of `fresh_rows`.
double err_f2_metric(const AdditiveFit& fit_a, const AdditiveFit& fit_b,
                     const Eigen::MatrixXd& fresh_rows, const Eigen::VectorXd& truth_values,
                     std::size_t exclude = 0);

/// Minimiser over theta of ||theta - z||^2 + rho ||W^(1/2) theta|| + lambda ||theta||
/// with W = diag(omega) >= 0. The seminorm step is solved by bisection on the
/// weighted block norm, followed by group soft-thresholding.
Eigen::VectorXd double_penalty_prox(const Eigen::VectorXd& z, const Eigen::VectorXd& omega,
                                    double rho, double lambda);

}  // namespace dll
