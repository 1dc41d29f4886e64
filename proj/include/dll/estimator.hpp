#pragma once

#include <Eigen/Dense>

#include <utility>

#include "dll/decorrelate.hpp"
#include "dll/kernel.hpp"

namespace dll {

/// (1/n) sum_i d_hat_i (X1_i - x0) K_h(X1_i). Throws singular when
/// |S_n| < 1e-12 h^2 and insufficient_data on an empty window.
double s_n(const DecorrelationWeights& weights, const Eigen::VectorXd& X1, const KernelSpec& spec);

/// sum_i d_hat_i R_i K_h(X1_i) / (n S_n).
double dll_point(const DecorrelationWeights& weights, const Eigen::VectorXd& residuals,
                 const Eigen::VectorXd& X1, const KernelSpec& spec);

/// sqrt(sum (y - yhat)^2 / (n - df)), floored at sigma_floor(y).
double sigma1_estimate(const Eigen::VectorXd& y, const Eigen::VectorXd& predictions, int df);

/// sigma1^2 sum_i d_hat_i^2 K_h(X1_i)^2 / (n^2 S_n^2).
double variance_estimate(const DecorrelationWeights& weights, const Eigen::VectorXd& X1,
                         const KernelSpec& spec, double sigma1, double s_n_value);

/// estimate -/+ z_{alpha/2} sqrt(variance). With `literal` the half-width is
/// z_{alpha/2} * variance instead.
std::pair<double, double> confidence_interval(double estimate, double variance, double alpha,
                                              bool literal = false);

/// Rejects H0: f1'(x0) = 0 when |estimate| >= z_{alpha/2} sqrt(variance).
bool test_zero(double estimate, double variance, double alpha);

/// Gaussian kernel density estimate at x0 with Silverman's bandwidth
/// 0.9 min(sd, IQR / 1.34) n^(-1/5).
double kde_density_at(const Eigen::VectorXd& X1, double x0);

/// c (n pi)^(-1/5).
double bandwidth_from_density(Eigen::Index n, double density, double c);

/// bandwidth_from_density with pi estimated by kde_density_at. Requires n >= 20
/// and a density estimate of at least 1e-6 at x0.
double bandwidth_default(const Eigen::VectorXd& X1, double x0, double c = 0.5);

}  // namespace dll
