#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

#include "dll/kernel.hpp"

namespace dll {

/// Random two-fold partition; fold_a takes the extra element when n is odd.
struct SwapPlan {
    std::vector<Eigen::Index> fold_a;
    std::vector<Eigen::Index> fold_b;
    std::uint64_t seed = 0;
};

SwapPlan swap_split(Eigen::Index n, std::uint64_t seed);

/// Standardised window: mu = (x0 - x2'gamma) / sigma2, L = h / sigma2.
struct GaussianWindow {
    double mu = 0.0;
    double L = 1.0;
};

GaussianWindow make_window(double x2_dot_gamma, double sigma2, const KernelSpec& spec);

/// E[X1 - x0 | X2, X1 in window] under a Gaussian projection error:
///   sigma2 * int_{mu-L}^{mu+L} (t - mu) phi(t) dt / int_{mu-L}^{mu+L} phi(t) dt.
/// Falls back to the linear approximation when the window mass underflows,
/// setting `underflow`.
double shift_exact_gaussian(const GaussianWindow& window, double sigma2, bool* underflow = nullptr);

/// Second-order approximation h^2 (x2'gamma - x0) / (3 sigma2^2).
double shift_linear(double x2_dot_gamma, double sigma2, const KernelSpec& spec);

/// Same conditional mean for an arbitrary standardised error density, by
/// adaptive Simpson quadrature.
double shift_general(const std::function<double(double)>& density, const GaussianWindow& window,
                     double sigma2);

enum class WeightMode { exact_gaussian, linear, oracle_known, general_density };

const char* to_string(WeightMode mode);

struct DecorrelationWeights {
    Eigen::VectorXd d_tilde;
    Eigen::VectorXd d_hat;
    double centering_shift = 0.0;
    WeightMode mode = WeightMode::linear;
};

/// d_tilde = (X1 - x0) - shift, centred by its kernel-weighted mean.
DecorrelationWeights build_weights(const Eigen::VectorXd& X1, const Eigen::VectorXd& shifts,
                                   const KernelSpec& spec, WeightMode mode);

/// Shifts for every observation given the fitted linear index x2'gamma.
/// `density` is used only in general_density mode. `underflow_count` counts
/// exact-Gaussian fallbacks.
Eigen::VectorXd compute_shifts(const Eigen::VectorXd& x2_dot_gamma, const Eigen::VectorXd& sigma2,
                               const KernelSpec& spec, WeightMode mode,
                               const std::function<double(double)>& density = {},
                               int* underflow_count = nullptr);

/// sqrt((1/n) sum (d_hat - oracle d_hat)^2 K_h(X1)).
double err_D_metric(const DecorrelationWeights& weights, const DecorrelationWeights& oracle,
                    const Eigen::VectorXd& X1, const KernelSpec& spec);

/// (|x0| + h + ||gamma||_2 sqrt(log n)) / sigma2.
double growth_constant(const KernelSpec& spec, const Eigen::VectorXd& gamma, double sigma2,
                       Eigen::Index n);

}  // namespace dll
