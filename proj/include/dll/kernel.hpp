#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>

namespace dll {

/// Evaluation point and bandwidth of a boxcar window [x0 - h, x0 + h].
class KernelSpec {
public:
    KernelSpec(double x0, double h);

    double x0() const noexcept { return x0_; }
    double h() const noexcept { return h_; }
    bool in_window(double x) const noexcept { return std::abs(x - x0_) <= h_; }

private:
    double x0_;
    double h_;
};

/// Indicator kernel 1(|u| <= 1).
double kernel_base(double u);

/// Rescaled kernel: 1/h inside the window, 0 outside.
double kernel_weight(double x, const KernelSpec& spec);

/// Kernel weights K_h(x_i) for every entry of xs.
Eigen::VectorXd kernel_weights(const Eigen::VectorXd& xs, const KernelSpec& spec);

/// Number of observations inside the window.
std::size_t effective_sample_size(const Eigen::VectorXd& xs, const KernelSpec& spec);

inline constexpr std::size_t kDefaultMinWindowPoints = 10;

/// Classical local linear estimate of the first derivative at x0:
///
///   sum_i W_i y_i K_h(x_i) / sum_i W_i (x_i - x0) K_h(x_i),
///
/// where W_i is (x_i - x0) centred by its kernel-weighted mean. With the boxcar
/// kernel this is the OLS slope of the in-window points.
double local_linear_slope(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys,
                          const KernelSpec& spec,
                          std::size_t min_window_points = kDefaultMinWindowPoints);

}  // namespace dll
