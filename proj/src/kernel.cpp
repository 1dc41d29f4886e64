#include "dll/kernel.hpp"

#include <cmath>
#include <set>
#include <string>

#include "dll/error.hpp"

namespace dll {

KernelSpec::KernelSpec(double x0, double h) : x0_(x0), h_(h) {
    if (!(h > 0.0) || !std::isfinite(h))
        fail(ErrorKind::invalid_argument, "bandwidth must be positive, got " + std::to_string(h));
    if (!std::isfinite(x0)) fail(ErrorKind::invalid_argument, "evaluation point must be finite");
}

double kernel_base(double u) { return std::abs(u) <= 1.0 ? 1.0 : 0.0; }

double kernel_weight(double x, const KernelSpec& spec) {
    return spec.in_window(x) ? 1.0 / spec.h() : 0.0;
}

Eigen::VectorXd kernel_weights(const Eigen::VectorXd& xs, const KernelSpec& spec) {
    Eigen::VectorXd k(xs.size());
    for (Eigen::Index i = 0; i < xs.size(); ++i) k[i] = kernel_weight(xs[i], spec);
    return k;
}

std::size_t effective_sample_size(const Eigen::VectorXd& xs, const KernelSpec& spec) {
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < xs.size(); ++i)
        if (spec.in_window(xs[i])) ++count;
    return count;
}

double local_linear_slope(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys,
                          const KernelSpec& spec, std::size_t min_window_points) {
    if (xs.size() != ys.size())
        fail(ErrorKind::invalid_argument, "local_linear_slope: xs and ys differ in length");

    const Eigen::VectorXd k = kernel_weights(xs, spec);
    const double ksum = k.sum();
    std::size_t count = 0;
    std::set<double> distinct;
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
        if (k[i] > 0.0) {
            ++count;
            if (distinct.size() < 2) distinct.insert(xs[i]);
        }
    }
    if (distinct.size() < 2 || count < min_window_points)
        fail(ErrorKind::insufficient_data,
             "local_linear_slope: " + std::to_string(count) + " in-window points, need " +
                 std::to_string(std::max<std::size_t>(min_window_points, 2)) +
                 " with at least 2 distinct");

    const Eigen::ArrayXd dx = xs.array() - spec.x0();
    const double centre = (dx * k.array()).sum() / ksum;
    const Eigen::ArrayXd w = dx - centre;
    const double numerator = (w * ys.array() * k.array()).sum();
    const double denominator = (w * dx * k.array()).sum();
    const double tol = 1e-12 * spec.h() * spec.h() * static_cast<double>(count);
    if (std::abs(denominator) < tol)
        fail(ErrorKind::singular, "local_linear_slope: singular denominator");
    return numerator / denominator;
}

}  // namespace dll
