#include "dll/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dll/error.hpp"
#include "dll/linear_models.hpp"
#include "dll/normal.hpp"

namespace dll {
namespace {

void check_aligned(const DecorrelationWeights& weights, const Eigen::VectorXd& X1) {
    if (weights.d_hat.size() != X1.size())
        fail(ErrorKind::invalid_argument, "weights and X1 differ in length");
    if (X1.size() == 0) fail(ErrorKind::insufficient_data, "no observations");
}

double quantile_sorted(const std::vector<double>& sorted, double prob) {
    const double pos = prob * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double s_n(const DecorrelationWeights& weights, const Eigen::VectorXd& X1, const KernelSpec& spec) {
    check_aligned(weights, X1);
    const Eigen::VectorXd k = kernel_weights(X1, spec);
    if (!(k.sum() > 0.0)) fail(ErrorKind::insufficient_data, "S_n: empty kernel window");
    const double value =
        (weights.d_hat.array() * (X1.array() - spec.x0()) * k.array()).sum() /
        static_cast<double>(X1.size());
    if (std::abs(value) < 1e-12 * spec.h() * spec.h())
        fail(ErrorKind::singular, "S_n is numerically zero");
    return value;
}

double dll_point(const DecorrelationWeights& weights, const Eigen::VectorXd& residuals,
                 const Eigen::VectorXd& X1, const KernelSpec& spec) {
    if (residuals.size() != X1.size())
        fail(ErrorKind::invalid_argument, "dll_point: residuals and X1 differ in length");
    const double s = s_n(weights, X1, spec);
    const Eigen::VectorXd k = kernel_weights(X1, spec);
    const double numer = (weights.d_hat.array() * residuals.array() * k.array()).sum();
    return numer / (static_cast<double>(X1.size()) * s);
}

double sigma1_estimate(const Eigen::VectorXd& y, const Eigen::VectorXd& predictions, int df) {
    const Eigen::Index n = y.size();
    if (predictions.size() != n)
        fail(ErrorKind::invalid_argument, "sigma1_estimate: length mismatch");
    if (df < 0 || df >= n)
        fail(ErrorKind::insufficient_data, "sigma1_estimate: df " + std::to_string(df) +
                                               " must be below n = " + std::to_string(n));
    const double rss = (y - predictions).squaredNorm();
    return std::max(std::sqrt(rss / static_cast<double>(n - df)), sigma_floor(y));
}

double variance_estimate(const DecorrelationWeights& weights, const Eigen::VectorXd& X1,
                         const KernelSpec& spec, double sigma1, double s_n_value) {
    check_aligned(weights, X1);
    if (std::abs(s_n_value) < 1e-12 * spec.h() * spec.h())
        fail(ErrorKind::singular, "variance: S_n is numerically zero");
    const Eigen::VectorXd k = kernel_weights(X1, spec);
    const double sum = (weights.d_hat.array().square() * k.array().square()).sum();
    const double n = static_cast<double>(X1.size());
    return sigma1 * sigma1 * sum / (n * n * s_n_value * s_n_value);
}

std::pair<double, double> confidence_interval(double estimate, double variance, double alpha,
                                              bool literal) {
    if (!(variance >= 0.0)) fail(ErrorKind::invalid_argument, "confidence interval: variance < 0");
    const double z = z_critical(alpha);
    const double half = z * (literal ? variance : std::sqrt(variance));
    return {estimate - half, estimate + half};
}

bool test_zero(double estimate, double variance, double alpha) {
    if (!(variance >= 0.0)) fail(ErrorKind::invalid_argument, "test: variance < 0");
    return std::abs(estimate) >= z_critical(alpha) * std::sqrt(variance);
}

double kde_density_at(const Eigen::VectorXd& X1, double x0) {
    const Eigen::Index n = X1.size();
    if (n < 2) fail(ErrorKind::insufficient_data, "kde: need at least two observations");
    const double mean = X1.mean();
    const double sd = std::sqrt((X1.array() - mean).square().sum() / static_cast<double>(n - 1));
    std::vector<double> sorted(X1.data(), X1.data() + n);
    std::sort(sorted.begin(), sorted.end());
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd;
    if (!(spread > 0.0)) fail(ErrorKind::data, "kde: X1 is constant");
    const double bw = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) acc += normal_pdf((x0 - X1[i]) / bw);
    return acc / (static_cast<double>(n) * bw);
}

double bandwidth_from_density(Eigen::Index n, double density, double c) {
    if (!(c > 0.0)) fail(ErrorKind::invalid_argument, "bandwidth constant must be positive");
    if (!(density > 0.0) || n < 1)
        fail(ErrorKind::invalid_argument, "bandwidth: need positive density and n");
    return c * std::pow(static_cast<double>(n) * density, -0.2);
}

double bandwidth_default(const Eigen::VectorXd& X1, double x0, double c) {
    if (X1.size() < 20) fail(ErrorKind::insufficient_data, "bandwidth: need n >= 20");
    const double density = kde_density_at(X1, x0);
    if (density < 1e-6)
        fail(ErrorKind::data, "bandwidth: estimated density at x0 is below 1e-6; x0 looks outside "
                              "the data range, pass an explicit bandwidth");
    return bandwidth_from_density(X1.size(), density, c);
}

}  // namespace dll
