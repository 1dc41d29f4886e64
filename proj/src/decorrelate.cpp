#include "dll/decorrelate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "dll/error.hpp"
#include "dll/normal.hpp"
#include "dll/quadrature.hpp"

namespace dll {

SwapPlan swap_split(Eigen::Index n, std::uint64_t seed) {
    if (n < 4) fail(ErrorKind::insufficient_data, "swap_split: need n >= 4");
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::mt19937_64 rng(seed);
    // Fisher-Yates with an explicit draw so the result does not depend on the
    // standard library's shuffle
    for (std::size_t i = idx.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(idx[i], idx[j]);
    }
    const std::size_t na = (idx.size() + 1) / 2;
    SwapPlan plan;
    plan.seed = seed;
    plan.fold_a.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(na));
    plan.fold_b.assign(idx.begin() + static_cast<std::ptrdiff_t>(na), idx.end());
    std::sort(plan.fold_a.begin(), plan.fold_a.end());
    std::sort(plan.fold_b.begin(), plan.fold_b.end());
    return plan;
}

GaussianWindow make_window(double x2_dot_gamma, double sigma2, const KernelSpec& spec) {
    if (!(sigma2 > 0.0)) fail(ErrorKind::invalid_argument, "window: sigma2 must be positive");
    return {(spec.x0() - x2_dot_gamma) / sigma2, spec.h() / sigma2};
}

double shift_exact_gaussian(const GaussianWindow& window, double sigma2, bool* underflow) {
    if (!(sigma2 > 0.0)) fail(ErrorKind::invalid_argument, "shift: sigma2 must be positive");
    if (!(window.L > 0.0)) fail(ErrorKind::invalid_argument, "shift: L must be positive");
    if (underflow) *underflow = false;
    const double a = std::abs(window.mu);
    const double L = window.L;
    const double mass = normal_mass(a - L, a + L);
    if (mass < 1e-300) {
        if (underflow) *underflow = true;
        return -sigma2 * window.mu * L * L / 3.0;
    }
    const double numer = normal_pdf(a - L) - normal_pdf(a + L) - a * mass;
    const double value = sigma2 * numer / mass;
    return window.mu < 0.0 ? -value : value;
}

double shift_linear(double x2_dot_gamma, double sigma2, const KernelSpec& spec) {
    if (!(sigma2 > 0.0)) fail(ErrorKind::invalid_argument, "shift: sigma2 must be positive");
    return spec.h() * spec.h() * (x2_dot_gamma - spec.x0()) / (3.0 * sigma2 * sigma2);
}

double shift_general(const std::function<double(double)>& density, const GaussianWindow& window,
                     double sigma2) {
    if (!density) fail(ErrorKind::invalid_argument, "shift_general: missing density");
    if (!(sigma2 > 0.0)) fail(ErrorKind::invalid_argument, "shift: sigma2 must be positive");
    if (!(window.L > 0.0)) fail(ErrorKind::invalid_argument, "shift: L must be positive");
    const double lo = window.mu - window.L;
    const double hi = window.mu + window.L;
    const double mass = adaptive_simpson(density, lo, hi);
    if (!(mass > 0.0)) fail(ErrorKind::singular, "shift_general: zero density mass on window");
    const double first = adaptive_simpson(
        [&](double t) { return (t - window.mu) * density(t); }, lo, hi);
    return sigma2 * first / mass;
}

const char* to_string(WeightMode mode) {
    switch (mode) {
        case WeightMode::exact_gaussian: return "exact_gaussian";
        case WeightMode::linear: return "linear";
        case WeightMode::oracle_known: return "oracle_known";
        case WeightMode::general_density: return "general_density";
    }
    return "unknown";
}

DecorrelationWeights build_weights(const Eigen::VectorXd& X1, const Eigen::VectorXd& shifts,
                                   const KernelSpec& spec, WeightMode mode) {
    if (X1.size() != shifts.size())
        fail(ErrorKind::invalid_argument, "build_weights: X1 and shifts differ in length");
    const Eigen::VectorXd k = kernel_weights(X1, spec);
    const double ksum = k.sum();
    if (!(ksum > 0.0)) fail(ErrorKind::insufficient_data, "build_weights: empty kernel window");

    DecorrelationWeights w;
    w.mode = mode;
    w.d_tilde = (X1.array() - spec.x0()).matrix() - shifts;
    w.centering_shift = w.d_tilde.dot(k) / ksum;
    w.d_hat = w.d_tilde.array() - w.centering_shift;
    return w;
}

Eigen::VectorXd compute_shifts(const Eigen::VectorXd& x2_dot_gamma, const Eigen::VectorXd& sigma2,
                               const KernelSpec& spec, WeightMode mode,
                               const std::function<double(double)>& density,
                               int* underflow_count) {
    if (x2_dot_gamma.size() != sigma2.size())
        fail(ErrorKind::invalid_argument, "compute_shifts: length mismatch");
    Eigen::VectorXd out(x2_dot_gamma.size());
    int underflows = 0;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        switch (mode) {
            case WeightMode::linear:
                out[i] = shift_linear(x2_dot_gamma[i], sigma2[i], spec);
                break;
            case WeightMode::exact_gaussian:
            case WeightMode::oracle_known: {
                bool flag = false;
                out[i] = shift_exact_gaussian(make_window(x2_dot_gamma[i], sigma2[i], spec),
                                              sigma2[i], &flag);
                if (flag) ++underflows;
                break;
            }
            case WeightMode::general_density:
                out[i] = shift_general(density, make_window(x2_dot_gamma[i], sigma2[i], spec),
                                       sigma2[i]);
                break;
        }
    }
    if (underflow_count) *underflow_count += underflows;
    return out;
}

double err_D_metric(const DecorrelationWeights& weights, const DecorrelationWeights& oracle,
                    const Eigen::VectorXd& X1, const KernelSpec& spec) {
    const Eigen::Index n = X1.size();
    if (weights.d_hat.size() != n || oracle.d_hat.size() != n)
        fail(ErrorKind::invalid_argument, "err_D_metric: length mismatch");
    if (n == 0) return 0.0;
    const Eigen::VectorXd k = kernel_weights(X1, spec);
    const double sum = ((weights.d_hat - oracle.d_hat).array().square() * k.array()).sum();
    return std::sqrt(sum / static_cast<double>(n));
}

double growth_constant(const KernelSpec& spec, const Eigen::VectorXd& gamma, double sigma2,
                       Eigen::Index n) {
    if (!(sigma2 > 0.0)) fail(ErrorKind::invalid_argument, "growth_constant: sigma2 <= 0");
    const double log_n = std::log(static_cast<double>(std::max<Eigen::Index>(n, 2)));
    return (std::abs(spec.x0()) + spec.h() + gamma.norm() * std::sqrt(log_n)) / sigma2;
}

}  // namespace dll
