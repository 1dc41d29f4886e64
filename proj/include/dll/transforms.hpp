#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace dll {

enum class TransformKind { copula_empirical, copula_known, heavy_tail };

const char* to_string(TransformKind kind);

using ScalarFn = std::function<double(double)>;

/// G(x) = (1 - c0) G0(x) + c0 Phi(T(x)).
struct HeavyTailParams {
    ScalarFn T;                  // strictly increasing
    double c0 = 1.0;             // in (0, 1]
    ScalarFn G0;                 // non-decreasing onto [0, 1]; may be empty when c0 = 1
    double support_bound = 1.0;  // G0 is flat outside [-C, C]
};

/// Rank-based values rank_i / (n + 1), ties receive their average rank.
Eigen::VectorXd empirical_cdf_transform(const Eigen::VectorXd& column);

double heavy_tail_transform(double x, const HeavyTailParams& params);

/// Monotone map of one covariate onto [0, 1].
class Transform {
public:
    Transform() = default;

    static Transform fit_empirical(const Eigen::VectorXd& column);
    static Transform known_cdf(ScalarFn cdf);
    static Transform heavy_tail(HeavyTailParams params);

    TransformKind kind() const noexcept { return kind_; }

    /// Evaluates the map at x. Empirical transforms interpolate linearly between
    /// the training values and clamp to [1/(n+1), n/(n+1)]; `clamped` is set when
    /// x falls outside the training range.
    double operator()(double x, bool* clamped = nullptr) const;

    /// Applies the map to a column, counting clamped entries.
    Eigen::VectorXd apply(const Eigen::VectorXd& column, int* clamp_count = nullptr) const;

    const ScalarFn& cdf() const noexcept { return cdf_; }
    const HeavyTailParams& heavy_tail_params() const noexcept { return heavy_; }

private:
    TransformKind kind_ = TransformKind::copula_empirical;
    std::vector<double> knots_x_;   // sorted distinct training values
    std::vector<double> knots_u_;   // average-rank value at each knot
    ScalarFn cdf_;
    HeavyTailParams heavy_;
};

/// Grid estimate of the lower bound on the density of the transformed variable.
///
/// For heavy-tail transforms, the minimum over a uniform grid on [-R, R] of
/// F'(x) / (2 c0 H'(x)) for |x| >= C and F'(x) / ((1 - c0) G0'(x) + c0 H'(x))
/// for |x| <= C, with H = Phi(T(.)) and F' the source density. For known-CDF
/// copulas, the grid minimum of F'(x) / cdf'(x). R is widened to cover C.
/// Throws for grid_size < 100 and for empirical transforms.
double density_lower_bound_estimate(const Transform& transform, const ScalarFn& source_density,
                                    int grid_size, double half_width = 6.0);

}  // namespace dll
