#include "dll/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dll/error.hpp"
#include "dll/normal.hpp"

namespace dll {
namespace {

double central_difference(const ScalarFn& f, double x) {
    const double s = 1e-3 * std::max(1.0, std::abs(x));
    return (8.0 * (f(x + s) - f(x - s)) - (f(x + 2.0 * s) - f(x - 2.0 * s))) / (12.0 * s);
}

}  // namespace

const char* to_string(TransformKind kind) {
    switch (kind) {
        case TransformKind::copula_empirical: return "copula_empirical";
        case TransformKind::copula_known: return "copula_known";
        case TransformKind::heavy_tail: return "heavy_tail";
    }
    return "unknown";
}

Eigen::VectorXd empirical_cdf_transform(const Eigen::VectorXd& column) {
    const Eigen::Index n = column.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return column[a] < column[b]; });

    Eigen::VectorXd out(n);
    const double denom = static_cast<double>(n) + 1.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && column[order[j + 1]] == column[order[i]]) ++j;
        // ranks i+1 .. j+1 share their average
        const double rank = 0.5 * static_cast<double>(i + j + 2);
        for (std::size_t k = i; k <= j; ++k) out[order[k]] = rank / denom;
        i = j + 1;
    }
    return out;
}

double heavy_tail_transform(double x, const HeavyTailParams& params) {
    const double tail = normal_cdf(params.T(x));
    if (params.c0 >= 1.0) return tail;
    return (1.0 - params.c0) * params.G0(x) + params.c0 * tail;
}

Transform Transform::fit_empirical(const Eigen::VectorXd& column) {
    if (column.size() < 1) fail(ErrorKind::insufficient_data, "empirical transform: empty column");
    for (Eigen::Index i = 0; i < column.size(); ++i)
        if (!std::isfinite(column[i]))
            fail(ErrorKind::data, "empirical transform: non-finite value");

    Transform t;
    t.kind_ = TransformKind::copula_empirical;
    const Eigen::VectorXd u = empirical_cdf_transform(column);
    std::vector<std::pair<double, double>> pairs(static_cast<std::size_t>(column.size()));
    for (Eigen::Index i = 0; i < column.size(); ++i) pairs[i] = {column[i], u[i]};
    std::sort(pairs.begin(), pairs.end());
    for (const auto& [x, v] : pairs) {
        if (t.knots_x_.empty() || x != t.knots_x_.back()) {
            t.knots_x_.push_back(x);
            t.knots_u_.push_back(v);
        }
    }
    return t;
}

Transform Transform::known_cdf(ScalarFn cdf) {
    if (!cdf) fail(ErrorKind::invalid_argument, "known-CDF transform needs a CDF");
    Transform t;
    t.kind_ = TransformKind::copula_known;
    t.cdf_ = std::move(cdf);
    return t;
}

Transform Transform::heavy_tail(HeavyTailParams params) {
    if (!params.T) fail(ErrorKind::invalid_argument, "heavy-tail transform needs T");
    if (!(params.c0 > 0.0 && params.c0 <= 1.0))
        fail(ErrorKind::invalid_argument, "heavy-tail transform needs 0 < c0 <= 1");
    if (params.c0 < 1.0 && !params.G0)
        fail(ErrorKind::invalid_argument, "heavy-tail transform with c0 < 1 needs G0");
    if (!(params.support_bound >= 0.0))
        fail(ErrorKind::invalid_argument, "heavy-tail transform needs C >= 0");
    Transform t;
    t.kind_ = TransformKind::heavy_tail;
    t.heavy_ = std::move(params);
    return t;
}

double Transform::operator()(double x, bool* clamped) const {
    if (clamped) *clamped = false;
    switch (kind_) {
        case TransformKind::copula_known:
            return std::clamp(cdf_(x), 0.0, 1.0);
        case TransformKind::heavy_tail:
            return std::clamp(heavy_tail_transform(x, heavy_), 0.0, 1.0);
        case TransformKind::copula_empirical:
            break;
    }
    if (knots_x_.empty()) fail(ErrorKind::invalid_argument, "empirical transform not fitted");
    if (x <= knots_x_.front()) {
        if (clamped && x < knots_x_.front()) *clamped = true;
        return knots_u_.front();
    }
    if (x >= knots_x_.back()) {
        if (clamped && x > knots_x_.back()) *clamped = true;
        return knots_u_.back();
    }
    const auto it = std::upper_bound(knots_x_.begin(), knots_x_.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - knots_x_.begin());
    const std::size_t lo = hi - 1;
    if (x == knots_x_[lo]) return knots_u_[lo];
    const double w = (x - knots_x_[lo]) / (knots_x_[hi] - knots_x_[lo]);
    return knots_u_[lo] + w * (knots_u_[hi] - knots_u_[lo]);
}

Eigen::VectorXd Transform::apply(const Eigen::VectorXd& column, int* clamp_count) const {
    Eigen::VectorXd out(column.size());
    int clamps = 0;
    for (Eigen::Index i = 0; i < column.size(); ++i) {
        bool c = false;
        out[i] = (*this)(column[i], &c);
        if (c) ++clamps;
    }
    if (clamp_count) *clamp_count += clamps;
    return out;
}

double density_lower_bound_estimate(const Transform& transform, const ScalarFn& source_density,
                                    int grid_size, double half_width) {
    if (grid_size < 100)
        fail(ErrorKind::invalid_argument, "density bound: grid_size must be at least 100");
    if (!source_density) fail(ErrorKind::invalid_argument, "density bound: missing source density");
    if (!(half_width > 0.0)) fail(ErrorKind::invalid_argument, "density bound: half_width <= 0");

    std::function<double(double)> ratio;
    if (transform.kind() == TransformKind::copula_known) {
        const ScalarFn& cdf = transform.cdf();
        ratio = [&](double x) {
            const double d = central_difference(cdf, x);
            return d > 0.0 ? source_density(x) / d : std::numeric_limits<double>::quiet_NaN();
        };
    } else if (transform.kind() == TransformKind::heavy_tail) {
        const HeavyTailParams& hp = transform.heavy_tail_params();
        half_width = std::max(half_width, hp.support_bound);
        const ScalarFn H = [&](double x) { return normal_cdf(hp.T(x)); };
        ratio = [&, H](double x) {
            const double dh = central_difference(H, x);
            double denom;
            if (std::abs(x) >= hp.support_bound) {
                denom = 2.0 * hp.c0 * dh;
            } else {
                const double dg = hp.c0 < 1.0 ? central_difference(hp.G0, x) : 0.0;
                denom = (1.0 - hp.c0) * dg + hp.c0 * dh;
            }
            return denom > 0.0 ? source_density(x) / denom
                               : std::numeric_limits<double>::quiet_NaN();
        };
    } else {
        fail(ErrorKind::invalid_argument, "density bound: not defined for empirical transforms");
    }

    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < grid_size; ++k) {
        const double x = -half_width + 2.0 * half_width * k / (grid_size - 1);
        const double r = ratio(x);
        if (std::isfinite(r)) best = std::min(best, r);
    }
    if (!std::isfinite(best)) fail(ErrorKind::singular, "density bound: no usable grid point");
    return best;
}

}  // namespace dll
