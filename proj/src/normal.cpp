#include "dll/normal.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <numbers>

#include "dll/error.hpp"

namespace dll {

double normal_pdf(double t) {
    return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double t) {
    return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

double normal_sf(double t) {
    return 0.5 * std::erfc(t / std::numbers::sqrt2);
}

double normal_mass(double a, double b) {
    if (a >= 0.0) return normal_sf(a) - normal_sf(b);
    if (b <= 0.0) return normal_cdf(b) - normal_cdf(a);
    return 1.0 - normal_cdf(a) - normal_sf(b);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::invalid_argument, "normal_quantile: p must lie in (0,1)");
    static const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, p);
}

double z_critical(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::invalid_argument, "alpha must lie in (0,1)");
    return normal_quantile(1.0 - 0.5 * alpha);
}

}  // namespace dll
