#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "dll/error.hpp"
#include "dll/normal.hpp"
#include "dll/quadrature.hpp"

using namespace dll;

TEST_CASE("normal helpers agree with closed forms") {
    CHECK(normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-15));
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.0) == doctest::Approx(0.5 * (1.0 + std::erf(1.0 / std::sqrt(2.0)))).epsilon(1e-14));
    CHECK(normal_sf(35.0) > 0.0);
    CHECK(normal_sf(35.0) == doctest::Approx(0.5 * std::erfc(35.0 / std::sqrt(2.0))).epsilon(1e-12));

    // tail mass keeps relative precision
    const double far = normal_mass(30.0, 30.1);
    CHECK(far > 0.0);
    boost::math::normal_distribution<double> nd;
    const double ref = boost::math::cdf(boost::math::complement(nd, 30.0)) -
                       boost::math::cdf(boost::math::complement(nd, 30.1));
    CHECK(far == doctest::Approx(ref).epsilon(1e-10));
    CHECK(normal_mass(-30.1, -30.0) == doctest::Approx(far).epsilon(1e-12));
    CHECK(normal_mass(-1.0, 1.0) == doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-14));
}

TEST_CASE("quantiles and critical values") {
    boost::math::normal_distribution<double> nd;
    for (double p : {1e-10, 0.01, 0.3, 0.5, 0.9, 0.999})
        CHECK(normal_quantile(p) == doctest::Approx(boost::math::quantile(nd, p)).epsilon(1e-14));
    CHECK(z_critical(0.05) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK_THROWS_AS(z_critical(0.0), Error);
    CHECK_THROWS_AS(z_critical(1.0), Error);
    CHECK_THROWS_AS(z_critical(1.5), Error);
    CHECK_THROWS_AS(normal_quantile(0.0), Error);
}

TEST_CASE("adaptive Simpson against Gauss-Kronrod") {
    auto f = [](double t) { return std::exp(-t * t) * std::cos(3 * t); };
    const double want = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -1.0, 2.0);
    CHECK(adaptive_simpson(f, -1.0, 2.0) == doctest::Approx(want).epsilon(1e-9));
    CHECK(adaptive_simpson(f, 0.5, 0.5) == 0.0);
}

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
    for (int points = 1; points <= 8; ++points) {
        const GaussRule rule = gauss_legendre(points);
        REQUIRE(rule.nodes.size() == static_cast<std::size_t>(points));
        for (int deg = 0; deg <= 2 * points - 1; ++deg) {
            double got = 0.0;
            for (int k = 0; k < points; ++k) got += rule.weights[k] * std::pow(rule.nodes[k], deg);
            const double want = deg % 2 ? 0.0 : 2.0 / (deg + 1);
            CHECK(got == doctest::Approx(want).epsilon(1e-13));
        }
    }
}
