#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "dll/bspline.hpp"
#include "dll/error.hpp"

using namespace dll;

namespace {

// Textbook Cox-de Boor recursion on the half-open spans.
double cox_de_boor(int i, int k, double z, const std::vector<double>& t) {
    if (k == 0) return (t[i] <= z && z < t[i + 1]) ? 1.0 : 0.0;
    double left = 0.0, right = 0.0;
    if (t[i + k] > t[i]) left = (z - t[i]) / (t[i + k] - t[i]) * cox_de_boor(i, k - 1, z, t);
    if (t[i + k + 1] > t[i + 1])
        right = (t[i + k + 1] - z) / (t[i + k + 1] - t[i + 1]) * cox_de_boor(i + 1, k - 1, z, t);
    return left + right;
}

// Least-squares coefficients of f in the spline space, from a dense grid.
Eigen::VectorXd project(const BasisSpec& spec, double (*f)(double)) {
    const Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(400, 0.0, 1.0);
    Eigen::VectorXd y(400);
    for (int i = 0; i < 400; ++i) y[i] = f(z[i]);
    return bspline_design(z, spec).colPivHouseholderQr().solve(y);
}

double g_value(const BasisSpec& spec, const Eigen::VectorXd& beta, double z) {
    return bspline_basis(z, spec).dot(beta);
}

// Integral of (g'')^2: on each span g is a cubic, recovered exactly from four
// interior samples and differentiated in closed form.
double second_derivative_energy(const BasisSpec& spec, const Eigen::VectorXd& beta) {
    std::vector<double> breaks = {0.0};
    for (double k : spec.interior) breaks.push_back(k);
    breaks.push_back(1.0);
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const double a = breaks[s], b = breaks[s + 1];
        Eigen::Matrix4d V;
        Eigen::Vector4d v;
        for (int r = 0; r < 4; ++r) {
            const double z = a + (b - a) * (0.2 + 0.2 * r);
            for (int c = 0; c < 4; ++c) V(r, c) = std::pow(z, c);
            v[r] = g_value(spec, beta, z);
        }
        const Eigen::Vector4d c = V.fullPivLu().solve(v);
        auto sq = [&](double z) {
            const double d2 = 2 * c[2] + 6 * c[3] * z;
            return d2 * d2;
        };
        total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(sq, a, b);
    }
    return total;
}

}  // namespace

TEST_CASE("basis layout") {
    const BasisSpec spec = BasisSpec::uniform(3, 5);
    CHECK(spec.size() == 9);
    const std::vector<double> t = spec.knots();
    REQUIRE(t.size() == 13);
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] >= t[i - 1]);
    for (int i = 0; i < 4; ++i) {
        CHECK(t[i] == 0.0);
        CHECK(t[t.size() - 1 - i] == 1.0);
    }
    CHECK_THROWS_AS(BasisSpec::uniform(3, -1), Error);
    BasisSpec bad;
    bad.degree = 0;
    CHECK_THROWS_AS(bspline_basis(0.5, bad), Error);
}

TEST_CASE("quantile knots") {
    Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(101, 0.0, 1.0);
    const BasisSpec spec = BasisSpec::quantile(3, 3, z);
    REQUIRE(spec.interior.size() == 3);
    CHECK(spec.interior[0] == doctest::Approx(0.25));
    CHECK(spec.interior[1] == doctest::Approx(0.5));
    CHECK(spec.interior[2] == doctest::Approx(0.75));

    // heavy ties collapse duplicate knots
    Eigen::VectorXd tied = Eigen::VectorXd::Constant(50, 0.3);
    CHECK(BasisSpec::quantile(3, 4, tied).interior.size() == 1);
}

TEST_CASE("partition of unity and boundary values") {
    const BasisSpec spec = BasisSpec::uniform(3, 5);
    for (double z = 0.0; z <= 1.0; z += 0.01) {
        const Eigen::VectorXd b = bspline_basis(z, spec);
        CHECK(b.sum() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(b.minCoeff() >= 0.0);
    }
    const Eigen::VectorXd b0 = bspline_basis(0.0, spec);
    CHECK(b0[0] == 1.0);
    CHECK(b0.tail(spec.size() - 1).isZero(0.0));
    const Eigen::VectorXd b1 = bspline_basis(1.0, spec);
    CHECK(b1[spec.size() - 1] == doctest::Approx(1.0));
    CHECK_THROWS_AS(bspline_basis(1.01, spec), Error);
    CHECK_THROWS_AS(bspline_basis(-0.01, spec), Error);
}

TEST_CASE("basis matches the Cox-de Boor recursion") {
    const BasisSpec spec = BasisSpec::uniform(3, 5);
    const std::vector<double> t = spec.knots();
    for (double z : {0.37, 0.0, 0.5, 0.99, 1.0 / 6.0}) {
        const Eigen::VectorXd b = bspline_basis(z, spec);
        for (int i = 0; i < spec.size(); ++i) CHECK(b[i] == doctest::Approx(cox_de_boor(i, 3, z, t)).epsilon(1e-13));
    }
    BasisSpec irregular;
    irregular.degree = 2;
    irregular.interior = {0.1, 0.15, 0.6};
    for (double z = 0.005; z < 1.0; z += 0.03) {
        const Eigen::VectorXd b = bspline_basis(z, irregular);
        for (int i = 0; i < irregular.size(); ++i)
            CHECK(b[i] == doctest::Approx(cox_de_boor(i, 2, z, irregular.knots())).epsilon(1e-13));
    }
}

TEST_CASE("design matrix rows") {
    const BasisSpec spec = BasisSpec::uniform(3, 2);
    Eigen::VectorXd z(3);
    z << 0.1, 0.5, 0.9;
    const Eigen::MatrixXd B = bspline_design(z, spec);
    for (int i = 0; i < 3; ++i) CHECK((B.row(i).transpose() - bspline_basis(z[i], spec)).norm() == 0.0);
}

TEST_CASE("sobolev penalty matrix") {
    const BasisSpec spec = BasisSpec::uniform(3, 5);
    const Eigen::MatrixXd omega = sobolev_penalty_matrix(spec, 2);
    CHECK((omega - omega.transpose()).cwiseAbs().maxCoeff() < 1e-12);

    const Eigen::VectorXd lin = project(spec, [](double z) { return 2.0 * z - 1.0; });
    CHECK(std::abs(lin.dot(omega * lin)) < 1e-9);
    const Eigen::VectorXd sq = project(spec, [](double z) { return z * z; });
    CHECK(sq.dot(omega * sq) == doctest::Approx(4.0).epsilon(1e-9));

    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    BasisSpec irregular;
    irregular.degree = 3;
    irregular.interior = {0.05, 0.3, 0.31, 0.7, 0.9};
    const Eigen::MatrixXd om2 = sobolev_penalty_matrix(irregular, 2);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd beta(irregular.size());
        for (Eigen::Index k = 0; k < beta.size(); ++k) beta[k] = g(rng);
        const double want = second_derivative_energy(irregular, beta);
        CHECK(beta.dot(om2 * beta) == doctest::Approx(want).epsilon(1e-8));
    }

    const Eigen::MatrixXd om0 = sobolev_penalty_matrix(spec, 0);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(spec.size());
    CHECK(ones.dot(om0 * ones) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(sobolev_penalty_matrix(spec, 4), Error);
}
