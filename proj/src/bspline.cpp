#include "dll/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dll/error.hpp"
#include "dll/quadrature.hpp"

namespace dll {
namespace {

void check_spec(const BasisSpec& spec) {
    if (spec.degree < 1) fail(ErrorKind::invalid_argument, "bspline: degree must be >= 1");
    double prev = 0.0;
    for (double k : spec.interior) {
        if (!(k > 0.0 && k < 1.0) || k < prev)
            fail(ErrorKind::invalid_argument, "bspline: interior knots must be sorted in (0, 1)");
        prev = k;
    }
}

// Derivative of a spline in coefficient form: maps degree-d coefficients on
// `knots` to degree-(d-1) coefficients on knots[1 .. end-1].
Eigen::MatrixXd derivative_operator(const std::vector<double>& knots, int degree) {
    const int nb = static_cast<int>(knots.size()) - degree - 1;
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(nb - 1, nb);
    for (int i = 0; i < nb - 1; ++i) {
        const double span = knots[i + degree + 1] - knots[i + 1];
        if (span <= 0.0) continue;
        const double s = degree / span;
        D(i, i) = -s;
        D(i, i + 1) = s;
    }
    return D;
}

}  // namespace

std::vector<double> BasisSpec::knots() const {
    std::vector<double> t(static_cast<std::size_t>(degree + 1), 0.0);
    t.insert(t.end(), interior.begin(), interior.end());
    t.insert(t.end(), static_cast<std::size_t>(degree + 1), 1.0);
    return t;
}

BasisSpec BasisSpec::uniform(int degree, int num_interior) {
    if (num_interior < 0) fail(ErrorKind::invalid_argument, "bspline: negative knot count");
    BasisSpec spec;
    spec.degree = degree;
    for (int k = 1; k <= num_interior; ++k)
        spec.interior.push_back(static_cast<double>(k) / (num_interior + 1));
    check_spec(spec);
    return spec;
}

BasisSpec BasisSpec::quantile(int degree, int num_interior, const Eigen::VectorXd& z) {
    if (num_interior < 0) fail(ErrorKind::invalid_argument, "bspline: negative knot count");
    if (z.size() == 0) fail(ErrorKind::insufficient_data, "bspline: no data for quantile knots");
    std::vector<double> sorted(z.data(), z.data() + z.size());
    std::sort(sorted.begin(), sorted.end());
    BasisSpec spec;
    spec.degree = degree;
    const double last = static_cast<double>(sorted.size() - 1);
    for (int k = 1; k <= num_interior; ++k) {
        const double pos = last * k / (num_interior + 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        const double q = sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
        if (q <= 0.0 || q >= 1.0) continue;
        if (!spec.interior.empty() && q <= spec.interior.back()) continue;
        spec.interior.push_back(q);
    }
    check_spec(spec);
    return spec;
}

int bspline_nonzero(double z, const std::vector<double>& knots, int degree, double* values) {
    const int nb = static_cast<int>(knots.size()) - degree - 1;
    // span s with knots[s] <= z < knots[s+1]; z at the right end uses the last
    // non-empty span
    int s;
    if (z >= knots[nb]) {
        s = nb - 1;
        while (s > degree && knots[s] >= knots[s + 1]) --s;
    } else {
        s = static_cast<int>(std::upper_bound(knots.begin(), knots.end(), z) - knots.begin()) - 1;
        s = std::clamp(s, degree, nb - 1);
    }

    std::vector<double> left(static_cast<std::size_t>(degree + 1));
    std::vector<double> right(static_cast<std::size_t>(degree + 1));
    values[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[j] = z - knots[s + 1 - j];
        right[j] = knots[s + j] - z;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double denom = right[r + 1] + left[j - r];
            const double temp = denom > 0.0 ? values[r] / denom : 0.0;
            values[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        values[j] = saved;
    }
    return s - degree;
}

Eigen::VectorXd bspline_basis(double z, const BasisSpec& spec) {
    if (!(z >= 0.0 && z <= 1.0))
        fail(ErrorKind::invalid_argument, "bspline: z outside [0, 1]: " + std::to_string(z));
    check_spec(spec);
    const std::vector<double> t = spec.knots();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(spec.size());
    std::vector<double> vals(static_cast<std::size_t>(spec.degree + 1));
    const int first = bspline_nonzero(z, t, spec.degree, vals.data());
    for (int k = 0; k <= spec.degree; ++k) out[first + k] = vals[k];
    return out;
}

Eigen::MatrixXd bspline_design(const Eigen::VectorXd& z, const BasisSpec& spec) {
    const std::vector<double> t = spec.knots();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(z.size(), spec.size());
    std::vector<double> vals(static_cast<std::size_t>(spec.degree + 1));
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (!(z[i] >= 0.0 && z[i] <= 1.0))
            fail(ErrorKind::invalid_argument, "bspline: z outside [0, 1]: " + std::to_string(z[i]));
        const int first = bspline_nonzero(z[i], t, spec.degree, vals.data());
        for (int k = 0; k <= spec.degree; ++k) B(i, first + k) = vals[k];
    }
    return B;
}

Eigen::MatrixXd sobolev_penalty_matrix(const BasisSpec& spec, int m) {
    check_spec(spec);
    if (m < 0) fail(ErrorKind::invalid_argument, "penalty: m must be >= 0");
    if (m > spec.degree)
        fail(ErrorKind::invalid_argument, "penalty: m exceeds the spline degree");

    std::vector<double> t = spec.knots();
    int degree = spec.degree;
    Eigen::MatrixXd D = Eigen::MatrixXd::Identity(spec.size(), spec.size());
    for (int r = 0; r < m; ++r) {
        D = derivative_operator(t, degree) * D;
        t = std::vector<double>(t.begin() + 1, t.end() - 1);
        --degree;
    }

    // Gram matrix of the reduced basis, exact for polynomial pieces
    const int nb = static_cast<int>(t.size()) - degree - 1;
    const GaussRule rule = gauss_legendre(degree + 1);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(nb, nb);
    std::vector<double> vals(static_cast<std::size_t>(degree + 1));
    for (std::size_t s = 0; s + 1 < t.size(); ++s) {
        const double a = t[s];
        const double b = t[s + 1];
        if (b <= a) continue;
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double z = mid + half * rule.nodes[q];
            const double w = half * rule.weights[q];
            const int first = bspline_nonzero(z, t, degree, vals.data());
            for (int i = 0; i <= degree; ++i)
                for (int j = 0; j <= degree; ++j)
                    gram(first + i, first + j) += w * vals[i] * vals[j];
        }
    }
    Eigen::MatrixXd omega = D.transpose() * gram * D;
    return 0.5 * (omega + omega.transpose());
}

}  // namespace dll
