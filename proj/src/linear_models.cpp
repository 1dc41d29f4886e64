#include "dll/linear_models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dll/error.hpp"

namespace dll {
namespace {

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

double standard_deviation(const Eigen::VectorXd& v) {
    if (v.size() < 2) return 0.0;
    const double mean = v.mean();
    return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size() - 1));
}

}  // namespace

const char* to_string(ProjectionMethod method) {
    switch (method) {
        case ProjectionMethod::ols: return "ols";
        case ProjectionMethod::scaled_lasso: return "scaled_lasso";
        case ProjectionMethod::oracle: return "oracle";
    }
    return "unknown";
}

Eigen::VectorXd ProjectionFit::predict(const Eigen::MatrixXd& X2) const {
    Eigen::VectorXd out = X2 * gamma;
    out.array() += intercept;
    return out;
}

double ProjectionFit::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
    return row.dot(gamma) + intercept;
}

int ProjectionFit::support_size() const {
    return static_cast<int>((gamma.array() != 0.0).count());
}

double sigma_floor(const Eigen::VectorXd& values) {
    const double sd = standard_deviation(values);
    return sd > 0.0 ? 1e-8 * sd : 1e-8;
}

Eigen::VectorXd lasso_coordinate_descent(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                         double lambda, const Eigen::VectorXd& warm_start,
                                         const LassoOptions& options) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (y.size() != n) fail(ErrorKind::invalid_argument, "lasso: response length mismatch");
    if (!(lambda >= 0.0)) fail(ErrorKind::invalid_argument, "lasso: lambda must be nonnegative");
    if (n == 0) fail(ErrorKind::insufficient_data, "lasso: empty design");

    Eigen::VectorXd beta = warm_start.size() == p ? warm_start : Eigen::VectorXd::Zero(p);
    const double inv_n = 1.0 / static_cast<double>(n);
    Eigen::VectorXd col_sq(p);
    for (Eigen::Index j = 0; j < p; ++j) col_sq[j] = X.col(j).squaredNorm() * inv_n;
    for (Eigen::Index j = 0; j < p; ++j)
        if (col_sq[j] == 0.0) beta[j] = 0.0;

    Eigen::VectorXd r = y - X * beta;

    auto update = [&](Eigen::Index j) {
        if (col_sq[j] == 0.0) return 0.0;
        const double old = beta[j];
        const double z = X.col(j).dot(r) * inv_n + col_sq[j] * old;
        const double next = soft_threshold(z, lambda) / col_sq[j];
        if (next != old) {
            r.noalias() -= X.col(j) * (next - old);
            beta[j] = next;
        }
        return std::abs(next - old) * std::sqrt(col_sq[j]);
    };

    double tol = options.coef_tol;
    int sweeps = 0;
    std::vector<Eigen::Index> active;
    while (true) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) max_change = std::max(max_change, update(j));
        ++sweeps;

        if (max_change < tol) {
            r = y - X * beta;
            if (kkt_check(X, y, lambda, beta) <= options.kkt_tol) return beta;
            tol = std::max(tol * 0.1, 1e-16);
        } else {
            active.clear();
            for (Eigen::Index j = 0; j < p; ++j)
                if (beta[j] != 0.0) active.push_back(j);
            while (sweeps < options.max_sweeps) {
                double change = 0.0;
                for (Eigen::Index j : active) change = std::max(change, update(j));
                ++sweeps;
                if (change < tol) break;
            }
        }
        if (sweeps >= options.max_sweeps)
            fail(ErrorKind::non_convergence,
                 "lasso: no convergence after " + std::to_string(sweeps) + " sweeps");
    }
}

double kkt_check(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                 const Eigen::VectorXd& beta) {
    const Eigen::VectorXd grad = X.transpose() * (y - X * beta) / static_cast<double>(X.rows());
    double worst = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        double violation;
        if (beta[j] != 0.0)
            violation = std::abs(grad[j] - lambda * (beta[j] > 0.0 ? 1.0 : -1.0));
        else
            violation = std::max(0.0, std::abs(grad[j]) - lambda);
        worst = std::max(worst, violation);
    }
    return worst;
}

ProjectionFit ols_projection(const Eigen::MatrixXd& X2, const Eigen::VectorXd& X1,
                             bool intercept) {
    const Eigen::Index n = X2.rows();
    const Eigen::Index p = X2.cols();
    if (X1.size() != n) fail(ErrorKind::invalid_argument, "ols: response length mismatch");
    const Eigen::Index params = p + (intercept ? 1 : 0);
    if (n <= p + 1 || n <= params)
        fail(ErrorKind::insufficient_data, "ols: need n > p + 1 observations");

    Eigen::MatrixXd design(n, params);
    design.leftCols(p) = X2;
    if (intercept) design.col(p).setOnes();

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < params) fail(ErrorKind::singular, "ols: rank-deficient design");
    const Eigen::VectorXd coef = qr.solve(X1);

    ProjectionFit fit;
    fit.method = ProjectionMethod::ols;
    fit.gamma = coef.head(p);
    fit.intercept = intercept ? coef[p] : 0.0;
    const double rss = (X1 - design * coef).squaredNorm();
    fit.sigma2 = std::max(std::sqrt(rss / static_cast<double>(n - params)), sigma_floor(X1));
    fit.iterations = 1;
    fit.converged = true;
    return fit;
}

double scaled_lasso_objective(const Eigen::MatrixXd& X2_std, const Eigen::VectorXd& X1,
                              const Eigen::VectorXd& gamma_std, double sigma2, double lambda0) {
    const double n = static_cast<double>(X2_std.rows());
    return (X1 - X2_std * gamma_std).squaredNorm() / (2.0 * n * sigma2) + 0.5 * sigma2 +
           lambda0 * gamma_std.lpNorm<1>();
}

ProjectionFit scaled_lasso(const Eigen::MatrixXd& X2, const Eigen::VectorXd& X1,
                           const ScaledLassoOptions& options) {
    const Eigen::Index n = X2.rows();
    const Eigen::Index p = X2.cols();
    if (X1.size() != n) fail(ErrorKind::invalid_argument, "scaled_lasso: response length mismatch");
    if (p < 1) fail(ErrorKind::invalid_argument, "scaled_lasso: need at least one column");
    if (!(options.A > 1.0)) fail(ErrorKind::invalid_argument, "scaled_lasso: A must exceed 1");
    if (n < 2) fail(ErrorKind::insufficient_data, "scaled_lasso: need at least two observations");

    Eigen::MatrixXd X = X2;
    Eigen::VectorXd y = X1;
    Eigen::RowVectorXd col_mean = Eigen::RowVectorXd::Zero(p);
    double y_mean = 0.0;
    if (options.intercept) {
        col_mean = X.colwise().mean();
        X.rowwise() -= col_mean;
        y_mean = y.mean();
        y.array() -= y_mean;
    }

    Eigen::VectorXd scale(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double rms = std::sqrt(X.col(j).squaredNorm() / static_cast<double>(n));
        scale[j] = rms > 0.0 ? rms : 1.0;
        X.col(j) /= scale[j];
    }

    const double lambda0 =
        std::sqrt(2.0 * options.A * std::log(static_cast<double>(p)) / static_cast<double>(n));
    const double floor = sigma_floor(X1);
    const double root_n = std::sqrt(static_cast<double>(n));

    ProjectionFit fit;
    fit.method = ProjectionMethod::scaled_lasso;
    fit.column_scale = scale;
    fit.converged = false;

    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(p);
    double sigma = std::max(y.norm() / root_n, floor);
    double used_sigma = sigma;
    constexpr int kPolishSteps = 20;
    int polish = 0;
    for (int outer = 1; outer <= options.max_outer + kPolishSteps; ++outer) {
        used_sigma = sigma;
        gamma = lasso_coordinate_descent(X, y, sigma * lambda0, gamma, options.inner);
        const double next = std::max((y - X * gamma).norm() / root_n, floor);
        fit.objective_trace.push_back(scaled_lasso_objective(X, y, gamma, next, lambda0));
        fit.iterations = outer;
        const double rel_change = std::abs(next - sigma) / sigma;
        sigma = next;
        if (!fit.converged) {
            if (rel_change < options.sigma_rel_tol) fit.converged = true;
            else if (outer >= options.max_outer) break;
        }
        // Once converged, a few extra alternations settle the fixed point to
        // near machine precision so sigma2 and the KKT conditions agree.
        if (fit.converged && (rel_change < 1e-12 || ++polish > kPolishSteps)) break;
    }

    fit.gamma = gamma.cwiseQuotient(scale);
    fit.intercept = options.intercept ? y_mean - col_mean.dot(fit.gamma) : 0.0;
    fit.sigma2 = sigma;
    fit.penalty_level = used_sigma * lambda0;
    return fit;
}

}  // namespace dll
