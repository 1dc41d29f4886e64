#include "dll/additive.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dll/error.hpp"

namespace dll {
namespace {

// Orthonormalised and penalty-diagonalised view of one coordinate's centred
// spline basis: fitted values are U theta with U'U/n = I, the smoothness
// seminorm is sqrt(sum omega_k theta_k^2), and beta = to_beta theta.
struct Block {
    Eigen::MatrixXd U;
    Eigen::VectorXd omega;
    Eigen::MatrixXd to_beta;
    Eigen::VectorXd theta;
};

Block make_block(const Eigen::MatrixXd& Bc, const Eigen::MatrixXd& omega_full) {
    const double n = static_cast<double>(Bc.rows());
    const Eigen::MatrixXd gram = Bc.transpose() * Bc / n;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eg(gram);
    const Eigen::VectorXd& ev = eg.eigenvalues();
    const double top = ev.size() ? ev.maxCoeff() : 0.0;

    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < ev.size(); ++k)
        if (top > 0.0 && ev[k] > 1e-10 * top) keep.push_back(k);

    Block block;
    const Eigen::Index r = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd T(Bc.cols(), r);
    for (Eigen::Index c = 0; c < r; ++c)
        T.col(c) = eg.eigenvectors().col(keep[c]) / std::sqrt(ev[keep[c]]);

    if (r == 0) {
        block.to_beta = T;
        block.U = Eigen::MatrixXd::Zero(Bc.rows(), 0);
        block.omega = Eigen::VectorXd(0);
        block.theta = Eigen::VectorXd(0);
        return block;
    }
    Eigen::MatrixXd om = T.transpose() * omega_full * T;
    om = 0.5 * (om + om.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ep(om);
    Eigen::VectorXd w = ep.eigenvalues();
    const double wtop = w.size() ? w.maxCoeff() : 0.0;
    for (Eigen::Index k = 0; k < w.size(); ++k)
        if (w[k] <= 1e-9 * wtop) w[k] = 0.0;

    block.to_beta = T * ep.eigenvectors();
    block.U = Bc * block.to_beta;
    block.omega = w;
    block.theta = Eigen::VectorXd::Zero(r);
    return block;
}

double block_penalty(const Block& b, const Penalty& pen) {
    if (b.theta.size() == 0) return 0.0;
    return pen.rho * std::sqrt(b.omega.dot(b.theta.cwiseAbs2())) + pen.lambda * b.theta.norm();
}

}  // namespace

Penalty default_penalties(int n, int p, int m, double c_rho, double c_lambda) {
    if (n < 2) fail(ErrorKind::invalid_argument, "default_penalties: need n >= 2");
    if (p < 1) fail(ErrorKind::invalid_argument, "default_penalties: need p >= 1");
    const double nd = static_cast<double>(n);
    Penalty pen;
    pen.rho = c_rho * std::pow(nd, -static_cast<double>(m) / (2.0 * m + 1.0));
    pen.lambda = c_lambda * std::sqrt(std::log(static_cast<double>(std::max(p, 2))) / nd);
    return pen;
}

double AdditiveComponent::value(double z) const {
    if (!active) return 0.0;
    return (bspline_basis(std::clamp(z, 0.0, 1.0), basis) - offset).dot(beta);
}

int AdditiveFit::degrees_of_freedom() const {
    int df = 1;
    for (const auto& c : components)
        if (c.active) df += c.dim;
    return df;
}

double AdditiveFit::smoothness_total() const {
    double total = 0.0;
    for (const auto& c : components) total += c.smoothness;
    return total;
}

Eigen::VectorXd double_penalty_prox(const Eigen::VectorXd& z, const Eigen::VectorXd& omega,
                                    double rho, double lambda) {
    if (z.size() != omega.size())
        fail(ErrorKind::invalid_argument, "prox: z and omega differ in length");
    const double rho_h = 0.5 * rho;
    const double lambda_h = 0.5 * lambda;

    Eigen::VectorXd u = z;
    if (rho_h > 0.0) {
        double null_test = 0.0;
        double weighted = 0.0;
        for (Eigen::Index k = 0; k < z.size(); ++k) {
            if (omega[k] > 0.0) {
                null_test += z[k] * z[k] / omega[k];
                weighted += omega[k] * z[k] * z[k];
            }
        }
        if (null_test <= rho_h * rho_h) {
            for (Eigen::Index k = 0; k < z.size(); ++k)
                if (omega[k] > 0.0) u[k] = 0.0;
        } else {
            auto excess = [&](double s) {
                double acc = 0.0;
                for (Eigen::Index k = 0; k < z.size(); ++k) {
                    if (omega[k] <= 0.0) continue;
                    const double d = s + rho_h * omega[k];
                    acc += omega[k] * z[k] * z[k] / (d * d);
                }
                return acc - 1.0;
            };
            double lo = 0.0;
            double hi = std::sqrt(weighted);
            for (int it = 0; it < 100 && hi - lo > 1e-10 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (excess(mid) > 0.0) lo = mid;
                else hi = mid;
            }
            const double s = 0.5 * (lo + hi);
            for (Eigen::Index k = 0; k < z.size(); ++k)
                if (omega[k] > 0.0) u[k] = z[k] * s / (s + rho_h * omega[k]);
        }
    }

    const double norm = u.norm();
    if (norm <= lambda_h) return Eigen::VectorXd::Zero(z.size());
    return u * (1.0 - lambda_h / norm);
}

AdditiveFit fit_doubly_penalized(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                                 const std::vector<Penalty>& penalties,
                                 const AdditiveOptions& options) {
    const Eigen::Index n = Z.rows();
    const Eigen::Index p = Z.cols();
    if (y.size() != n) fail(ErrorKind::invalid_argument, "additive: response length mismatch");
    if (n < 2) fail(ErrorKind::insufficient_data, "additive: need at least two observations");
    if (penalties.size() != 1 && penalties.size() != static_cast<std::size_t>(p))
        fail(ErrorKind::invalid_argument, "additive: need one penalty per column or one shared");
    for (const auto& pen : penalties)
        if (!(pen.rho >= 0.0) || !(pen.lambda >= 0.0))
            fail(ErrorKind::invalid_argument, "additive: penalties must be nonnegative");
    if (!((Z.array() >= 0.0) && (Z.array() <= 1.0)).all())
        fail(ErrorKind::invalid_argument, "additive: Z entries must lie in [0, 1]");

    const int knots = options.num_interior_knots >= 0
                          ? options.num_interior_knots
                          : static_cast<int>(std::ceil(std::pow(static_cast<double>(n), 0.2))) + 2;
    const double inv_n = 1.0 / static_cast<double>(n);

    AdditiveFit fit;
    fit.intercept = y.mean();
    fit.components.resize(static_cast<std::size_t>(p));
    std::vector<Block> blocks;
    blocks.reserve(static_cast<std::size_t>(p));
    bool all_zero = true;
    bool block_deficient = false;
    Eigen::Index total_dim = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
        AdditiveComponent& comp = fit.components[j];
        const Eigen::VectorXd zj = Z.col(j);
        comp.basis = options.placement == KnotPlacement::quantile
                         ? BasisSpec::quantile(options.degree, knots, zj)
                         : BasisSpec::uniform(options.degree, knots);
        comp.penalty = penalties.size() == 1 ? penalties[0] : penalties[j];
        if (options.group_lasso_only) comp.penalty.rho = 0.0;
        if (comp.penalty.rho > 0.0 || comp.penalty.lambda > 0.0) all_zero = false;

        Eigen::MatrixXd B = bspline_design(zj, comp.basis);
        comp.offset = B.colwise().mean().transpose();
        B.rowwise() -= comp.offset.transpose();
        const Eigen::MatrixXd omega = sobolev_penalty_matrix(comp.basis, options.m);
        blocks.push_back(make_block(B, omega));
        comp.dim = static_cast<int>(blocks.back().theta.size());
        // centring removes exactly one direction from a full-rank design
        if (comp.dim < comp.basis.size() - 1) block_deficient = true;
        total_dim += comp.dim;
    }

    if (all_zero && total_dim > 0) {
        if (total_dim >= n)
            fail(ErrorKind::singular, "additive: unpenalised fit with more coefficients than rows");
        if (block_deficient)
            fail(ErrorKind::singular, "additive: unpenalised fit with rank-deficient basis");
        Eigen::MatrixXd stacked(n, total_dim);
        Eigen::Index col = 0;
        for (const auto& b : blocks) {
            stacked.middleCols(col, b.U.cols()) = b.U;
            col += b.U.cols();
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stacked);
        if (qr.rank() < total_dim)
            fail(ErrorKind::singular, "additive: unpenalised fit with rank-deficient basis");
    }

    Eigen::VectorXd r = y.array() - fit.intercept;
    auto objective = [&]() {
        double obj = r.squaredNorm() * inv_n;
        for (Eigen::Index j = 0; j < p; ++j) obj += block_penalty(blocks[j], fit.components[j].penalty);
        return obj;
    };

    double obj = objective();
    fit.objective_trace.push_back(obj);
    for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
        for (Eigen::Index j = 0; j < p; ++j) {
            Block& b = blocks[j];
            if (b.theta.size() == 0) continue;
            const Penalty& pen = fit.components[j].penalty;
            const Eigen::VectorXd z = b.theta + b.U.transpose() * r * inv_n;
            const Eigen::VectorXd next = double_penalty_prox(z, b.omega, pen.rho, pen.lambda);
            const Eigen::VectorXd delta = next - b.theta;
            if (delta.squaredNorm() > 0.0) {
                r.noalias() -= b.U * delta;
                b.theta = next;
            }
        }
        const double next_obj = objective();
        fit.objective_trace.push_back(next_obj);
        fit.sweeps = sweep;
        const double change = std::abs(obj - next_obj);
        obj = next_obj;
        if (change <= options.fit_tol * std::max(std::abs(next_obj), 1e-300)) {
            fit.converged = true;
            break;
        }
    }

    fit.fitted = Eigen::VectorXd::Constant(n, fit.intercept);
    for (Eigen::Index j = 0; j < p; ++j) {
        AdditiveComponent& comp = fit.components[j];
        const Block& b = blocks[j];
        comp.active = b.theta.size() > 0 && (b.theta.array() != 0.0).any();
        if (comp.active) {
            comp.beta = b.to_beta * b.theta;
            comp.smoothness = std::sqrt(b.omega.dot(b.theta.cwiseAbs2()));
            comp.empirical_norm = b.theta.norm();
            fit.active_set.push_back(static_cast<std::size_t>(j));
            fit.fitted.noalias() += b.U * b.theta;
        } else {
            comp.beta = Eigen::VectorXd::Zero(comp.basis.size());
        }
    }
    return fit;
}

std::vector<Transform> empirical_transforms(const Eigen::MatrixXd& X) {
    std::vector<Transform> out;
    out.reserve(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index j = 0; j < X.cols(); ++j) out.push_back(Transform::fit_empirical(X.col(j)));
    return out;
}

AdditiveFit fit_additive(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         std::vector<Transform> transforms, const std::vector<Penalty>& penalties,
                         const AdditiveOptions& options) {
    if (transforms.size() != static_cast<std::size_t>(X.cols()))
        fail(ErrorKind::invalid_argument, "additive: need one transform per column");
    Eigen::MatrixXd Z(X.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) Z.col(j) = transforms[j].apply(X.col(j));
    AdditiveFit fit = fit_doubly_penalized(Z, y, penalties, options);
    fit.transforms = std::move(transforms);
    return fit;
}

double component_value(const AdditiveFit& fit, std::size_t j, double x, bool* clamped) {
    if (j >= fit.components.size()) fail(ErrorKind::invalid_argument, "additive: bad component");
    if (clamped) *clamped = false;
    const AdditiveComponent& comp = fit.components[j];
    const double z = fit.transforms.empty() ? x : fit.transforms[j](x, clamped);
    return comp.active ? comp.value(z) : 0.0;
}

double predict_nuisance(const AdditiveFit& fit, const Eigen::Ref<const Eigen::RowVectorXd>& row,
                        std::size_t exclude, int* clamp_count) {
    const std::size_t dim = fit.components.size();
    const std::size_t expected = exclude < dim ? dim - 1 : dim;
    if (static_cast<std::size_t>(row.size()) != expected)
        fail(ErrorKind::invalid_argument, "predict_nuisance: row has " +
                                              std::to_string(row.size()) + " entries, expected " +
                                              std::to_string(expected));
    double total = fit.intercept;
    for (std::size_t j = 0; j < dim; ++j) {
        if (j == exclude) continue;
        const std::size_t k = j < exclude ? j : j - 1;
        bool clamped = false;
        total += component_value(fit, j, row[static_cast<Eigen::Index>(k)], &clamped);
        if (clamped && clamp_count) ++*clamp_count;
    }
    return total;
}

Eigen::VectorXd predict_nuisance_rows(const AdditiveFit& fit, const Eigen::MatrixXd& rows,
                                      std::size_t exclude, int* clamp_count) {
    Eigen::VectorXd out(rows.rows());
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
        out[i] = predict_nuisance(fit, rows.row(i), exclude, clamp_count);
    return out;
}

Eigen::VectorXd nuisance_residuals(const Eigen::VectorXd& y, const Eigen::VectorXd& f2hat) {
    if (y.size() != f2hat.size())
        fail(ErrorKind::invalid_argument, "nuisance_residuals: length mismatch");
    return y - f2hat;
}

double err_f2_metric(const AdditiveFit& fit_a, const AdditiveFit& fit_b,
                     const Eigen::MatrixXd& fresh_rows, const Eigen::VectorXd& truth_values,
                     std::size_t exclude) {
    if (fresh_rows.rows() != truth_values.size() || fresh_rows.rows() == 0)
        fail(ErrorKind::invalid_argument, "err_f2_metric: rows and truth differ in length");
    auto rmse = [&](const AdditiveFit& fit) {
        const Eigen::VectorXd pred = predict_nuisance_rows(fit, fresh_rows, exclude);
        return std::sqrt((pred - truth_values).squaredNorm() / static_cast<double>(pred.size()));
    };
    return std::max(rmse(fit_a), rmse(fit_b));
}

}  // namespace dll
