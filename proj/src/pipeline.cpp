#include "dll/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "dll/error.hpp"
#include "dll/estimator.hpp"

namespace dll {
namespace {

struct FoldData {
    Eigen::VectorXd y;
    Eigen::VectorXd x1;
    Eigen::MatrixXd x2;
};

FoldData take_rows(const Dataset& data, const std::vector<Eigen::Index>& rows) {
    FoldData f;
    const auto m = static_cast<Eigen::Index>(rows.size());
    f.y.resize(m);
    f.x1.resize(m);
    f.x2.resize(m, data.p());
    for (Eigen::Index r = 0; r < m; ++r) {
        f.y[r] = data.y[rows[r]];
        f.x1[r] = data.x1[rows[r]];
        f.x2.row(r) = data.x2.row(rows[r]);
    }
    return f;
}

ProjectionMethod pick_method(ProjectionChoice choice, Eigen::Index n_fold, Eigen::Index p) {
    switch (choice) {
        case ProjectionChoice::ols: return ProjectionMethod::ols;
        case ProjectionChoice::scaled_lasso: return ProjectionMethod::scaled_lasso;
        case ProjectionChoice::automatic: break;
    }
    return n_fold >= 10 * (p + 1) ? ProjectionMethod::ols : ProjectionMethod::scaled_lasso;
}

ProjectionFit fit_projection(const Eigen::MatrixXd& X2, const Eigen::VectorXd& X1,
                             ProjectionMethod method, const DllOptions& options) {
    if (method == ProjectionMethod::ols)
        return ols_projection(X2, X1, options.projection_intercept);
    ScaledLassoOptions so;
    so.A = options.lasso_A;
    so.intercept = options.projection_intercept;
    return scaled_lasso(X2, X1, so);
}

std::vector<Transform> make_transforms(const Eigen::MatrixXd& X, const DllOptions& options) {
    if (options.known_cdfs.empty()) return empirical_transforms(X);
    std::vector<Transform> out;
    for (const auto& cdf : options.known_cdfs) out.push_back(Transform::known_cdf(cdf));
    return out;
}

FoldModel fit_fold(const FoldData& f, ProjectionMethod method, const DllOptions& options) {
    FoldModel model;
    model.projection = fit_projection(f.x2, f.x1, method, options);
    Eigen::MatrixXd X(f.y.size(), f.x2.cols() + 1);
    X.col(0) = f.x1;
    X.rightCols(f.x2.cols()) = f.x2;
    const Penalty pen = default_penalties(static_cast<int>(f.y.size()),
                                          static_cast<int>(X.cols()), options.additive.m,
                                          options.c_rho, options.c_lambda);
    model.additive = fit_additive(X, f.y, make_transforms(X, options), {pen}, options.additive);
    return model;
}

}  // namespace

void Dataset::validate() const {
    if (x1.size() != y.size() || x2.rows() != y.size())
        fail(ErrorKind::data, "dataset: y, x1 and x2 have different row counts");
    if (!y.allFinite() || !x1.allFinite() || !x2.allFinite())
        fail(ErrorKind::data, "dataset: non-finite values");
}

const char* to_string(ProjectionChoice choice) {
    switch (choice) {
        case ProjectionChoice::automatic: return "auto";
        case ProjectionChoice::ols: return "ols";
        case ProjectionChoice::scaled_lasso: return "scaled_lasso";
    }
    return "unknown";
}

const char* to_string(FitMode mode) {
    return mode == FitMode::oracle ? "oracle" : "estimated";
}

void DllOptions::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
        fail(ErrorKind::invalid_argument, "alpha must lie in (0, 1)");
    if (h && !(*h > 0.0)) fail(ErrorKind::invalid_argument, "bandwidth h must be positive");
    if (!(bandwidth_c > 0.0)) fail(ErrorKind::invalid_argument, "bandwidth constant must be positive");
    if (!(lasso_A > 1.0)) fail(ErrorKind::invalid_argument, "Lasso constant A must exceed 1");
    if (!(c_rho >= 0.0) || !(c_lambda >= 0.0))
        fail(ErrorKind::invalid_argument, "penalty constants must be nonnegative");
    if (sigma1_known && !(*sigma1_known > 0.0))
        fail(ErrorKind::invalid_argument, "known sigma1 must be positive");
    if (weight_mode == WeightMode::general_density && !error_density)
        fail(ErrorKind::invalid_argument, "general_density weights need an error density");
}

KernelSpec resolve_bandwidth(const Dataset& data, double x0, const DllOptions& options) {
    if (options.h) return KernelSpec(x0, *options.h);
    return KernelSpec(x0, bandwidth_default(data.x1, x0, options.bandwidth_c));
}

CrossFitState cross_fit(const Dataset& data, const DllOptions& options) {
    data.validate();
    options.validate();
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    if (n < 40) fail(ErrorKind::insufficient_data, "pipeline: need n >= 40");
    if (!options.known_cdfs.empty() && options.known_cdfs.size() != static_cast<std::size_t>(p + 1))
        fail(ErrorKind::invalid_argument, "pipeline: need one known CDF per coordinate");

    CrossFitState st;
    st.plan = swap_split(n, options.seed);
    st.index = Eigen::VectorXd::Zero(n);
    st.sigma2 = Eigen::VectorXd::Ones(n);
    st.f2hat = Eigen::VectorXd::Zero(n);

    if (p == 0) {
        Eigen::MatrixXd X = data.x1;
        const Penalty pen =
            default_penalties(static_cast<int>(n), 1, options.additive.m, options.c_rho,
                              options.c_lambda);
        const AdditiveFit fit =
            fit_additive(X, data.y, make_transforms(X, options), {pen}, options.additive);
        st.sigma1 = sigma1_estimate(data.y, fit.fitted, fit.degrees_of_freedom());
        if (!fit.converged) st.flags.push_back("additive_not_converged");
        return st;
    }

    const auto n_fold = static_cast<Eigen::Index>(st.plan.fold_b.size());
    const ProjectionMethod method = pick_method(options.projection, n_fold, p);
    const FoldData da = take_rows(data, st.plan.fold_a);
    const FoldData db = take_rows(data, st.plan.fold_b);
    st.fold_a = fit_fold(da, method, options);
    st.fold_b = fit_fold(db, method, options);
    st.whole = fit_projection(data.x2, data.x1, method, options);

    auto apply = [&](const std::vector<Eigen::Index>& rows, const FoldModel& other) {
        const double s2 = options.sigma2_pooled ? st.whole.sigma2 : other.projection.sigma2;
        for (Eigen::Index i : rows) {
            st.index[i] = other.projection.predict_row(data.x2.row(i));
            st.sigma2[i] = s2;
            st.f2hat[i] = predict_nuisance(other.additive, data.x2.row(i), 0, &st.clamp_count);
        }
    };
    apply(st.plan.fold_a, st.fold_b);
    apply(st.plan.fold_b, st.fold_a);

    Eigen::VectorXd in_fold(n);
    for (std::size_t r = 0; r < st.plan.fold_a.size(); ++r)
        in_fold[st.plan.fold_a[r]] = st.fold_a.additive.fitted[static_cast<Eigen::Index>(r)];
    for (std::size_t r = 0; r < st.plan.fold_b.size(); ++r)
        in_fold[st.plan.fold_b[r]] = st.fold_b.additive.fitted[static_cast<Eigen::Index>(r)];
    const int df = st.fold_a.additive.degrees_of_freedom() + st.fold_b.additive.degrees_of_freedom();
    if (df >= n)
        fail(ErrorKind::insufficient_data, "nuisance fits use " + std::to_string(df) +
                                               " degrees of freedom with only " + std::to_string(n) +
                                               " observations");
    st.sigma1 = sigma1_estimate(data.y, in_fold, df);

    if (!st.fold_a.projection.converged || !st.fold_b.projection.converged || !st.whole.converged)
        st.flags.push_back("projection_not_converged");
    if (!st.fold_a.additive.converged || !st.fold_b.additive.converged)
        st.flags.push_back("additive_not_converged");
    if (st.clamp_count > 0) st.flags.push_back("transform_clamped");
    return st;
}

Eigen::VectorXd estimated_shifts(const CrossFitState& state, const KernelSpec& spec,
                                 const DllOptions& options, int* underflow_count) {
    if (state.fold_a.projection.gamma.size() == 0)
        return Eigen::VectorXd::Zero(state.index.size());
    return compute_shifts(state.index, state.sigma2, spec, options.weight_mode,
                          options.error_density, underflow_count);
}

DllFit assemble(const Dataset& data, const CrossFitState& state, const KernelSpec& spec,
                const Eigen::VectorXd& shifts, const Eigen::VectorXd& residuals,
                const DllOptions& options, FitMode mode, PipelineTrace* trace) {
    const std::size_t count = effective_sample_size(data.x1, spec);
    if (count < std::max<std::size_t>(options.min_window_points, 2))
        fail(ErrorKind::insufficient_data,
             "pipeline: " + std::to_string(count) + " observations in the kernel window, need " +
                 std::to_string(options.min_window_points));

    const WeightMode wmode = mode == FitMode::oracle ? WeightMode::oracle_known : options.weight_mode;
    DecorrelationWeights w = build_weights(data.x1, shifts, spec, wmode);

    DllFit fit;
    fit.mode = mode;
    fit.weight_mode = wmode;
    fit.alpha = options.alpha;
    fit.x0 = spec.x0();
    fit.h = spec.h();
    fit.n = data.n();
    fit.p = data.p();
    fit.n_effective = static_cast<Eigen::Index>(count);
    fit.s_n = s_n(w, data.x1, spec);
    fit.estimate = dll_point(w, residuals, data.x1, spec);
    fit.sigma1 = options.sigma1_known ? *options.sigma1_known : state.sigma1;
    fit.variance = variance_estimate(w, data.x1, spec, fit.sigma1, fit.s_n);
    std::tie(fit.ci_low, fit.ci_high) =
        confidence_interval(fit.estimate, fit.variance, options.alpha, options.ci_literal);
    fit.reject_zero = test_zero(fit.estimate, fit.variance, options.alpha);

    DllDiagnostics& d = fit.diagnostics;
    d.centering_shift = w.centering_shift;
    d.clamp_count = state.clamp_count;
    d.flags = state.flags;
    if (data.p() > 0) {
        d.sigma2 = state.whole.sigma2;
        d.projection_method = to_string(state.whole.method);
        d.projection_support = state.whole.support_size();
        d.C_u = growth_constant(spec, state.whole.gamma, state.whole.sigma2, data.n());
    } else {
        const double mean = data.x1.mean();
        const double sd =
            std::sqrt((data.x1.array() - mean).square().sum() / static_cast<double>(data.n() - 1));
        d.sigma2 = sd;
        d.projection_method = "none";
        d.C_u = growth_constant(spec, Eigen::VectorXd(), sd > 0.0 ? sd : 1.0, data.n());
    }

    if (trace) {
        trace->state = state;
        trace->weights = std::move(w);
        trace->residuals = residuals;
        trace->shifts = shifts;
    }
    return fit;
}

DllFit dll_pipeline(const Dataset& data, double x0, const DllOptions& options,
                    PipelineTrace* trace) {
    const CrossFitState state = cross_fit(data, options);
    const KernelSpec spec = resolve_bandwidth(data, x0, options);
    int underflows = 0;
    const Eigen::VectorXd shifts = estimated_shifts(state, spec, options, &underflows);
    const Eigen::VectorXd residuals = nuisance_residuals(data.y, state.f2hat);
    DllFit fit = assemble(data, state, spec, shifts, residuals, options, FitMode::estimated, trace);
    fit.diagnostics.underflow_count = underflows;
    if (underflows > 0) fit.diagnostics.flags.push_back("shift_underflow");
    return fit;
}

DllFit oracle_pipeline(const Dataset& data, double x0, const Eigen::VectorXd& true_gamma,
                       double true_sigma2, const DllOptions& options, PipelineTrace* trace) {
    if (true_gamma.size() != data.p())
        fail(ErrorKind::invalid_argument, "oracle_pipeline: gamma has the wrong length");
    if (!(true_sigma2 > 0.0))
        fail(ErrorKind::invalid_argument, "oracle_pipeline: sigma2 must be positive");
    const CrossFitState state = cross_fit(data, options);
    const KernelSpec spec = resolve_bandwidth(data, x0, options);
    int underflows = 0;
    const Eigen::VectorXd index = data.x2 * true_gamma;
    const Eigen::VectorXd shifts =
        compute_shifts(index, Eigen::VectorXd::Constant(data.n(), true_sigma2), spec,
                       WeightMode::oracle_known, {}, &underflows);
    const Eigen::VectorXd residuals = nuisance_residuals(data.y, state.f2hat);
    DllFit fit = assemble(data, state, spec, shifts, residuals, options, FitMode::oracle, trace);
    fit.diagnostics.underflow_count = underflows;
    if (underflows > 0) fit.diagnostics.flags.push_back("shift_underflow");
    return fit;
}

}  // namespace dll
