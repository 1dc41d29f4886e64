#include <doctest.h>

#include <cmath>
#include <random>

#include "dll/error.hpp"
#include "dll/estimator.hpp"
#include "dll/normal.hpp"
#include "dll/pipeline.hpp"

using namespace dll;

namespace {

Dataset linear_dataset(int n, int p, double slope, double noise, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Dataset d;
    d.x2.resize(n, p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) d.x2(i, j) = g(rng);
    d.x1.resize(n);
    d.y.resize(n);
    for (int i = 0; i < n; ++i) {
        double idx = 0.0;
        for (int j = 0; j < p; ++j) idx += 0.5 / (j + 1) * d.x2(i, j);
        d.x1[i] = idx + g(rng);
        double f2 = 0.0;
        for (int j = 0; j < p; ++j) f2 += (j % 2 ? -0.7 : 0.4) * d.x2(i, j);
        d.y[i] = slope * d.x1[i] + f2 + noise * g(rng);
    }
    return d;
}

}  // namespace

TEST_CASE("univariate path recovers an exact line") {
    Dataset d;
    d.x1 = Eigen::VectorXd::LinSpaced(200, -1.0, 1.0);
    d.y = (1.0 + 3.0 * d.x1.array()).matrix();
    d.x2.resize(200, 0);
    DllOptions opt;
    opt.h = 0.3;
    const DllFit fit = dll_pipeline(d, 0.1, opt);
    CHECK(fit.estimate == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(fit.p == 0);
    CHECK(fit.diagnostics.projection_method == "none");
}

TEST_CASE("low-dimensional noiseless linear model") {
    const Dataset d = linear_dataset(500, 2, 1.5, 0.0, 1);
    DllOptions opt;
    opt.h = 0.5;
    const DllFit fit = dll_pipeline(d, 0.0, opt);
    CHECK(std::abs(fit.estimate - 1.5) <= 1e-2);
    CHECK(fit.diagnostics.projection_method == "ols");
}

TEST_CASE("fit invariants and determinism") {
    const Dataset d = linear_dataset(600, 4, 1.0, 0.5, 2);
    DllOptions opt;
    opt.seed = 9;
    const DllFit a = dll_pipeline(d, 0.2, opt);
    const DllFit b = dll_pipeline(d, 0.2, opt);
    CHECK(a.estimate == b.estimate);
    CHECK(a.variance == b.variance);
    CHECK(a.variance > 0.0);
    CHECK(a.ci_low <= a.estimate);
    CHECK(a.estimate <= a.ci_high);
    CHECK(a.ci_high - a.ci_low == doctest::Approx(2.0 * z_critical(0.05) * std::sqrt(a.variance)).epsilon(1e-12));
    CHECK(a.reject_zero == test_zero(a.estimate, a.variance, 0.05));
    CHECK(a.h == doctest::Approx(bandwidth_default(d.x1, 0.2, 0.5)));
    CHECK(a.n_effective == static_cast<Eigen::Index>(effective_sample_size(d.x1, KernelSpec(0.2, a.h))));
    CHECK(a.mode == FitMode::estimated);

    opt.ci_literal = true;
    const DllFit lit = dll_pipeline(d, 0.2, opt);
    CHECK(lit.ci_high - lit.estimate == doctest::Approx(z_critical(0.05) * lit.variance).epsilon(1e-12));
}

TEST_CASE("cross-fitting applies each fold's models to the other fold") {
    const Dataset d = linear_dataset(300, 3, 1.0, 0.3, 3);
    DllOptions opt;
    opt.seed = 4;
    const CrossFitState st = cross_fit(d, opt);
    for (Eigen::Index i : st.plan.fold_a) {
        CHECK(st.index[i] == st.fold_b.projection.predict_row(d.x2.row(i)));
        CHECK(st.f2hat[i] == predict_nuisance(st.fold_b.additive, d.x2.row(i), 0));
        CHECK(st.sigma2[i] == st.whole.sigma2);
    }
    for (Eigen::Index i : st.plan.fold_b) {
        CHECK(st.index[i] == st.fold_a.projection.predict_row(d.x2.row(i)));
        CHECK(st.f2hat[i] == predict_nuisance(st.fold_a.additive, d.x2.row(i), 0));
    }

    opt.sigma2_pooled = false;
    const CrossFitState per = cross_fit(d, opt);
    for (Eigen::Index i : per.plan.fold_a) CHECK(per.sigma2[i] == per.fold_b.projection.sigma2);
    for (Eigen::Index i : per.plan.fold_b) CHECK(per.sigma2[i] == per.fold_a.projection.sigma2);
}

TEST_CASE("projection method selection") {
    DllOptions opt;
    opt.h = 0.6;
    CHECK(dll_pipeline(linear_dataset(400, 3, 1.0, 0.5, 5), 0.0, opt).diagnostics.projection_method == "ols");
    CHECK(dll_pipeline(linear_dataset(600, 30, 1.0, 0.5, 6), 0.0, opt).diagnostics.projection_method ==
          "scaled_lasso");
    opt.projection = ProjectionChoice::scaled_lasso;
    CHECK(dll_pipeline(linear_dataset(400, 3, 1.0, 0.5, 5), 0.0, opt).diagnostics.projection_method ==
          "scaled_lasso");
}

TEST_CASE("oracle and estimated modes differ only in the shifts") {
    const Dataset d = linear_dataset(400, 3, 1.0, 0.5, 7);
    DllOptions opt;
    opt.h = 0.5;
    opt.seed = 11;
    PipelineTrace te, to;
    Eigen::VectorXd gamma(3);
    gamma << 0.5, 0.25, 0.5 / 3.0;
    const DllFit est = dll_pipeline(d, 0.0, opt, &te);
    const DllFit orc = oracle_pipeline(d, 0.0, gamma, 1.0, opt, &to);
    CHECK(orc.mode == FitMode::oracle);
    CHECK(orc.weight_mode == WeightMode::oracle_known);
    CHECK(te.residuals == to.residuals);
    CHECK(te.state.sigma1 == to.state.sigma1);
    CHECK(te.shifts != to.shifts);

    // assembling with the oracle shifts on the estimated state reproduces the oracle fit
    const DllFit again = assemble(d, te.state, KernelSpec(0.0, 0.5), to.shifts, te.residuals, opt, FitMode::oracle);
    CHECK(again.estimate == orc.estimate);
    CHECK(again.variance == orc.variance);

    // zero gamma gives constant shifts, which centering removes
    PipelineTrace tz;
    oracle_pipeline(d, 0.0, Eigen::VectorXd::Zero(3), 1.0, opt, &tz);
    const DecorrelationWeights plain =
        build_weights(d.x1, Eigen::VectorXd::Zero(d.n()), KernelSpec(0.0, 0.5), WeightMode::linear);
    CHECK((tz.weights.d_hat - plain.d_hat).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(oracle_pipeline(d, 0.0, Eigen::VectorXd::Zero(2), 1.0, opt), Error);
    CHECK_THROWS_AS(oracle_pipeline(d, 0.0, gamma, 0.0, opt), Error);
}

TEST_CASE("weight modes") {
    const Dataset d = linear_dataset(400, 2, 1.0, 0.5, 8);
    DllOptions opt;
    opt.h = 0.5;
    opt.weight_mode = WeightMode::exact_gaussian;
    const DllFit exact = dll_pipeline(d, 0.0, opt);
    opt.weight_mode = WeightMode::general_density;
    opt.error_density = normal_pdf;
    const DllFit general = dll_pipeline(d, 0.0, opt);
    CHECK(general.estimate == doctest::Approx(exact.estimate).epsilon(1e-7));
    opt.error_density = nullptr;
    CHECK_THROWS_AS(dll_pipeline(d, 0.0, opt), Error);
}

TEST_CASE("known sigma1 and known CDFs") {
    const Dataset d = linear_dataset(300, 1, 1.0, 0.5, 9);
    DllOptions opt;
    opt.h = 0.5;
    opt.sigma1_known = 0.5;
    const DllFit fit = dll_pipeline(d, 0.0, opt);
    CHECK(fit.sigma1 == 0.5);

    DllOptions cdfs;
    cdfs.h = 0.5;
    const double sd1 = std::sqrt(1.25);
    cdfs.known_cdfs = {[sd1](double x) { return normal_cdf(x / sd1); }, normal_cdf};
    const DllFit k = dll_pipeline(d, 0.0, cdfs);
    CHECK(std::isfinite(k.estimate));
    cdfs.known_cdfs.pop_back();
    CHECK_THROWS_AS(dll_pipeline(d, 0.0, cdfs), Error);
}

TEST_CASE("pipeline errors") {
    Dataset small = linear_dataset(39, 1, 1.0, 0.5, 10);
    try {
        dll_pipeline(small, 0.0);
        FAIL("expected insufficient data");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::insufficient_data);
    }
    Dataset bad = linear_dataset(100, 1, 1.0, 0.5, 10);
    bad.y[3] = NAN;
    try {
        dll_pipeline(bad, 0.0);
        FAIL("expected data error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::data);
    }
    Dataset ok = linear_dataset(100, 1, 1.0, 0.5, 10);
    DllOptions narrow;
    narrow.h = 1e-4;
    try {
        dll_pipeline(ok, 0.0, narrow);
        FAIL("expected insufficient data");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::insufficient_data);
    }
    DllOptions alpha;
    alpha.alpha = 1.5;
    CHECK_THROWS_AS(dll_pipeline(ok, 0.0, alpha), Error);
}
