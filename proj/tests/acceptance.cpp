// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "dll/decorrelate.hpp"
#include "dll/estimator.hpp"
#include "dll/kernel.hpp"
#include "dll/linear_models.hpp"
#include "dll/normal.hpp"
#include "dll/pipeline.hpp"
#include "dll/quadrature.hpp"
#include "dll/simulate.hpp"
#include "dll/transforms.hpp"

using namespace dll;
using boost::math::quadrature::gauss_kronrod;

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int id, bool ok, double seconds, double budget, const std::string& detail) {
    const bool in_time = seconds <= budget;
    if (!(ok && in_time)) ++failures;
    std::printf("[%s] criterion %2d: %s | %.2fs (budget %.0fs)%s\n", ok && in_time ? "PASS" : "FAIL", id,
                detail.c_str(), seconds, budget, in_time ? "" : " over budget");
    std::fflush(stdout);
}

std::string format(const char* fmt, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
    return buf;
}

double piecewise(const std::function<double(double)>& f) {
    double total = 0.0;
    const double cuts[] = {-2.0, -1.0, 1.0, 2.0};
    for (int k = 0; k < 3; ++k) total += gauss_kronrod<double, 31>::integrate(f, cuts[k], cuts[k + 1]);
    return total;
}

double ks_uniform(Eigen::VectorXd u) {
    std::sort(u.data(), u.data() + u.size());
    const double n = static_cast<double>(u.size());
    double d = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) d = std::max({d, (i + 1) / n - u[i], u[i] - i / n});
    return d;
}

void criterion_1() {
    Timer t;
    const double m0 = piecewise([](double u) { return kernel_base(u); });
    const double m1 = piecewise([](double u) { return u * kernel_base(u); });
    const double m2 = piecewise([](double u) { return u * u * kernel_base(u); });
    const double worst = std::max({std::abs(m0 - 2.0), std::abs(m1), std::abs(m2 - 1.0 / 3.0)});
    report(1, worst <= 1e-10, t.seconds(), 1,
           format("kernel moments %.12f, %.1e, %.12f; max error %.1e (tol 1e-10)", m0, m1, m2, worst));
}

void criterion_2() {
    Timer t;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Dataset d;
    d.x1.resize(200);
    for (auto& v : d.x1) v = u(rng);
    d.y = (1.0 + 3.0 * d.x1.array()).matrix();
    d.x2.resize(200, 0);
    const double ll = local_linear_slope(d.x1, d.y, KernelSpec(0.0, 0.3));
    DllOptions opt;
    opt.h = 0.3;
    const double est = dll_pipeline(d, 0.0, opt).estimate;
    const double worst = std::max(std::abs(ll - 3.0), std::abs(est - 3.0));
    report(2, worst <= 1e-8, t.seconds(), 1,
           format("local linear %.12f, DLL %.12f; max error %.1e (tol 1e-8)", ll, est, worst));
}

void criterion_3() {
    Timer t;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.05, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 50 + trial % 400;
        const double x0 = g(rng) * 0.5, h = u(rng);
        Eigen::VectorXd x(n), idx(n);
        for (int i = 0; i < n; ++i) {
            idx[i] = g(rng);
            x[i] = 0.6 * idx[i] + g(rng);
        }
        const KernelSpec spec(x0, h);
        if (effective_sample_size(x, spec) == 0) continue;
        const WeightMode mode = trial % 2 ? WeightMode::linear : WeightMode::exact_gaussian;
        const Eigen::VectorXd shifts = compute_shifts(0.6 * idx, Eigen::VectorXd::Constant(n, 1.0 + u(rng)), spec, mode);
        const DecorrelationWeights w = build_weights(x, shifts, spec, mode);
        const Eigen::VectorXd k = kernel_weights(x, spec);
        worst = std::max(worst, std::abs(w.d_hat.dot(k)) / w.d_tilde.cwiseAbs().dot(k));
    }
    report(3, worst <= 1e-10, t.seconds(), 5,
           format("max relative |sum D K| over 1000 constructions %.2e (tol 1e-10)", worst));
}

void criterion_4() {
    Timer t;
    double worst = 0.0;
    auto phi = [](double x) { return normal_pdf(x); };
    for (int a = 0; a < 10; ++a)
        for (int b = 0; b < 10; ++b) {
            const double mu = -3.0 + 0.65 * a, L = 0.05 + 0.25 * b;
            const double num = gauss_kronrod<double, 61>::integrate([&](double s) { return (s - mu) * phi(s); },
                                                                    mu - L, mu + L, 10, 1e-14);
            const double den = gauss_kronrod<double, 61>::integrate(phi, mu - L, mu + L, 10, 1e-14);
            worst = std::max(worst, std::abs(shift_exact_gaussian({mu, L}, 1.0) - num / den));
        }
    const std::vector<double> hs = {0.4, 0.2, 0.1, 0.05};
    std::vector<double> gaps;
    for (double h : hs) {
        const KernelSpec spec(0.0, h);
        gaps.push_back(std::abs(shift_exact_gaussian(make_window(-0.3, 1.0, spec), 1.0) - shift_linear(-0.3, 1.0, spec)));
    }
    // least-squares slope of log gap on log h
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < hs.size(); ++k) {
        const double lx = std::log(hs[k]), ly = std::log(gaps[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double m = static_cast<double>(hs.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    report(4, worst <= 1e-8 && slope >= 3.3 && slope <= 4.7, t.seconds(), 10,
           format("exact vs quadrature max error %.1e (tol 1e-8); log-log slope %.3f (in [3.3, 4.7])", worst, slope));
}

void criterion_5() {
    Timer t;
    const int n = 100000;
    const double h = 0.05, sigma1 = 0.5;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g(0.0, sigma1);
    Dataset d;
    d.x1.resize(n);
    d.y.resize(n);
    d.x2.resize(n, 0);
    for (int i = 0; i < n; ++i) {
        d.x1[i] = u(rng);
        d.y[i] = std::sin(2.0 * d.x1[i]) + g(rng);
    }
    DllOptions opt;
    opt.h = h;
    const DllFit fit = dll_pipeline(d, 0.5, opt);
    const double scaled = fit.variance * n * h * h * h * 1.0;
    const double ratio = scaled / (1.5 * sigma1 * sigma1);
    report(5, std::abs(ratio - 1.0) <= 0.15, t.seconds(), 60,
           format("V n h^3 pi = %.5f vs 1.5 sigma1^2 = %.5f, ratio %.4f (within 15%%)", scaled, 1.5 * sigma1 * sigma1,
                  ratio));
}

MonteCarloResult run_reference(const std::string& name, bool oracle = false) {
    const ReferenceCase rc = reference_case(name);
    MethodOptions m = rc.method;
    m.oracle = m.oracle || oracle;
    return monte_carlo(rc.config, rc.replications, m, default_thread_count());
}

void criterion_6() {
    Timer t;
    const MonteCarloResult r = run_reference("lowdim");
    report(6, r.report.coverage >= 0.88, t.seconds(), 600,
           format("lowdim coverage %.3f over %.0f replications (need >= 0.88), mean length %.3f, failures %.0f",
                  r.report.coverage, r.report.replications, r.report.mean_ci_length, r.report.failures));
}

void criteria_7_and_11() {
    Timer t7;
    const MonteCarloResult est = run_reference("highdim");
    const int B = est.report.replications + est.report.failures;
    const double fail_rate = static_cast<double>(est.report.failures) / B;
    report(7,
           est.report.coverage >= 0.85 && std::isfinite(est.report.mean_ci_length) && fail_rate <= 0.05,
           t7.seconds(), 1200,
           format("highdim coverage %.3f (need >= 0.85), mean length %.3f, failure rate %.3f (max 0.05)",
                  est.report.coverage, est.report.mean_ci_length, fail_rate));

    Timer t11;
    const MonteCarloResult orc = run_reference("highdim", true);
    report(11, orc.report.coverage >= est.report.coverage - 0.03, t11.seconds(), 1200,
           format("oracle coverage %.3f vs estimated %.3f (need >= estimated - 0.03)", orc.report.coverage,
                  est.report.coverage));
}

void criterion_8() {
    Timer t;
    const ReferenceCase rc = reference_case("naive");
    const int threads = default_thread_count();
    const NaiveComparison cor =
        compare_naive(rc.config, rc.replications, 0.3, Contamination::correlated, rc.method, threads);
    const NaiveComparison ort =
        compare_naive(rc.config, rc.replications, 0.3, Contamination::orthogonal, rc.method, threads);
    report(8, cor.win_rate >= 0.80 && ort.win_rate >= 0.35 && ort.win_rate <= 0.65, t.seconds(), 600,
           format("win rate %.3f correlated (need >= 0.80), %.3f orthogonal (need in [0.35, 0.65]); "
                  "bias DLL %.4f vs plug-in %.4f",
                  cor.win_rate, ort.win_rate, cor.dll_bias, cor.naive_bias));
}

void criterion_9() {
    Timer t;
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    auto gaussian = [&](int n, int p) {
        Eigen::MatrixXd m(n, p);
        for (int j = 0; j < p; ++j)
            for (int i = 0; i < n; ++i) m(i, j) = g(rng);
        return m;
    };

    // orthonormal design: gamma_j = soft(c_j, sigma lambda0) with sigma from a scalar bisection
    const int n = 300, p = 25;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(n, p));
    const Eigen::MatrixXd X = Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(n, p)) * std::sqrt(n);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    beta[0] = 1.0;
    beta[4] = -0.6;
    beta[9] = 0.25;
    const Eigen::VectorXd y = X * beta + gaussian(n, 1);
    const double lambda0 = std::sqrt(2.0 * 1.01 * std::log(static_cast<double>(p)) / n);
    const Eigen::VectorXd c = X.transpose() * y / n;
    auto soft_at = [&](double s) {
        Eigen::VectorXd out(p);
        for (int j = 0; j < p; ++j) {
            const double tt = s * lambda0;
            out[j] = c[j] > tt ? c[j] - tt : (c[j] < -tt ? c[j] + tt : 0.0);
        }
        return out;
    };
    double lo = 1e-12, hi = y.norm() / std::sqrt(n) + 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Eigen::VectorXd gm = soft_at(mid);
        const double rhs = y.squaredNorm() / n - 2.0 * c.dot(gm) + gm.squaredNorm();
        (mid * mid > rhs ? hi : lo) = mid;
    }
    const Eigen::VectorXd want = soft_at(0.5 * (lo + hi));
    const ProjectionFit fit = scaled_lasso(X, y);
    const double oracle_gap = std::max((fit.gamma - want).cwiseAbs().maxCoeff(), std::abs(fit.sigma2 - 0.5 * (lo + hi)));

    double worst_kkt = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int nn = 80 + 6 * trial, pp = 30 + 7 * trial;
        const Eigen::MatrixXd X2 = gaussian(nn, pp);
        const Eigen::VectorXd X1 = 0.7 * X2.col(0) - 0.4 * X2.col(1) + gaussian(nn, 1);
        const ProjectionFit f = scaled_lasso(X2, X1);
        Eigen::MatrixXd Xs = X2;
        for (int j = 0; j < pp; ++j) Xs.col(j) /= f.column_scale[j];
        worst_kkt = std::max(worst_kkt, kkt_check(Xs, X1, f.penalty_level, f.gamma.cwiseProduct(f.column_scale)));
    }
    report(9, oracle_gap <= 1e-6 && worst_kkt <= 1e-8, t.seconds(), 30,
           format("orthonormal oracle gap %.1e (tol 1e-6); max KKT residual over 50 problems %.1e (tol 1e-8)",
                  oracle_gap, worst_kkt));
}

void criterion_10() {
    Timer t;
    const MonteCarloResult r = run_reference("univariate");
    int inside = 0, total = 0;
    for (const auto& rec : r.records) {
        if (!rec.ok) continue;
        ++total;
        if (std::abs((rec.estimate - rec.truth) / std::sqrt(rec.variance)) < 1.96) ++inside;
    }
    const double frac = static_cast<double>(inside) / total;
    report(10, frac >= 0.92 && frac <= 0.98, t.seconds(), 300,
           format("fraction of |standardized error| < 1.96: %.3f over %.0f replications (need in [0.92, 0.98])",
                  frac, total));
}

void criterion_12() {
    Timer t;
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g;
    Eigen::VectorXd x(10000);
    for (auto& v : x) v = g(rng);
    const double ks_known = ks_uniform(Transform::known_cdf(normal_cdf).apply(x));
    const double ks_emp = ks_uniform(empirical_cdf_transform(x));
    const double crit = 1.36 / std::sqrt(10000.0);
    report(12, ks_known < crit && ks_emp < 0.02, t.seconds(), 5,
           format("KS known CDF %.4f (need < %.4f); KS empirical %.4f (need < 0.02)", ks_known, crit, ks_emp));
}

}  // namespace

int main() {
    std::printf("acceptance run, %d worker threads\n", default_thread_count());
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criteria_7_and_11();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_12();
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
