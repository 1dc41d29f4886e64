#include "dll/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <thread>

#include "dll/error.hpp"
#include "dll/estimator.hpp"
#include "dll/kernel.hpp"

namespace dll {
namespace {

constexpr std::uint64_t kDesignStream = 1;
constexpr std::uint64_t kProjectionNoiseStream = 2;
constexpr std::uint64_t kSwapStream = 3;
constexpr std::uint64_t kFreshStream = 4;
constexpr std::uint64_t kResponseStream = 5;
constexpr std::uint64_t kContaminationStream = 6;

const double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::VectorXd gamma_of(const SimConfig& config) {
    return config.gamma_true.size() == 0 ? Eigen::VectorXd::Zero(config.p) : config.gamma_true;
}

template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
    threads = std::clamp(threads <= 0 ? default_thread_count() : threads, 1, std::max(count, 1));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) fn(i);
        });
    for (auto& th : pool) th.join();
}

double population_sd(const std::vector<double>& v, double mean) {
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return v.empty() ? kNaN : std::sqrt(acc / static_cast<double>(v.size()));
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return kNaN;
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

DllOptions replication_options(const SimConfig& config, const MethodOptions& method) {
    DllOptions opt = method.dll;
    opt.seed = derive_seed(config.seed, kSwapStream);
    if (method.known_sigma1 && config.sigma1_true > 0.0) opt.sigma1_known = config.sigma1_true;
    return opt;
}

}  // namespace

const char* to_string(FunctionId id) {
    switch (id) {
        case FunctionId::linear: return "linear";
        case FunctionId::quadratic: return "quadratic";
        case FunctionId::sine: return "sine";
        case FunctionId::bump: return "bump";
        case FunctionId::zero: return "zero";
    }
    return "unknown";
}

FunctionId parse_function_id(const std::string& name) {
    for (FunctionId id : {FunctionId::linear, FunctionId::quadratic, FunctionId::sine,
                          FunctionId::bump, FunctionId::zero})
        if (name == to_string(id)) return id;
    fail(ErrorKind::invalid_argument, "unknown function id '" + name + "'");
}

double FunctionSpec::value(double x) const {
    switch (id) {
        case FunctionId::linear: return a * x;
        case FunctionId::quadratic: return a * x * x;
        case FunctionId::sine: return a * std::sin(b * x);
        case FunctionId::bump: return a * std::exp(-x * x / (2.0 * b * b));
        case FunctionId::zero: return 0.0;
    }
    return 0.0;
}

double FunctionSpec::derivative(double x) const {
    switch (id) {
        case FunctionId::linear: return a;
        case FunctionId::quadratic: return 2.0 * a * x;
        case FunctionId::sine: return a * b * std::cos(b * x);
        case FunctionId::bump: return -a * x / (b * b) * std::exp(-x * x / (2.0 * b * b));
        case FunctionId::zero: return 0.0;
    }
    return 0.0;
}

void SimConfig::validate() const {
    if (n < 1) fail(ErrorKind::invalid_argument, "simulation: n must be positive");
    if (p < 0) fail(ErrorKind::invalid_argument, "simulation: p must be nonnegative");
    if (gamma_true.size() != 0 && gamma_true.size() != p)
        fail(ErrorKind::invalid_argument, "simulation: gamma_true must have p entries");
    if (!(sigma2_true > 0.0)) fail(ErrorKind::invalid_argument, "simulation: sigma2 must be > 0");
    if (!(sigma1_true >= 0.0)) fail(ErrorKind::invalid_argument, "simulation: sigma1 must be >= 0");
    if (design == DesignCov::ar1 && !(std::abs(rho) < 1.0))
        fail(ErrorKind::invalid_argument, "simulation: ar1 correlation must lie in (-1, 1)");
    if (f1.id == FunctionId::bump && !(f1.b != 0.0))
        fail(ErrorKind::invalid_argument, "simulation: bump width must be nonzero");
    for (const auto& term : nuisance) {
        if (term.coordinate < 0 || term.coordinate >= p)
            fail(ErrorKind::invalid_argument, "simulation: nuisance coordinate out of range");
        if (term.f.id == FunctionId::bump && !(term.f.b != 0.0))
            fail(ErrorKind::invalid_argument, "simulation: bump width must be nonzero");
    }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t offset) {
    // splitmix64 finaliser
    std::uint64_t z = seed + offset * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Eigen::MatrixXd gen_covariates(const SimConfig& config, Eigen::Index rows, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd X2(rows, config.p);
    const double tail = std::sqrt(1.0 - config.rho * config.rho);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < config.p; ++j) {
            const double z = normal(rng);
            if (config.design == DesignCov::ar1 && j > 0)
                X2(i, j) = config.rho * X2(i, j - 1) + tail * z;
            else
                X2(i, j) = z;
        }
    }
    return X2;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> gen_design(const SimConfig& config) {
    config.validate();
    Eigen::MatrixXd X2 = gen_covariates(config, config.n, derive_seed(config.seed, kDesignStream));
    std::mt19937_64 rng(derive_seed(config.seed, kProjectionNoiseStream));
    std::normal_distribution<double> normal(0.0, config.sigma2_true);
    Eigen::VectorXd X1 = X2 * gamma_of(config);
    for (Eigen::Index i = 0; i < config.n; ++i) X1[i] += normal(rng);
    return {std::move(X1), std::move(X2)};
}

Eigen::VectorXd nuisance_truth(const Eigen::MatrixXd& X2, const SimConfig& config) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(X2.rows());
    for (const auto& term : config.nuisance) {
        if (term.coordinate >= X2.cols())
            fail(ErrorKind::invalid_argument, "simulation: nuisance coordinate out of range");
        for (Eigen::Index i = 0; i < X2.rows(); ++i) out[i] += term.f.value(X2(i, term.coordinate));
    }
    return out;
}

Eigen::VectorXd gen_response(const Eigen::VectorXd& X1, const Eigen::MatrixXd& X2,
                             const SimConfig& config) {
    if (X1.size() != X2.rows()) fail(ErrorKind::invalid_argument, "simulation: shape mismatch");
    Eigen::VectorXd y = nuisance_truth(X2, config);
    for (Eigen::Index i = 0; i < X1.size(); ++i) y[i] += config.f1.value(X1[i]);
    if (config.sigma1_true > 0.0) {
        std::mt19937_64 rng(derive_seed(config.seed, kResponseStream));
        std::normal_distribution<double> normal(0.0, config.sigma1_true);
        for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += normal(rng);
    }
    return y;
}

Dataset gen_dataset(const SimConfig& config) {
    auto [X1, X2] = gen_design(config);
    Dataset data;
    data.y = gen_response(X1, X2, config);
    data.x1 = std::move(X1);
    data.x2 = std::move(X2);
    return data;
}

ReplicationRecord run_replication(const SimConfig& config, const MethodOptions& method) {
    ReplicationRecord rec;
    rec.seed = config.seed;
    rec.err_D = kNaN;
    rec.err_f2 = kNaN;
    try {
        rec.truth = config.target();
        const Dataset data = gen_dataset(config);
        const DllOptions opt = replication_options(config, method);
        const Eigen::VectorXd gamma = gamma_of(config);
        PipelineTrace trace;
        const DllFit fit = method.oracle
                               ? oracle_pipeline(data, config.x0, gamma, config.sigma2_true, opt, &trace)
                               : dll_pipeline(data, config.x0, opt, &trace);
        rec.estimate = fit.estimate;
        rec.ci_low = fit.ci_low;
        rec.ci_high = fit.ci_high;
        rec.variance = fit.variance;
        rec.sigma1 = fit.sigma1;
        rec.covered = fit.ci_low <= rec.truth && rec.truth <= fit.ci_high;
        rec.rejected = fit.reject_zero;

        if (method.compute_errors) {
            const KernelSpec spec(fit.x0, fit.h);
            const Eigen::VectorXd shifts =
                compute_shifts(data.x2 * gamma, Eigen::VectorXd::Constant(data.n(), config.sigma2_true),
                               spec, WeightMode::oracle_known);
            const DecorrelationWeights oracle =
                build_weights(data.x1, shifts, spec, WeightMode::oracle_known);
            rec.err_D = err_D_metric(trace.weights, oracle, data.x1, spec);
            if (config.p > 0) {
                const Eigen::MatrixXd fresh = gen_covariates(config, method.fresh_draws,
                                                             derive_seed(config.seed, kFreshStream));
                rec.err_f2 = err_f2_metric(trace.state.fold_a.additive, trace.state.fold_b.additive,
                                           fresh, nuisance_truth(fresh, config));
            }
        }
        rec.ok = std::isfinite(rec.estimate) && std::isfinite(rec.variance);
        if (!rec.ok) rec.error = "non-finite estimate";
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
    }
    return rec;
}

int default_thread_count() {
    if (const char* env = std::getenv("DLL_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

MCReport summarize(const std::vector<ReplicationRecord>& records) {
    MCReport rep;
    std::vector<double> errors, lengths, err_d, err_f2;
    int covered = 0;
    int rejected = 0;
    for (const auto& r : records) {
        if (!r.ok) {
            ++rep.failures;
            continue;
        }
        errors.push_back(r.estimate - r.truth);
        lengths.push_back(r.ci_high - r.ci_low);
        if (r.covered) ++covered;
        if (r.rejected) ++rejected;
        if (std::isfinite(r.err_D)) err_d.push_back(r.err_D);
        if (std::isfinite(r.err_f2)) err_f2.push_back(r.err_f2);
    }
    rep.replications = static_cast<int>(errors.size());
    if (rep.replications == 0) {
        rep.coverage = rep.mean_ci_length = rep.bias = rep.sd = rep.rmse = kNaN;
        rep.rejection_rate = rep.mean_err_D = rep.mean_err_f2 = kNaN;
        return rep;
    }
    const double count = static_cast<double>(rep.replications);
    rep.coverage = covered / count;
    rep.rejection_rate = rejected / count;
    rep.mean_ci_length = mean_of(lengths);
    rep.bias = mean_of(errors);
    rep.sd = population_sd(errors, rep.bias);
    rep.rmse = std::sqrt(rep.bias * rep.bias + rep.sd * rep.sd);
    rep.mean_err_D = mean_of(err_d);
    rep.mean_err_f2 = mean_of(err_f2);
    return rep;
}

MonteCarloResult monte_carlo(const SimConfig& config, int B, const MethodOptions& method,
                             int threads) {
    if (B < 1) fail(ErrorKind::invalid_argument, "monte_carlo: B must be at least 1");
    config.validate();
    MonteCarloResult out;
    out.records.resize(static_cast<std::size_t>(B));
    parallel_for(B, threads, [&](int r) {
        SimConfig c = config;
        c.seed = config.seed + static_cast<std::uint64_t>(r) + 1;
        out.records[static_cast<std::size_t>(r)] = run_replication(c, method);
    });
    out.report = summarize(out.records);
    if (out.report.replications == 0)
        fail(ErrorKind::non_convergence,
             "monte_carlo: all " + std::to_string(B) + " replications failed; first error: " +
                 out.records.front().error);
    return out;
}

NaiveComparison compare_naive(const SimConfig& config, int B, double contamination,
                              Contamination kind, const MethodOptions& method, int threads) {
    if (B < 1) fail(ErrorKind::invalid_argument, "compare_naive: B must be at least 1");
    config.validate();
    NaiveComparison out;
    out.pairs.resize(static_cast<std::size_t>(B));
    parallel_for(B, threads, [&](int r) {
        SimConfig c = config;
        c.seed = config.seed + static_cast<std::uint64_t>(r) + 1;
        NaivePair& pair = out.pairs[static_cast<std::size_t>(r)];
        pair.seed = c.seed;
        try {
            const Dataset data = gen_dataset(c);
            const DllOptions opt = replication_options(c, method);
            const CrossFitState state = cross_fit(data, opt);
            const KernelSpec spec = resolve_bandwidth(data, c.x0, opt);

            Eigen::VectorXd extra = data.x2 * gamma_of(c);
            if (kind == Contamination::orthogonal) {
                const double mean = extra.mean();
                const double sd = std::sqrt((extra.array() - mean).square().mean());
                std::mt19937_64 rng(derive_seed(c.seed, kContaminationStream));
                std::normal_distribution<double> normal(0.0, 1.0);
                for (Eigen::Index i = 0; i < extra.size(); ++i) extra[i] = sd * normal(rng);
            }
            const Eigen::VectorXd residuals =
                nuisance_residuals(data.y, state.f2hat + contamination * extra);

            const Eigen::VectorXd shifts = estimated_shifts(state, spec, opt);
            const DllFit fit =
                assemble(data, state, spec, shifts, residuals, opt, FitMode::estimated);
            const double naive = local_linear_slope(data.x1, residuals, spec, opt.min_window_points);
            pair.dll_error = fit.estimate - c.target();
            pair.naive_error = naive - c.target();
            pair.ok = std::isfinite(pair.dll_error) && std::isfinite(pair.naive_error);
        } catch (const std::exception& e) {
            pair.ok = false;
            pair.error = e.what();
        }
    });

    std::vector<double> dll_err, naive_err;
    int wins = 0;
    for (const auto& pr : out.pairs) {
        if (!pr.ok) {
            ++out.failures;
            continue;
        }
        dll_err.push_back(pr.dll_error);
        naive_err.push_back(pr.naive_error);
        if (std::abs(pr.dll_error) < std::abs(pr.naive_error)) ++wins;
    }
    out.replications = static_cast<int>(dll_err.size());
    if (out.replications == 0)
        fail(ErrorKind::non_convergence, "compare_naive: all replications failed; first error: " +
                                             out.pairs.front().error);
    out.dll_bias = mean_of(dll_err);
    out.dll_sd = population_sd(dll_err, out.dll_bias);
    out.naive_bias = mean_of(naive_err);
    out.naive_sd = population_sd(naive_err, out.naive_bias);
    out.win_rate = static_cast<double>(wins) / out.replications;
    return out;
}

std::vector<std::string> reference_names() {
    return {"quick", "lowdim", "highdim", "highdim_ar1", "univariate", "naive"};
}

ReferenceCase reference_case(const std::string& name) {
    ReferenceCase rc;
    rc.name = name;
    SimConfig& c = rc.config;
    c.f1 = {FunctionId::sine, 1.0, 1.0};
    c.x0 = 0.0;
    c.sigma2_true = 1.0;
    if (name == "quick") {
        rc.description = "small low-dimensional smoke test";
        c.n = 200;
        c.p = 3;
        c.gamma_true = Eigen::Vector3d(0.5, 0.0, 0.0);
        c.nuisance = {{0, {FunctionId::sine, 1.0, 1.0}}};
        c.sigma1_true = 0.5;
        rc.replications = 20;
    } else if (name == "lowdim") {
        rc.description = "n = 1000, p = 5, two smooth nuisance components";
        c.n = 1000;
        c.p = 5;
        c.gamma_true = Eigen::VectorXd::Zero(5);
        c.gamma_true << 0.6, 0.4, 0.0, 0.0, 0.0;
        c.nuisance = {{0, {FunctionId::sine, 1.0, 1.0}}, {2, {FunctionId::quadratic, 0.5, 1.0}}};
        c.sigma1_true = 0.5;
        rc.replications = 300;
    } else if (name == "highdim" || name == "highdim_ar1") {
        rc.description = "n = 400, p = 300, 3-sparse projection, three smooth nuisance components";
        c.n = 400;
        c.p = 300;
        if (name == "highdim_ar1") {
            c.design = DesignCov::ar1;
            c.rho = 0.5;
        }
        c.gamma_true = Eigen::VectorXd::Zero(300);
        c.gamma_true.head(3).setConstant(0.5);
        c.nuisance = {{0, {FunctionId::sine, 1.0, 1.0}},
                      {1, {FunctionId::quadratic, 0.5, 1.0}},
                      {3, {FunctionId::bump, 1.0, 1.0}}};
        c.sigma1_true = 0.5;
        rc.replications = 200;
    } else if (name == "univariate") {
        rc.description = "n = 10000, p = 0, exact shifts and known noise level";
        c.n = 10000;
        c.p = 0;
        c.sigma1_true = 0.5;
        rc.method.oracle = true;
        rc.method.known_sigma1 = true;
        rc.replications = 500;
    } else if (name == "naive") {
        rc.description = "n = 1000, p = 5, setting for the plug-in comparison";
        c.n = 1000;
        c.p = 5;
        c.gamma_true = Eigen::VectorXd::Zero(5);
        c.gamma_true << 1.0, 1.0, 1.0, 0.0, 0.0;
        c.nuisance = {{3, {FunctionId::sine, 1.0, 1.0}}};
        c.sigma1_true = 0.1;
        rc.method.dll.h = 0.4;
        rc.replications = 200;
    } else {
        fail(ErrorKind::invalid_argument, "unknown reference configuration '" + name + "'");
    }
    c.seed = 20240;
    return rc;
}

}  // namespace dll
