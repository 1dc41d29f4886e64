#include "dll/cli/args.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dll/error.hpp"
#include "dll/normal.hpp"
#include "dll/simulate.hpp"

namespace dll::cli {
namespace {

void add_model_options(CLI::App& sub, RunConfig& c) {
    sub.add_option("--h", c.h, "bandwidth; default c (n pi(x0))^(-1/5)")
        ->check(CLI::PositiveNumber);
    sub.add_option("--alpha", c.alpha, "significance level")->check(CLI::Range(0.0, 1.0));
    sub.add_option("--mode", c.mode, "weight construction")
        ->check(CLI::IsMember({"linear", "exact_gaussian", "general_density"}));
    sub.add_option("--error-density", c.error_density, "projection error law for general_density")
        ->check(CLI::IsMember({"normal", "laplace", "logistic"}));
    sub.add_option("--projection", c.projection, "projection estimator")
        ->check(CLI::IsMember({"auto", "ols", "scaled_lasso"}));
    sub.add_option("--seed", c.seed, "seed for the fold split");
    sub.add_option("--bandwidth-c", c.bandwidth_c, "bandwidth constant c")
        ->check(CLI::PositiveNumber);
    sub.add_option("--c-rho", c.c_rho, "smoothness penalty constant")->check(CLI::NonNegativeNumber);
    sub.add_option("--c-lambda", c.c_lambda, "sparsity penalty constant")
        ->check(CLI::NonNegativeNumber);
    sub.add_option("--A", c.lasso_A, "scaled Lasso constant, > 1");
    sub.add_option("--knots", c.knots, "interior knots per coordinate; default ceil(n^(1/5)) + 2");
    sub.add_flag("--intercept", c.intercept, "fit the projection with an intercept");
    sub.add_flag("--sigma2-per-fold", c.sigma2_per_fold,
                 "use the other fold's projection scale instead of the whole-data one");
    sub.add_flag("--ci-literal", c.ci_literal, "interval half-width z * V instead of z * sqrt(V)");
    sub.add_option("--sigma1", c.sigma1, "known noise level")->check(CLI::PositiveNumber);
    sub.add_option("--min-window", c.min_window, "minimum observations in the kernel window")
        ->check(CLI::PositiveNumber);
}

void add_output_options(CLI::App& sub, RunConfig& c) {
    sub.add_option("--output,-o", c.output, "output path; standard output when omitted");
    sub.add_option("--format", c.format, "report format")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, ReportFormat>{{"json", ReportFormat::json},
                                                {"csv", ReportFormat::csv}}));
}

// Turns a JSON config object into flag tokens.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path, 2);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw UsageError("config file " + path + " is not valid JSON: " + e.what(), 2);
    }
    if (!j.is_object()) throw UsageError("config file " + path + " must hold a JSON object", 2);
    std::vector<std::string> tokens;
    for (const auto& [key, value] : j.items()) {
        std::string flag = key;
        for (char& ch : flag)
            if (ch == '_') ch = '-';
        flag = "--" + flag;
        if (value.is_boolean()) {
            if (value.get<bool>()) tokens.push_back(flag);
        } else if (value.is_number_integer()) {
            tokens.push_back(flag);
            tokens.push_back(std::to_string(value.get<long long>()));
        } else if (value.is_number()) {
            std::ostringstream os;
            os.precision(17);
            os << value.get<double>();
            tokens.push_back(flag);
            tokens.push_back(os.str());
        } else if (value.is_string()) {
            tokens.push_back(flag);
            tokens.push_back(value.get<std::string>());
        } else {
            throw UsageError("config key '" + key + "' must be a scalar", 2);
        }
    }
    return tokens;
}

}  // namespace

RunConfig parse_args(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return parse_args(args);
}

RunConfig parse_args(const std::vector<std::string>& raw) {
    // Config file values go in front of the explicit flags; with take-last
    // semantics the explicit flags then win.
    std::vector<std::string> args;
    std::string config_path;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == "--config") {
            if (i + 1 >= raw.size()) throw UsageError("--config needs a path", 2);
            config_path = raw[++i];
        } else if (raw[i].rfind("--config=", 0) == 0) {
            config_path = raw[i].substr(9);
        } else {
            args.push_back(raw[i]);
        }
    }
    if (!config_path.empty() && !args.empty()) {
        const std::vector<std::string> tokens = config_tokens(config_path);
        args.insert(args.begin() + 1, tokens.begin(), tokens.end());
    }

    RunConfig c;
    CLI::App app{"Decorrelated local linear derivative estimation", "dll"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1, 1);
    app.set_help_flag("--help", "print this help and exit");
    app.set_help_all_flag("--help-all", "show help for every subcommand");
    app.footer("Any option may also come from --config file.json; explicit flags take precedence.\n"
               "Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.");

    CLI::App* fit = app.add_subcommand("fit", "estimate f1'(x0) from a CSV file");
    fit->add_option("--input,-i", c.input, "CSV with header y,x1,x2_1,...")->required();
    fit->add_option("--x0", c.x0, "evaluation point")->required();
    add_model_options(*fit, c);
    add_output_options(*fit, c);

    CLI::App* sim = app.add_subcommand("simulate", "write a simulated dataset as CSV");
    sim->add_option("--reference", c.reference, "reference configuration")
        ->check(CLI::IsMember(reference_names()));
    sim->add_option("--n", c.n, "sample size override")->check(CLI::PositiveNumber);
    sim->add_option("--seed", c.seed, "data seed");
    sim->add_option("--output,-o", c.output, "output path; standard output when omitted");

    CLI::App* cov = app.add_subcommand("coverage", "Monte Carlo study of a reference configuration");
    cov->add_option("--reference", c.reference, "reference configuration")
        ->check(CLI::IsMember(reference_names()));
    cov->add_option("--replications,-B", c.replications, "number of replications")
        ->check(CLI::PositiveNumber);
    cov->add_option("--n", c.n, "sample size override")->check(CLI::PositiveNumber);
    cov->add_flag("--oracle", c.oracle, "exact shifts from the true projection");
    cov->add_option("--threads", c.threads, "worker threads; default DLL_THREADS or all cores")
        ->check(CLI::NonNegativeNumber);
    cov->add_flag("--compare-naive", c.compare_naive, "paired comparison with the plug-in slope");
    cov->add_flag("--orthogonal", c.orthogonal, "contaminate with independent noise instead");
    cov->add_option("--contamination", c.contamination, "contamination scale c");
    add_model_options(*cov, c);
    add_output_options(*cov, c);

    CLI::App* bw = app.add_subcommand("bandwidth", "bandwidth and window diagnostics");
    bw->add_option("--input,-i", c.input, "CSV with header y,x1,x2_1,...")->required();
    bw->add_option("--x0", c.x0, "evaluation point")->required();
    bw->add_option("--bandwidth-c", c.bandwidth_c, "bandwidth constant c")
        ->check(CLI::PositiveNumber);
    bw->add_option("--h", c.h, "explicit bandwidth")->check(CLI::PositiveNumber);
    bw->add_option("--A", c.lasso_A, "scaled Lasso constant, > 1");
    bw->add_option("--output,-o", c.output, "output path; standard output when omitted");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw UsageError(app.help(), 0);
    } catch (const CLI::CallForAllHelp&) {
        throw UsageError(app.help("", CLI::AppFormatMode::All), 0);
    } catch (const CLI::ParseError& e) {
        std::string text = e.what();
        const CLI::App* failing = &app;
        for (const CLI::App* sub : app.get_subcommands()) failing = sub;
        throw UsageError(text + "\n\n" + failing->help(), 2);
    }

    if (fit->parsed()) c.subcommand = Subcommand::fit;
    else if (sim->parsed()) c.subcommand = Subcommand::simulate;
    else if (cov->parsed()) c.subcommand = Subcommand::coverage;
    else c.subcommand = Subcommand::bandwidth;

    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)", 2);
    if (!(c.lasso_A > 1.0)) throw UsageError("--A must exceed 1", 2);
    if (c.x0 && !std::isfinite(*c.x0)) throw UsageError("--x0 must be finite", 2);
    if (c.orthogonal && !c.compare_naive)
        throw UsageError("--orthogonal only applies with --compare-naive", 2);
    if (c.compare_naive && c.oracle)
        throw UsageError("--compare-naive and --oracle cannot be combined", 2);
    return c;
}

DllOptions to_dll_options(const RunConfig& c) {
    DllOptions o;
    o.alpha = c.alpha;
    o.h = c.h;
    o.bandwidth_c = c.bandwidth_c;
    if (c.mode == "exact_gaussian") o.weight_mode = WeightMode::exact_gaussian;
    else if (c.mode == "general_density") o.weight_mode = WeightMode::general_density;
    else o.weight_mode = WeightMode::linear;
    if (c.projection == "ols") o.projection = ProjectionChoice::ols;
    else if (c.projection == "scaled_lasso") o.projection = ProjectionChoice::scaled_lasso;
    o.lasso_A = c.lasso_A;
    o.projection_intercept = c.intercept;
    o.sigma2_pooled = !c.sigma2_per_fold;
    o.c_rho = c.c_rho;
    o.c_lambda = c.c_lambda;
    o.additive.num_interior_knots = c.knots;
    o.sigma1_known = c.sigma1;
    o.min_window_points = static_cast<std::size_t>(c.min_window);
    o.seed = c.seed.value_or(0);
    o.ci_literal = c.ci_literal;
    if (o.weight_mode == WeightMode::general_density) {
        // unit-variance versions of each law
        if (c.error_density == "laplace") {
            const double b = 1.0 / std::sqrt(2.0);
            o.error_density = [b](double t) { return std::exp(-std::abs(t) / b) / (2.0 * b); };
        } else if (c.error_density == "logistic") {
            const double s = std::sqrt(3.0) / std::numbers::pi;
            o.error_density = [s](double t) {
                const double e = std::exp(-std::abs(t) / s);
                return e / (s * (1.0 + e) * (1.0 + e));
            };
        } else {
            o.error_density = [](double t) { return normal_pdf(t); };
        }
    }
    return o;
}

}  // namespace dll::cli
