#include "dll/cli/commands.hpp"

#include <json.hpp>

#include <fstream>
#include <iostream>

#include "dll/cli/csv.hpp"
#include "dll/cli/report.hpp"
#include "dll/error.hpp"
#include "dll/estimator.hpp"
#include "dll/simulate.hpp"

namespace dll::cli {
namespace {

void run_fit(const RunConfig& c) {
    const Dataset data = load_csv(c.input);
    const DllFit fit = dll_pipeline(data, *c.x0, to_dll_options(c));
    emit_report(fit, c.output, c.format);
}

ReferenceCase configured_case(const RunConfig& c) {
    ReferenceCase rc = reference_case(c.reference);
    if (c.n) rc.config.n = *c.n;
    if (c.seed) rc.config.seed = *c.seed;
    if (c.replications) rc.replications = *c.replications;
    return rc;
}

void run_simulate(const RunConfig& c) {
    const ReferenceCase rc = configured_case(c);
    write_csv(c.output, gen_dataset(rc.config));
}

void run_coverage(const RunConfig& c) {
    ReferenceCase rc = configured_case(c);
    MethodOptions method = rc.method;
    const std::optional<double> preset_h = method.dll.h;
    method.dll = to_dll_options(c);
    if (!method.dll.h) method.dll.h = preset_h;
    method.oracle = method.oracle || c.oracle;

    if (c.compare_naive) {
        const NaiveComparison result =
            compare_naive(rc.config, rc.replications, c.contamination,
                          c.orthogonal ? Contamination::orthogonal : Contamination::correlated,
                          method, c.threads);
        emit_report(result, c.output, c.format);
        return;
    }
    const MonteCarloResult result = monte_carlo(rc.config, rc.replications, method, c.threads);
    emit_report(result, c.output, c.format);
}

void run_bandwidth(const RunConfig& c) {
    const Dataset data = load_csv(c.input);
    data.validate();
    const double x0 = *c.x0;
    nlohmann::json j;
    j["x0"] = x0;
    j["n"] = data.n();
    j["p"] = data.p();
    const double density = kde_density_at(data.x1, x0);
    j["density"] = density;
    double h;
    if (c.h) {
        h = *c.h;
    } else {
        h = bandwidth_default(data.x1, x0, c.bandwidth_c);
        j["bandwidth_c"] = c.bandwidth_c;
    }
    j["h"] = h;
    const KernelSpec spec(x0, h);
    j["n_effective"] = effective_sample_size(data.x1, spec);

    if (data.p() > 0) {
        const bool low_dim = data.n() / 2 >= 10 * (data.p() + 1);
        ScaledLassoOptions so;
        so.A = c.lasso_A;
        const ProjectionFit proj =
            low_dim ? ols_projection(data.x2, data.x1) : scaled_lasso(data.x2, data.x1, so);
        j["projection_method"] = to_string(proj.method);
        j["sigma2"] = proj.sigma2;
        j["C_u"] = growth_constant(spec, proj.gamma, proj.sigma2, data.n());
    } else {
        const double mean = data.x1.mean();
        const double sd = std::sqrt((data.x1.array() - mean).square().sum() /
                                    static_cast<double>(std::max<Eigen::Index>(data.n() - 1, 1)));
        j["projection_method"] = "none";
        j["sigma2"] = sd;
        j["C_u"] = growth_constant(spec, Eigen::VectorXd(), sd > 0.0 ? sd : 1.0, data.n());
    }

    const std::string text = j.dump(2) + "\n";
    if (c.output.empty() || c.output == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(c.output);
    if (!out || !(out << text)) fail(ErrorKind::io, "cannot write " + c.output);
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument: return kUsage;
        case ErrorKind::insufficient_data:
        case ErrorKind::data:
        case ErrorKind::io: return kDataError;
        case ErrorKind::singular:
        case ErrorKind::non_convergence: return kNumericalError;
    }
    return kNumericalError;
}

}  // namespace

void run_command(const RunConfig& config) {
    switch (config.subcommand) {
        case Subcommand::fit: run_fit(config); break;
        case Subcommand::simulate: run_simulate(config); break;
        case Subcommand::coverage: run_coverage(config); break;
        case Subcommand::bandwidth: run_bandwidth(config); break;
    }
}

int run_cli(int argc, const char* const* argv) {
    RunConfig config;
    try {
        config = parse_args(argc, argv);
    } catch (const UsageError& e) {
        (e.exit_code() == 0 ? std::cout : std::cerr) << e.what() << '\n';
        return e.exit_code();
    }
    try {
        run_command(config);
    } catch (const Error& e) {
        std::cerr << "dll: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "dll: unexpected failure: " << e.what() << '\n';
        return kNumericalError;
    }
    return kSuccess;
}

}  // namespace dll::cli
