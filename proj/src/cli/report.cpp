#include "dll/cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "dll/error.hpp"

namespace dll::cli {
namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double get_number(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return kNaN;
    return j.at(key).get<double>();
}

std::string fmt(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_text(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

// Runs `write` against the file at `path`, or standard output.
template <class Fn>
void with_stream(const std::string& path, Fn&& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        std::cout.flush();
        if (!std::cout) fail(ErrorKind::io, "error writing to standard output");
        return;
    }
    std::ofstream out(path);
    if (!out) fail(ErrorKind::io, "cannot write " + path);
    write(out);
    out.close();
    if (!out) fail(ErrorKind::io, "error writing " + path);
}

const char* mc_header =
    "coverage,mean_ci_length,bias,sd,rmse,rejection_rate,mean_err_D,mean_err_f2,replications,"
    "failures\n";

void write_mc_summary(std::ostream& os, const MCReport& r) {
    os << mc_header << fmt(r.coverage) << ',' << fmt(r.mean_ci_length) << ',' << fmt(r.bias) << ','
       << fmt(r.sd) << ',' << fmt(r.rmse) << ',' << fmt(r.rejection_rate) << ','
       << fmt(r.mean_err_D) << ',' << fmt(r.mean_err_f2) << ',' << r.replications << ','
       << r.failures << '\n';
}

void write_mc_records(std::ostream& os, const std::vector<ReplicationRecord>& records) {
    os << "seed,ok,estimate,truth,ci_low,ci_high,variance,sigma1,covered,rejected,err_D,err_f2,"
          "error\n";
    for (const auto& r : records) {
        os << r.seed << ',' << (r.ok ? 1 : 0) << ',' << fmt(r.estimate) << ',' << fmt(r.truth)
           << ',' << fmt(r.ci_low) << ',' << fmt(r.ci_high) << ',' << fmt(r.variance) << ','
           << fmt(r.sigma1) << ',' << (r.covered ? 1 : 0) << ',' << (r.rejected ? 1 : 0) << ','
           << fmt(r.err_D) << ',' << fmt(r.err_f2) << ',' << csv_text(r.error) << '\n';
    }
}

void write_naive_summary(std::ostream& os, const NaiveComparison& r) {
    os << "dll_bias,dll_sd,naive_bias,naive_sd,win_rate,replications,failures\n"
       << fmt(r.dll_bias) << ',' << fmt(r.dll_sd) << ',' << fmt(r.naive_bias) << ','
       << fmt(r.naive_sd) << ',' << fmt(r.win_rate) << ',' << r.replications << ','
       << r.failures << '\n';
}

void write_naive_pairs(std::ostream& os, const std::vector<NaivePair>& pairs) {
    os << "seed,ok,dll_error,naive_error,error\n";
    for (const auto& p : pairs)
        os << p.seed << ',' << (p.ok ? 1 : 0) << ',' << fmt(p.dll_error) << ','
           << fmt(p.naive_error) << ',' << csv_text(p.error) << '\n';
}

}  // namespace

json to_json(const DllFit& fit) {
    const DllDiagnostics& d = fit.diagnostics;
    json diag = {
        {"err_D", d.err_D ? number(*d.err_D) : json(nullptr)},
        {"C_u", number(d.C_u)},
        {"sigma2", number(d.sigma2)},
        {"centering_shift", number(d.centering_shift)},
        {"underflow_count", d.underflow_count},
        {"clamp_count", d.clamp_count},
        {"projection_support", d.projection_support},
        {"projection_method", d.projection_method},
        {"flags", d.flags},
    };
    return {
        {"estimate", number(fit.estimate)},
        {"s_n", number(fit.s_n)},
        {"sigma1", number(fit.sigma1)},
        {"variance", number(fit.variance)},
        {"ci_low", number(fit.ci_low)},
        {"ci_high", number(fit.ci_high)},
        {"alpha", fit.alpha},
        {"reject_zero", fit.reject_zero},
        {"n_effective", fit.n_effective},
        {"mode", to_string(fit.mode)},
        {"weight_mode", to_string(fit.weight_mode)},
        {"x0", fit.x0},
        {"h", fit.h},
        {"n", fit.n},
        {"p", fit.p},
        {"diagnostics", diag},
    };
}

DllFit dll_fit_from_json(const json& j) {
    DllFit fit;
    fit.estimate = get_number(j, "estimate");
    fit.s_n = get_number(j, "s_n");
    fit.sigma1 = get_number(j, "sigma1");
    fit.variance = get_number(j, "variance");
    fit.ci_low = get_number(j, "ci_low");
    fit.ci_high = get_number(j, "ci_high");
    fit.alpha = get_number(j, "alpha");
    fit.reject_zero = j.at("reject_zero").get<bool>();
    fit.n_effective = j.at("n_effective").get<Eigen::Index>();
    fit.mode = j.at("mode").get<std::string>() == "oracle" ? FitMode::oracle : FitMode::estimated;
    const std::string wm = j.at("weight_mode").get<std::string>();
    for (WeightMode m : {WeightMode::exact_gaussian, WeightMode::linear, WeightMode::oracle_known,
                         WeightMode::general_density})
        if (wm == to_string(m)) fit.weight_mode = m;
    fit.x0 = get_number(j, "x0");
    fit.h = get_number(j, "h");
    fit.n = j.at("n").get<Eigen::Index>();
    fit.p = j.at("p").get<Eigen::Index>();
    const json& d = j.at("diagnostics");
    if (!d.at("err_D").is_null()) fit.diagnostics.err_D = d.at("err_D").get<double>();
    fit.diagnostics.C_u = get_number(d, "C_u");
    fit.diagnostics.sigma2 = get_number(d, "sigma2");
    fit.diagnostics.centering_shift = get_number(d, "centering_shift");
    fit.diagnostics.underflow_count = d.at("underflow_count").get<int>();
    fit.diagnostics.clamp_count = d.at("clamp_count").get<int>();
    fit.diagnostics.projection_support = d.at("projection_support").get<int>();
    fit.diagnostics.projection_method = d.at("projection_method").get<std::string>();
    fit.diagnostics.flags = d.at("flags").get<std::vector<std::string>>();
    return fit;
}

json to_json(const MCReport& r) {
    return {
        {"coverage", number(r.coverage)},
        {"mean_ci_length", number(r.mean_ci_length)},
        {"bias", number(r.bias)},
        {"sd", number(r.sd)},
        {"rmse", number(r.rmse)},
        {"rejection_rate", number(r.rejection_rate)},
        {"mean_err_D", number(r.mean_err_D)},
        {"mean_err_f2", number(r.mean_err_f2)},
        {"replications", r.replications},
        {"failures", r.failures},
    };
}

MCReport mc_report_from_json(const json& j) {
    MCReport r;
    r.coverage = get_number(j, "coverage");
    r.mean_ci_length = get_number(j, "mean_ci_length");
    r.bias = get_number(j, "bias");
    r.sd = get_number(j, "sd");
    r.rmse = get_number(j, "rmse");
    r.rejection_rate = get_number(j, "rejection_rate");
    r.mean_err_D = get_number(j, "mean_err_D");
    r.mean_err_f2 = get_number(j, "mean_err_f2");
    r.replications = j.at("replications").get<int>();
    r.failures = j.at("failures").get<int>();
    return r;
}

json to_json(const ReplicationRecord& r) {
    return {
        {"seed", r.seed},         {"ok", r.ok},
        {"error", r.error},       {"estimate", number(r.estimate)},
        {"truth", number(r.truth)}, {"ci_low", number(r.ci_low)},
        {"ci_high", number(r.ci_high)}, {"variance", number(r.variance)},
        {"sigma1", number(r.sigma1)}, {"covered", r.covered},
        {"rejected", r.rejected}, {"err_D", number(r.err_D)},
        {"err_f2", number(r.err_f2)},
    };
}

ReplicationRecord replication_from_json(const json& j) {
    ReplicationRecord r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.ok = j.at("ok").get<bool>();
    r.error = j.at("error").get<std::string>();
    r.estimate = get_number(j, "estimate");
    r.truth = get_number(j, "truth");
    r.ci_low = get_number(j, "ci_low");
    r.ci_high = get_number(j, "ci_high");
    r.variance = get_number(j, "variance");
    r.sigma1 = get_number(j, "sigma1");
    r.covered = j.at("covered").get<bool>();
    r.rejected = j.at("rejected").get<bool>();
    r.err_D = get_number(j, "err_D");
    r.err_f2 = get_number(j, "err_f2");
    return r;
}

json to_json(const MonteCarloResult& result) {
    json records = json::array();
    for (const auto& r : result.records) records.push_back(to_json(r));
    return {{"report", to_json(result.report)}, {"records", records}};
}

json to_json(const NaiveComparison& r) {
    json pairs = json::array();
    for (const auto& p : r.pairs)
        pairs.push_back({{"seed", p.seed},
                         {"ok", p.ok},
                         {"error", p.error},
                         {"dll_error", number(p.dll_error)},
                         {"naive_error", number(p.naive_error)}});
    return {{"dll_bias", number(r.dll_bias)},
            {"dll_sd", number(r.dll_sd)},
            {"naive_bias", number(r.naive_bias)},
            {"naive_sd", number(r.naive_sd)},
            {"win_rate", number(r.win_rate)},
            {"replications", r.replications},
            {"failures", r.failures},
            {"pairs", pairs}};
}

std::string summary_path(const std::string& path) {
    const std::size_t slash = path.find_last_of('/');
    const std::size_t dot = path.find_last_of('.');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    return (has_ext ? path.substr(0, dot) : path) + ".summary.csv";
}

void emit_report(const DllFit& fit, const std::string& path, ReportFormat format) {
    with_stream(path, [&](std::ostream& os) {
        if (format == ReportFormat::json) {
            os << to_json(fit).dump(2) << '\n';
            return;
        }
        const DllDiagnostics& d = fit.diagnostics;
        std::string flags;
        for (const auto& f : d.flags) flags += (flags.empty() ? "" : ";") + f;
        os << "estimate,s_n,sigma1,variance,ci_low,ci_high,alpha,reject_zero,n_effective,mode,"
              "weight_mode,x0,h,n,p,err_D,C_u,sigma2,centering_shift,underflow_count,clamp_count,"
              "projection_support,projection_method,flags\n";
        os << fmt(fit.estimate) << ',' << fmt(fit.s_n) << ',' << fmt(fit.sigma1) << ','
           << fmt(fit.variance) << ',' << fmt(fit.ci_low) << ',' << fmt(fit.ci_high) << ','
           << fmt(fit.alpha) << ',' << (fit.reject_zero ? 1 : 0) << ',' << fit.n_effective << ','
           << to_string(fit.mode) << ',' << to_string(fit.weight_mode) << ',' << fmt(fit.x0) << ','
           << fmt(fit.h) << ',' << fit.n << ',' << fit.p << ','
           << (d.err_D ? fmt(*d.err_D) : std::string("nan")) << ',' << fmt(d.C_u) << ','
           << fmt(d.sigma2) << ',' << fmt(d.centering_shift) << ',' << d.underflow_count << ','
           << d.clamp_count << ',' << d.projection_support << ',' << d.projection_method << ','
           << csv_text(flags) << '\n';
    });
}

void emit_report(const MonteCarloResult& result, const std::string& path, ReportFormat format) {
    if (format == ReportFormat::json) {
        with_stream(path, [&](std::ostream& os) { os << to_json(result).dump(2) << '\n'; });
        return;
    }
    const bool to_stdout = path.empty() || path == "-";
    with_stream(path, [&](std::ostream& os) {
        write_mc_records(os, result.records);
        if (to_stdout) {
            os << '\n';
            write_mc_summary(os, result.report);
        }
    });
    if (!to_stdout)
        with_stream(summary_path(path), [&](std::ostream& os) { write_mc_summary(os, result.report); });
}

void emit_report(const NaiveComparison& result, const std::string& path, ReportFormat format) {
    if (format == ReportFormat::json) {
        with_stream(path, [&](std::ostream& os) { os << to_json(result).dump(2) << '\n'; });
        return;
    }
    const bool to_stdout = path.empty() || path == "-";
    with_stream(path, [&](std::ostream& os) {
        write_naive_pairs(os, result.pairs);
        if (to_stdout) {
            os << '\n';
            write_naive_summary(os, result);
        }
    });
    if (!to_stdout)
        with_stream(summary_path(path), [&](std::ostream& os) { write_naive_summary(os, result); });
}

}  // namespace dll::cli
