#include "sfde/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sfde/errors.hpp"

namespace sfde {

namespace {

ordered_json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

ordered_json config_to_json(const ConfigMap& config) {
    ordered_json j = ordered_json::object();
    for (const auto& [section, entries] : config) {
        ordered_json sec = ordered_json::object();
        for (const auto& [key, value] : entries) sec[key] = value;
        j[section] = sec;
    }
    return j;
}

ordered_json study_result_to_json(const StudyResult& result) {
    ordered_json per_n = ordered_json::array();
    for (const StudyPerN& row : result.per_n) {
        ordered_json r;
        r["n"] = row.n;
        r["q_norm"] = row.q_norm;
        r["ci_lo"] = row.ci_lo;
        r["ci_hi"] = row.ci_hi;
        r["aborted"] = row.aborted;
        r["log_bound"] = finite_or_null(row.log_bound);
        if (!std::isnan(row.proxy_q_norm)) r["proxy_q_norm"] = row.proxy_q_norm;
        per_n.push_back(r);
    }
    ordered_json j;
    j["per_n"] = per_n;
    if (result.fit) {
        ordered_json f;
        f["slope"] = result.fit->slope;
        f["intercept"] = result.fit->intercept;
        f["slope_stderr"] = result.fit->slope_stderr;
        f["r_squared"] = result.fit->r_squared;
        f["rate"] = result.fit->rate();
        j["fit"] = f;
    } else {
        j["fit"] = nullptr;
    }
    j["degenerate_errors"] = result.degenerate_errors;
    return j;
}

std::string study_result_to_csv(const StudyResult& result) {
    const bool with_proxy =
        !result.per_n.empty() && !std::isnan(result.per_n.front().proxy_q_norm);
    std::string out = "n,q_norm,ci_lo,ci_hi,aborted,log_bound";
    if (with_proxy) out += ",proxy_q_norm";
    out += '\n';
    for (const StudyPerN& row : result.per_n) {
        out += std::to_string(row.n);
        out += ',' + format_double(row.q_norm);
        out += ',' + format_double(row.ci_lo);
        out += ',' + format_double(row.ci_hi);
        out += ',' + std::to_string(row.aborted);
        out += ',' + (std::isfinite(row.log_bound) ? format_double(row.log_bound)
                                                   : std::string("nan"));
        if (with_proxy) out += ',' + format_double(row.proxy_q_norm);
        out += '\n';
    }
    return out;
}

ordered_json moment_estimate_to_json(const MomentEstimate& est) {
    ordered_json j;
    j["estimate"] = est.estimate;
    j["stderr"] = est.stderr_;
    j["log_bound"] = est.log_bound;
    j["log_margin"] = est.log_margin;
    j["aborted"] = est.aborted;
    return j;
}

ordered_json modulus_estimate_to_json(const ModulusEstimate& est) {
    ordered_json j;
    j["q_norm"] = est.q_norm;
    j["stderr"] = est.stderr_;
    j["single_window"] = {{"log_bound", est.log_increment_bound},
                          {"log_margin", est.margin_increment},
                          {"comparison", "indicative"}};
    j["chained"] = {{"log_bound", est.log_chained_bound},
                    {"log_margin", est.margin_chained},
                    {"comparison", "whole-horizon"}};
    j["aborted"] = est.aborted;
    return j;
}

ordered_json gronwall_report_to_json(const GronwallCheckReport& report) {
    ordered_json j;
    j["scenario"] = report.scenario;
    j["lhs_log"] = report.lhs_log;
    j["rhs_log"] = report.rhs_log;
    j["margin"] = report.margin;
    j["holds"] = report.holds;
    return j;
}

ordered_json validation_report_to_json(const ValidationReport& report) {
    ordered_json violations = ordered_json::array();
    for (const AssumptionViolation& v : report.violations) {
        ordered_json o;
        o["sample"] = v.sample;
        o["condition"] = v.condition;
        o["t"] = v.t;
        o["lhs"] = v.lhs;
        o["rhs"] = v.rhs;
        o["margin"] = v.rhs - v.lhs;
        violations.push_back(o);
    }
    ordered_json j;
    j["checks"] = report.checks;
    j["violations"] = violations;
    j["clean"] = report.clean();
    return j;
}

std::string trajectory_to_csv(const Trajectory& trajectory) {
    std::ostringstream os;
    std::string header = "t";
    for (int j = 1; j <= trajectory.dim; ++j) header += ",y_" + std::to_string(j);
    os << header << '\n';
    const auto& path = trajectory.interpolant;
    for (std::size_t i = 0; i < path.knot_count(); ++i) {
        os << format_double(path.knots()[i]);
        for (int j = 0; j < trajectory.dim; ++j) {
            os << ',' << format_double(path.values()[i * trajectory.dim + j]);
        }
        os << '\n';
    }
    return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open " + tmp.string() + " for writing");
        os << content;
        if (!os.flush()) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace sfde
