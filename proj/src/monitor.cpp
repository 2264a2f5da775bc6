#include "sigmak/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace sigmak {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string node_label(const Grid& g, std::size_t node) {
    const auto idx = g.unflatten(node);
    std::string s = "node " + std::to_string(node) + " (";
    for (int a = 0; a < g.n(); ++a) {
        if (a) s += ",";
        s += std::to_string(idx[static_cast<std::size_t>(a)]);
    }
    return s + ")";
}

CheckRow bounded(const std::string& name, const ContinuationTrace& trace, double ceiling,
                 double MonitorRecord::*field) {
    double worst = 0.0;
    for (const TraceEntry& e : trace.steps) worst = std::max(worst, e.monitors.*field);
    CheckRow r{name, worst <= ceiling ? CheckStatus::Pass : CheckStatus::Fail, worst, ceiling, "max over trace"};
    return r;
}

}  // namespace

const char* status_name(CheckStatus s) noexcept {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Info: return "info";
    }
    return "?";
}

bool VerificationReport::all_pass() const noexcept {
    return std::none_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.status == CheckStatus::Fail; });
}

std::string describe_spec(const ProblemSpec& spec) {
    std::ostringstream os;
    os << "case=" << case_letter(spec.kind) << " n=" << spec.n << " k=" << spec.k
       << " N=" << spec.grid.points_per_axis() << " conformal_factor=exp(" << (conformal_sign(spec.kind) > 0 ? "" : "-")
       << "2u) alpha=\"" << spec.alpha_source << "\" f=\"" << spec.f_source << "\"";
    return os.str();
}

VerificationReport run_checks(const ContinuationTrace& trace, const ProblemSpec& spec, const CheckConfig& checks,
                              const std::string& run_id) {
    VerificationReport rep;
    rep.run_id = run_id;
    rep.spec_echo = describe_spec(spec);
    rep.steps = trace.steps.size();
    rep.final_t = trace.final_t;
    rep.trace_success = trace.success;

    const Grid& g = spec.grid;
    const bool have_field = trace.final_u.size() == g.size() && g.size() > 0;

    for (const std::string& name : checks.names) {
        CheckRow row;
        row.name = name;
        if (name == "bounded_sup_u") {
            row = bounded(name, trace, checks.ceiling_sup_u, &MonitorRecord::sup_u);
        } else if (name == "bounded_grad_sq") {
            row = bounded(name, trace, checks.ceiling_grad_sq, &MonitorRecord::sup_grad_u_sq);
        } else if (name == "bounded_hess") {
            row = bounded(name, trace, checks.ceiling_hess, &MonitorRecord::sup_hess_u);
        } else if (name == "monitor_growth") {
            double worst = 0.0;
            for (std::size_t i = 1; i < trace.steps.size(); ++i) {
                const MonitorRecord& a = trace.steps[i - 1].monitors;
                const MonitorRecord& b = trace.steps[i].monitors;
                for (auto field : {&MonitorRecord::sup_u, &MonitorRecord::sup_grad_u_sq, &MonitorRecord::sup_hess_u}) {
                    if (b.*field < checks.growth_floor) continue;
                    worst = std::max(worst, b.*field / std::max(a.*field, checks.growth_floor));
                }
            }
            row.value = worst;
            row.tolerance = checks.growth_factor;
            row.status = worst <= checks.growth_factor ? CheckStatus::Pass : CheckStatus::Fail;
            row.detail = "largest step-to-step monitor ratio";
        } else if (name == "cone_margin") {
            double worst = std::numeric_limits<double>::infinity();
            for (const TraceEntry& e : trace.steps) worst = std::min(worst, e.cone_margin);
            row.tolerance = 0.0;
            if (have_field) {
                const ConeAudit audit = cone_audit(trace.final_u, trace.final_t, spec);
                worst = std::min(worst, audit.margin);
                row.detail = "worst final " + node_label(g, audit.worst_node) + " margin " + fmt(audit.margin);
                if (!(audit.margin > 0.0)) row.detail = "final field leaves Gamma_" +
                                                        std::to_string(spec.cone_order()) + " at " +
                                                        node_label(g, audit.worst_node);
            }
            row.value = worst;
            row.status = worst > 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
        } else if (name == "ellipticity") {
            if (!have_field) {
                row.status = CheckStatus::Fail;
                row.detail = "no final field";
            } else {
                const EllipticityReport e = ellipticity_certificate(trace.final_u, trace.final_t, spec);
                row.value = e.min_eigenvalue;
                row.tolerance = 0.0;
                row.status = e.pass ? CheckStatus::Pass : CheckStatus::Fail;
                row.detail = "min trace " + fmt(e.min_trace) + " vs bound " + fmt(e.trace_bound) +
                             ", operator min eigenvalue " + fmt(e.min_operator_eigenvalue);
                if (!e.failing_nodes.empty()) {
                    row.detail += ", failing " + std::to_string(e.failing_nodes.size()) + " nodes, first " +
                                  node_label(g, e.failing_nodes.front());
                }
            }
        } else if (name == "c0_diagnostic") {
            row.status = CheckStatus::Info;
            if (have_field) {
                const C0Report c = c0_diagnostic(trace.final_u, trace.final_t, spec);
                row.value = std::max(c.slack_at_max, c.slack_at_min);
                row.tolerance = c.h;
                row.detail = c.applicable ? "u in [" + fmt(c.u_min) + ", " + fmt(c.u_max) + "], comparison bounds [" +
                                                fmt(c.lower_bound) + ", " + fmt(c.upper_bound) + "]"
                                          : c.note;
            }
        } else if (name == "path_complete") {
            row.value = trace.final_t;
            row.tolerance = 1.0;
            row.status = trace.success && trace.final_t == 1.0 ? CheckStatus::Pass : CheckStatus::Fail;
            row.detail = trace.success ? "reached t = 1" : "stopped: " + trace.failure;
        } else if (name == "background") {
            const bool schouten = spec.kind == Case::C;
            row.value = schouten ? spec.background.schouten_margin : spec.background.ric_margin;
            row.status = row.value > 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
            row.detail = schouten ? "schouten0 in Gamma_{k-1}" : "-ric0/(n-2) in Gamma_k";
        } else {
            throw ConfigError("unknown check '" + name + "'");
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

void write_report_text(std::ostream& os, const VerificationReport& r) {
    os << "run: " << r.run_id << '\n';
    os << "spec: " << r.spec_echo << '\n';
    os << "trace: steps=" << r.steps << " final_t=" << fmt(r.final_t) << " success=" << (r.trace_success ? "yes" : "no")
       << '\n';
    for (const CheckRow& row : r.rows) {
        os << row.name << ": " << status_name(row.status) << " value=" << fmt(row.value)
           << " tolerance=" << fmt(row.tolerance);
        if (!row.detail.empty()) os << " (" << row.detail << ')';
        os << '\n';
    }
    os << "overall: " << (r.all_pass() ? "pass" : "fail") << '\n';
}

void write_report_json(std::ostream& os, const VerificationReport& r) {
    nlohmann::ordered_json j;
    j["run_id"] = r.run_id;
    j["spec"] = r.spec_echo;
    j["trace"] = {{"steps", r.steps}, {"final_t", r.final_t}, {"success", r.trace_success}};
    auto& checks = j["checks"] = nlohmann::ordered_json::array();
    for (const CheckRow& row : r.rows) {
        checks.push_back({{"name", row.name},
                          {"status", status_name(row.status)},
                          {"value", std::isfinite(row.value) ? nlohmann::ordered_json(row.value) : nlohmann::ordered_json(fmt(row.value))},
                          {"tolerance", row.tolerance},
                          {"detail", row.detail}});
    }
    os << j.dump(2) << '\n';
}

}  // namespace sigmak
