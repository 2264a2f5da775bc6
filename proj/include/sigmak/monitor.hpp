#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sigmak/solver.hpp"

namespace sigmak {

enum class CheckStatus { Pass, Fail, Info };
const char* status_name(CheckStatus s) noexcept;

/// Known check names:
///   bounded_sup_u, bounded_grad_sq, bounded_hess  max monitor along the trace vs ceiling
///   monitor_growth                                 step-to-step growth of the monitors <= factor
///   cone_margin                                    every accepted state and the final field admissible
///   ellipticity                                    ellipticity certificate at the final field
///   c0_diagnostic                                  max-principle comparison at the extrema (info)
///   path_complete                                  trace reached t = 1
///   background                                     -Ric0/(n-2) in Gamma_k (A/B) or A0 in Gamma_{k-1} (C)
struct CheckConfig {
    std::vector<std::string> names = {"path_complete", "bounded_sup_u", "bounded_grad_sq", "bounded_hess",
                                      "monitor_growth", "cone_margin", "ellipticity", "c0_diagnostic",
                                      "background"};
    double ceiling_sup_u = 10.0;
    double ceiling_grad_sq = 100.0;
    double ceiling_hess = 100.0;
    double growth_factor = 10.0;
    /// Growth is measured against max(previous, floor), so values that start
    /// from zero are not flagged for their first move away from it.
    double growth_floor = 0.1;
};

struct CheckRow {
    std::string name;
    CheckStatus status = CheckStatus::Info;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct VerificationReport {
    std::string run_id;
    std::string spec_echo;
    std::vector<CheckRow> rows;
    std::size_t steps = 0;
    double final_t = 0.0;
    bool trace_success = false;

    bool all_pass() const noexcept;
};

/// Evaluates every configured check once, in configuration order. Throws
/// ConfigError on an unknown name. Inputs are not modified.
VerificationReport run_checks(const ContinuationTrace& trace, const ProblemSpec& spec, const CheckConfig& checks,
                              const std::string& run_id = "run");

std::string describe_spec(const ProblemSpec& spec);

void write_report_text(std::ostream& os, const VerificationReport& report);
void write_report_json(std::ostream& os, const VerificationReport& report);

}  // namespace sigmak
