#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sigmak/curvature.hpp"
#include "sigmak/monitor.hpp"
#include "sigmak/solver.hpp"

namespace sigmak {

/// Flat `key = value` run configuration. Lines starting with '#' are
/// comments; values may be double-quoted. Keys:
///
///   subcommand                       check | solve | verify
///   spec.case spec.n spec.k spec.N   equation family and discretisation
///   spec.alpha spec.f                expressions in x1..xn
///   spec.t                           homotopy parameter used by `check`
///   background.ric0.(i,j)            Ric_{g0} components; all omitted means -(n-2) I
///   background.schouten0.(i,j)       A_{g0} components (case C)
///   solver.*                         Newton and continuation knobs
///   check.list check.*               monitor checks and ceilings
///   certificates.samples certificates.concavity_samples
///   verify.u_star verify.order_min verify.order_max
///   seed workers output.dir
struct RunConfig {
    std::string subcommand = "solve";

    Case kind = Case::A;
    int n = 3;
    int k = 3;
    int N = 16;
    std::string alpha = "-0.1";
    std::string f = "0.7";
    double t = 1.0;
    TensorSource ric0;
    TensorSource schouten0;

    double newton_tolerance = 1e-10;
    int newton_max_iterations = 30;
    double cone_margin_factor = 0.1;
    double armijo_factor = 0.25;
    int max_halvings = 10;
    double linear_tolerance = 1e-10;
    double dt_initial = 0.1;
    double dt_max = 0.25;
    double dt_min = 1e-6;
    int fast_iterations = 4;

    std::vector<std::string> checks = CheckConfig{}.names;
    double ceiling_sup_u = 10.0;
    double ceiling_grad_sq = 100.0;
    double ceiling_hess = 100.0;
    double growth_factor = 10.0;
    double growth_floor = 0.1;

    int property_samples = 10000;
    int concavity_samples = 10000;

    std::string u_star;
    double order_min = 1.6;
    double order_max = 2.4;

    std::uint64_t seed = 20240601;
    int workers = 0;
    std::string output_dir;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses and validates. Throws ConfigError naming the offending key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Range and consistency checks on an assembled RunConfig.
void validate_config(const RunConfig& cfg);

/// Every key in a fixed order; parse_config(echo) == cfg.
void write_config(std::ostream& os, const RunConfig& cfg);

NewtonOptions newton_options(const RunConfig& cfg);
ContinuationSchedule schedule(const RunConfig& cfg);
CheckConfig check_config(const RunConfig& cfg);

/// Samples the expressions on an N^n grid (cfg.N when points_per_axis is 0)
/// and validates the case conditions. Throws ConfigError.
ProblemSpec make_problem(const RunConfig& cfg, int points_per_axis = 0);

}  // namespace sigmak
