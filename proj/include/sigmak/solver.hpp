#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sigmak/linear_solver.hpp"
#include "sigmak/operators.hpp"

namespace sigmak {

struct NewtonOptions {
    double tolerance = 1e-10;  // on the max-norm of the multiplied residual
    int max_iterations = 30;
    double cone_margin_factor = 0.1;  // trial margin must stay >= factor * current margin
    double armijo_factor = 0.25;      // accept s when |r_new| <= (1 - armijo * s) |r_old|
    int max_halvings = 10;            // smallest step 2^-max_halvings
    LinearSolveOptions linear;
};

struct HomotopyState {
    double t = 0.0;
    ScalarField u;
    double residual_norm = 0.0;
    double cone_margin = 0.0;
    int newton_iterations = 0;
    /// Residual max-norm at every accepted Newton iterate, starting point first.
    std::vector<double> residual_history;
};

/// Fills residual_norm and cone_margin for (u, t).
HomotopyState make_state(ScalarField u, double t, const ProblemSpec& spec);

/// Damped Newton on the multiplied residual with a backtracking line search
/// that keeps every node inside the required cone.
HomotopyState newton_correct(HomotopyState state, const ProblemSpec& spec, const NewtonOptions& options);

/// Newton on the t = 0 member of the family (cases A and B), whose unique
/// solution is u == 0.
ScalarField solve_t0(const ProblemSpec& spec, const ScalarField& u_init, const NewtonOptions& options,
                     int* iterations = nullptr);

struct MonitorRecord {
    double sup_u = 0.0;
    double sup_grad_u_sq = 0.0;
    double sup_hess_u = 0.0;        // max over nodes of the spectral radius of Hu
    double tensor_margin = 0.0;     // V (cases A/B) or W (case C)
    double u_tensor_margin = 0.0;   // U for cases A/B; equals tensor_margin for case C
    EllipticityReport ellipticity;
};

MonitorRecord monitor(const HomotopyState& state, const ProblemSpec& spec);

struct TraceEntry {
    int step = 0;
    double t = 0.0;
    int newton_iterations = 0;
    double residual_norm = 0.0;
    double cone_margin = 0.0;
    MonitorRecord monitors;
};

struct ContinuationTrace {
    std::vector<TraceEntry> steps;
    ScalarField final_u;    // field of the last accepted state
    double final_t = 0.0;   // t of the last accepted state
    bool success = false;
    std::string failure;
};

struct ContinuationSchedule {
    double dt_initial = 0.1;
    double dt_max = 0.25;
    double dt_min = 1e-6;
    int fast_iterations = 4;  // corrector iterations at or below which dt doubles
};

class PathFailure : public Error {
public:
    PathFailure(const std::string& msg, ContinuationTrace trace) : Error(msg), trace_(std::move(trace)) {}
    const ContinuationTrace& trace() const noexcept { return trace_; }

private:
    ContinuationTrace trace_;
};

/// Homotopy in t from the t = 0 solution to t = 1 (cases A and B), with a
/// zeroth-order predictor and adaptive step. Throws PathFailure carrying the
/// trace so far when dt drops below dt_min.
ContinuationTrace continue_path(const ProblemSpec& spec, const ContinuationSchedule& schedule,
                                const NewtonOptions& options);

/// Direct damped Newton for case C (no homotopy family). Experimental.
HomotopyState solve_caseC(const ProblemSpec& spec, const ScalarField& u_init, const NewtonOptions& options);

/// CSV with header step,t,newton_iters,residual_norm,cone_margin,sup_u,sup_grad_u_sq,sup_hess_u.
void write_trace_csv(std::ostream& os, const ContinuationTrace& trace);

}  // namespace sigmak
