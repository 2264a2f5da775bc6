#include "sigmak/solver.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "sigmak/parallel.hpp"

namespace sigmak {

namespace {

struct Evaluation {
    ScalarField residual;
    double norm = 0.0;
    double margin = 0.0;
};

Evaluation evaluate(const ScalarField& u, double t, const ProblemSpec& spec) {
    const Grid& g = u.grid();
    Evaluation ev{ScalarField(g), 0.0, 0.0};
    std::vector<double> margins(g.size());
    parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            const PointEval pe = evaluate_point(spec, u, t, p);
            ev.residual[p] = pe.multiplied;
            margins[p] = pe.cone_margin;
        }
    });
    ev.margin = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < g.size(); ++p) {
        const double r = std::fabs(ev.residual[p]);
        if (!(r <= ev.norm)) ev.norm = std::isnan(r) ? std::numeric_limits<double>::infinity() : std::max(ev.norm, r);
        if (!(margins[p] >= ev.margin)) ev.margin = std::isnan(margins[p]) ? -1.0 : margins[p];
    }
    return ev;
}

}  // namespace

HomotopyState make_state(ScalarField u, double t, const ProblemSpec& spec) {
    HomotopyState s;
    s.t = t;
    const Evaluation ev = evaluate(u, t, spec);
    s.u = std::move(u);
    s.residual_norm = ev.norm;
    s.cone_margin = ev.margin;
    return s;
}

HomotopyState newton_correct(HomotopyState state, const ProblemSpec& spec, const NewtonOptions& options) {
    if (!(options.tolerance > 0.0)) throw DomainError("newton tolerance must be positive");
    Evaluation ev = evaluate(state.u, state.t, spec);
    state.residual_norm = ev.norm;
    state.cone_margin = ev.margin;
    state.newton_iterations = 0;
    state.residual_history.assign(1, ev.norm);
    if (!(ev.margin > 0.0)) {
        throw ConeExitError("starting state outside Gamma_" + std::to_string(spec.cone_order()) + " at t = " +
                            std::to_string(state.t));
    }

    const Grid& g = state.u.grid();
    while (state.residual_norm > options.tolerance) {
        if (state.newton_iterations >= options.max_iterations) {
            throw ConvergenceError("newton: no convergence after " + std::to_string(options.max_iterations) +
                                   " iterations (residual " + std::to_string(state.residual_norm) + ")");
        }
        const LinearOperator L = linearize(state.u, state.t, spec);
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(g.size()));
        for (std::size_t p = 0; p < g.size(); ++p) rhs[static_cast<Eigen::Index>(p)] = -ev.residual[p];
        const Eigen::VectorXd delta = solve_linear(L.to_sparse(), rhs, options.linear);

        bool accepted = false;
        double s = 1.0;
        for (int halving = 0; halving <= options.max_halvings; ++halving, s *= 0.5) {
            ScalarField trial = state.u;
            for (std::size_t p = 0; p < g.size(); ++p) trial[p] += s * delta[static_cast<Eigen::Index>(p)];
            Evaluation tev = evaluate(trial, state.t, spec);
            const bool cone_ok = tev.margin > 0.0 && tev.margin >= options.cone_margin_factor * state.cone_margin;
            const bool decrease = tev.norm <= (1.0 - options.armijo_factor * s) * state.residual_norm;
            if (cone_ok && decrease) {
                state.u = std::move(trial);
                ev = std::move(tev);
                state.residual_norm = ev.norm;
                state.cone_margin = ev.margin;
                state.residual_history.push_back(ev.norm);
                accepted = true;
                break;
            }
        }
        ++state.newton_iterations;
        if (!accepted) {
            throw ConeExitError("line search found no admissible step at t = " + std::to_string(state.t) +
                                " (residual " + std::to_string(state.residual_norm) + ")");
        }
    }
    return state;
}

ScalarField solve_t0(const ProblemSpec& spec, const ScalarField& u_init, const NewtonOptions& options,
                     int* iterations) {
    if (spec.kind == Case::C) throw DomainError("solve_t0: case C has no homotopy family");
    HomotopyState s;
    s.t = 0.0;
    s.u = u_init;
    s = newton_correct(std::move(s), spec, options);
    if (iterations) *iterations = s.newton_iterations;
    return s.u;
}

MonitorRecord monitor(const HomotopyState& state, const ProblemSpec& spec) {
    MonitorRecord m;
    const ScalarField& u = state.u;
    const Grid& g = u.grid();
    const int n = g.n();
    const std::size_t size = g.size();
    std::vector<double> grad_sq(size), hess_rad(size), tmargin(size), umargin(size);
    const int order = spec.cone_order();
    parallel_for(size, [&](std::size_t b, std::size_t e) {
        Eigen::MatrixXd H(n, n);
        for (std::size_t p = b; p < e; ++p) {
            const LocalDerivatives d = local_derivatives(u, p);
            double gs = 0.0;
            for (int i = 0; i < n; ++i) gs += d.grad[static_cast<std::size_t>(i)] * d.grad[static_cast<std::size_t>(i)];
            grad_sq[p] = gs;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) H(i, j) = d.hess(i, j);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
            hess_rad[p] = es.eigenvalues().cwiseAbs().maxCoeff();
            const PointEval pe = evaluate_point(spec, u, state.t, p);
            tmargin[p] = pe.cone_margin;
            if (spec.kind == Case::C) {
                umargin[p] = pe.cone_margin;
            } else {
                const SigmaJet ju = sigma_jet(local_U(d, state.t, spec.background.ric0.at(p)), order);
                double mu = std::numeric_limits<double>::infinity();
                for (int j = 1; j <= order; ++j) mu = std::min(mu, ju.sigmas[static_cast<std::size_t>(j)]);
                umargin[p] = mu;
            }
        }
    });
    m.sup_u = u.max_abs();
    m.tensor_margin = m.u_tensor_margin = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < size; ++p) {
        m.sup_grad_u_sq = std::max(m.sup_grad_u_sq, grad_sq[p]);
        m.sup_hess_u = std::max(m.sup_hess_u, hess_rad[p]);
        m.tensor_margin = std::min(m.tensor_margin, tmargin[p]);
        m.u_tensor_margin = std::min(m.u_tensor_margin, umargin[p]);
    }
    m.ellipticity = ellipticity_certificate(u, state.t, spec);
    return m;
}

namespace {

TraceEntry record(int step, const HomotopyState& s, const ProblemSpec& spec) {
    return TraceEntry{step, s.t, s.newton_iterations, s.residual_norm, s.cone_margin, monitor(s, spec)};
}

}  // namespace

ContinuationTrace continue_path(const ProblemSpec& spec, const ContinuationSchedule& schedule,
                                const NewtonOptions& options) {
    if (spec.kind == Case::C) throw DomainError("continue_path: case C has no homotopy family; use solve_caseC");
    ContinuationTrace trace;

    HomotopyState current;
    current.t = 0.0;
    current.u = ScalarField(spec.grid, 0.0);
    current = newton_correct(std::move(current), spec, options);
    trace.steps.push_back(record(0, current, spec));
    trace.final_u = current.u;
    trace.final_t = 0.0;

    double dt = std::min(schedule.dt_initial, schedule.dt_max);
    int step = 0;
    std::string last_error;
    while (current.t < 1.0) {
        if (dt < schedule.dt_min) {
            trace.failure = "step size " + std::to_string(dt) + " below dt_min " + std::to_string(schedule.dt_min) +
                            " at t = " + std::to_string(current.t) + (last_error.empty() ? "" : ": " + last_error);
            throw PathFailure(trace.failure, trace);
        }
        const double t_next = std::min(1.0, current.t + dt);
        HomotopyState trial;
        trial.t = t_next;
        trial.u = current.u;
        try {
            trial = newton_correct(std::move(trial), spec, options);
        } catch (const Error& e) {
            last_error = e.what();
            dt *= 0.5;
            continue;
        }
        current = std::move(trial);
        trace.steps.push_back(record(++step, current, spec));
        trace.final_u = current.u;
        trace.final_t = current.t;
        if (current.newton_iterations <= schedule.fast_iterations) dt = std::min(2.0 * dt, schedule.dt_max);
    }
    trace.success = true;
    return trace;
}

HomotopyState solve_caseC(const ProblemSpec& spec, const ScalarField& u_init, const NewtonOptions& options) {
    if (spec.kind != Case::C) throw DomainError("solve_caseC requires a case C problem");
    if (!(spec.background.schouten_margin > 0.0)) {
        throw DomainError("solve_caseC: schouten0 outside Gamma_{k-1}");
    }
    HomotopyState s;
    s.t = 1.0;
    s.u = u_init;
    return newton_correct(std::move(s), spec, options);
}

void write_trace_csv(std::ostream& os, const ContinuationTrace& trace) {
    os << "step,t,newton_iters,residual_norm,cone_margin,sup_u,sup_grad_u_sq,sup_hess_u\n";
    char buf[512];
    for (const TraceEntry& e : trace.steps) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", e.step, e.t, e.newton_iterations,
                      e.residual_norm, e.cone_margin, e.monitors.sup_u, e.monitors.sup_grad_u_sq,
                      e.monitors.sup_hess_u);
        os << buf;
    }
}

}  // namespace sigmak
