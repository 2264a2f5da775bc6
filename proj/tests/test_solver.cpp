#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "sigmak/parallel.hpp"
#include "sigmak/solver.hpp"

using namespace sigmak;

namespace {

ProblemSpec problem(const std::string& cfg, int N = 16) { return make_problem(oracle::config(cfg), N); }

ScalarField field(const std::string& src, const Grid& g) { return sample(Expr::parse(src, g.n()), g); }

double spread(const ScalarField& u) { return u.max() - u.min(); }

}  // namespace

TEST_CASE("solve_t0") {
    const ProblemSpec s = problem(oracle::canonical_a());
    int iterations = -1;
    const ScalarField z = solve_t0(s, ScalarField(s.grid, 0.0), NewtonOptions{}, &iterations);
    CHECK(iterations == 0);
    CHECK(z.max_abs() == 0.0);

    CHECK(solve_t0(s, field("0.05*sin(x1)", s.grid), NewtonOptions{}).max_abs() <= 1e-8);
    CHECK(solve_t0(s, ScalarField(s.grid, 0.3), NewtonOptions{}).max_abs() <= 1e-8);

    ProblemSpec c = problem(oracle::canonical_c());
    CHECK_THROWS_AS(solve_t0(c, ScalarField(c.grid, 0.0), NewtonOptions{}), DomainError);
}

TEST_CASE("t = 0 solutions from random starts coincide") {
    const ProblemSpec s = problem(oracle::canonical_a());
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> a(-0.1, 0.1);
    std::vector<ScalarField> sols;
    for (int trial = 0; trial < 10; ++trial) {
        ScalarField u0(s.grid);
        const double c1 = a(rng) * 0.5, c2 = a(rng) * 0.25, c3 = a(rng) * 0.25;
        for (std::size_t p = 0; p < u0.size(); ++p) {
            const auto x = s.grid.coordinates(p);
            u0[p] = c1 * std::sin(x[0]) * std::cos(x[1]) + c2 * std::cos(x[2]) + c3;
        }
        REQUIRE(u0.max_abs() <= 0.1);
        sols.push_back(solve_t0(s, u0, NewtonOptions{}));
    }
    for (const ScalarField& u : sols) {
        for (std::size_t p = 0; p < u.size(); ++p) REQUIRE(std::fabs(u[p] - sols[0][p]) <= 1e-7);
    }
}

TEST_CASE("newton_correct") {
    const ProblemSpec s = problem(oracle::canonical_a());
    HomotopyState done = make_state(ScalarField(s.grid, 0.0), 1.0, s);
    const HomotopyState same = newton_correct(done, s, NewtonOptions{});
    CHECK(same.newton_iterations == 0);
    CHECK(same.u == done.u);

    HomotopyState st = make_state(field("0.01*sin(x1)", s.grid), 1.0, s);
    const HomotopyState out = newton_correct(st, s, NewtonOptions{});
    CHECK(out.newton_iterations <= 6);
    CHECK(out.residual_norm <= 1e-10);
    CHECK(out.u.max_abs() <= 1e-8);
    CHECK(out.cone_margin > 0.0);
    for (std::size_t i = 1; i < out.residual_history.size(); ++i)
        CHECK(out.residual_history[i] < out.residual_history[i - 1]);

    NewtonOptions bad;
    bad.tolerance = 0.0;
    CHECK_THROWS_AS(newton_correct(st, s, bad), DomainError);
}

TEST_CASE("no silent answer for inadmissible data") {
    ProblemSpec s = problem(oracle::canonical_a());
    s.f = ScalarField(s.grid, -1.0);  // past validation
    HomotopyState st = make_state(ScalarField(s.grid, 0.0), 1.0, s);
    bool raised = false;
    try {
        (void)newton_correct(st, s, NewtonOptions{});
    } catch (const ConeExitError&) {
        raised = true;
    } catch (const ConvergenceError&) {
        raised = true;
    } catch (const LinearSolveError&) {
        raised = true;
    }
    CHECK(raised);
}

TEST_CASE("case A continuation reaches the constant solution") {
    const ProblemSpec s = problem(oracle::canonical_a());
    const ContinuationTrace tr = continue_path(s, ContinuationSchedule{}, NewtonOptions{});
    CHECK(tr.success);
    CHECK(tr.final_t == 1.0);
    CHECK(tr.final_u.max_abs() <= 1e-6);
    CHECK(spread(tr.final_u) <= 1e-8);
    for (std::size_t i = 0; i < tr.steps.size(); ++i) {
        CHECK(tr.steps[i].cone_margin > 0.0);
        CHECK(tr.steps[i].residual_norm <= 1e-10);
        CHECK(tr.steps[i].monitors.sup_u <= 10.0);
        CHECK(tr.steps[i].monitors.ellipticity.pass);
        if (i > 0) CHECK(tr.steps[i].t > tr.steps[i - 1].t);
    }
}

TEST_CASE("case B continuation reaches the constant solutions") {
    const ProblemSpec b0 = problem(oracle::canonical_b("-1/3"));
    const ContinuationTrace t0 = continue_path(b0, ContinuationSchedule{}, NewtonOptions{});
    CHECK(t0.success);
    CHECK(t0.final_u.max_abs() <= 1e-6);

    const ProblemSpec b1 = problem(oracle::canonical_b("-1/(3*exp(2))"));
    const ContinuationTrace t1 = continue_path(b1, ContinuationSchedule{}, NewtonOptions{});
    CHECK(t1.success);
    for (std::size_t p = 0; p < t1.final_u.size(); ++p) REQUIRE(std::fabs(t1.final_u[p] - 1.0) <= 1e-6);
    CHECK(spread(t1.final_u) <= 1e-8);
}

TEST_CASE("forced path failure carries the partial trace") {
    const ProblemSpec s = problem(oracle::canonical_a());
    ContinuationSchedule sched;
    sched.dt_min = 0.5;
    try {
        (void)continue_path(s, sched, NewtonOptions{});
        FAIL("expected path failure");
    } catch (const PathFailure& e) {
        CHECK_FALSE(e.trace().success);
        CHECK(e.trace().steps.size() == 1);
        CHECK(e.trace().final_t == 0.0);
    }
    const ProblemSpec c = problem(oracle::canonical_c());
    CHECK_THROWS_AS(continue_path(c, sched, NewtonOptions{}), DomainError);
}

TEST_CASE("trace csv is deterministic and has the fixed header") {
    const ProblemSpec s = problem(oracle::canonical_a());
    std::ostringstream a, b;
    write_trace_csv(a, continue_path(s, ContinuationSchedule{}, NewtonOptions{}));
    write_trace_csv(b, continue_path(s, ContinuationSchedule{}, NewtonOptions{}));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("step,t,newton_iters,residual_norm,cone_margin,sup_u,sup_grad_u_sq,sup_hess_u\n", 0) == 0);
}

TEST_CASE("solve_caseC") {
    // f manufactured at u == 0: sigma_k(W(0)) + alpha sigma_{k-1}(W(0)) = 1 - 0.3 = 0.7
    const ProblemSpec s = problem(oracle::canonical_c(1.0, 8, "-0.1", "0.7"));
    const HomotopyState st = solve_caseC(s, ScalarField(s.grid, 0.0), NewtonOptions{});
    CHECK(st.newton_iterations == 0);
    CHECK(st.residual_norm <= 1e-15);

    ProblemSpec flipped = s;
    flipped.alpha = ScalarField(s.grid, 0.1);
    CHECK_THROWS_AS(validate_problem(flipped), DomainError);
    CHECK_THROWS_AS(solve_caseC(problem(oracle::canonical_a(8)), ScalarField(s.grid, 0.0), NewtonOptions{}), DomainError);
}

TEST_CASE("monitor") {
    const ProblemSpec s = problem(oracle::canonical_a(), 32);
    const MonitorRecord z = monitor(make_state(ScalarField(s.grid, 0.0), 1.0, s), s);
    CHECK(z.sup_u == 0.0);
    CHECK(z.sup_grad_u_sq == 0.0);
    CHECK(z.sup_hess_u == 0.0);
    CHECK(z.ellipticity.pass);
    const MonitorRecord m = monitor(make_state(field("0.1*sin(x1)", s.grid), 1.0, s), s);
    const double h = s.grid.spacing();
    CHECK(std::fabs(m.sup_grad_u_sq - 0.01) <= 0.01 * h * h);
    CHECK(std::fabs(m.sup_hess_u - 0.1) <= 0.1 * h * h);
    CHECK(m.tensor_margin > 0.0);
    CHECK(m.u_tensor_margin > 0.0);
}

TEST_CASE("trace does not depend on the worker count") {
    const ProblemSpec s = problem(oracle::canonical_a());
    std::ostringstream one, four;
    set_workers(1);
    write_trace_csv(one, continue_path(s, ContinuationSchedule{}, NewtonOptions{}));
    set_workers(4);
    write_trace_csv(four, continue_path(s, ContinuationSchedule{}, NewtonOptions{}));
    set_workers(0);
    CHECK(one.str() == four.str());
}
