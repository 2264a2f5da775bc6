#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sigmak/curvature.hpp"

using namespace sigmak;

namespace {

ProblemSpec problem(const std::string& cfg, int N = 8) { return make_problem(oracle::config(cfg), N); }

ScalarField field(const std::string& src, const Grid& g) { return sample(Expr::parse(src, g.n()), g); }

void check_const_tensor(const SymmetricTensorField& T, const SymMatrix& expect, double tol) {
    for (std::size_t p = 0; p < T.grid().size(); ++p)
        for (int i = 0; i < expect.n(); ++i)
            for (int j = 0; j < expect.n(); ++j) REQUIRE(std::fabs(T.get(p, i, j) - expect(i, j)) <= tol);
}

}  // namespace

TEST_CASE("case parsing and conformal sign") {
    CHECK(parse_case("A") == Case::A);
    CHECK(parse_case("c") == Case::C);
    CHECK_THROWS_AS(parse_case("D"), DomainError);
    CHECK(conformal_sign(Case::A) == 1);
    CHECK(conformal_sign(Case::B) == 1);
    CHECK(conformal_sign(Case::C) == -1);
}

TEST_CASE("build_U at u == 0") {
    const ProblemSpec s = problem(oracle::canonical_a());
    const ScalarField zero(s.grid, 0.0);
    check_const_tensor(build_U(zero, 0.0, s), SymMatrix::identity(3, 1.0 / 3.0), 1e-15);
    CHECK(build_U(zero, 0.0, s).trace().max() == doctest::Approx(1.0));
    check_const_tensor(build_U(zero, 1.0, s), SymMatrix::identity(3), 1e-15);
}

TEST_CASE("build_U ignores constants and is affine in t") {
    const ProblemSpec s = problem(oracle::canonical_a());
    const ScalarField u = field("0.2*sin(x1)*cos(x3)+0.1*cos(x2)", s.grid);
    ScalarField shifted = u;
    for (std::size_t p = 0; p < u.size(); ++p) shifted[p] += 0.7;
    const auto U0 = build_U(u, 0.0, s), U1 = build_U(u, 1.0, s);
    for (double t : {0.0, 0.3, 0.8}) {
        const auto Ut = build_U(u, t, s);
        const auto Us = build_U(shifted, t, s);
        for (std::size_t p = 0; p < u.size(); ++p) {
            for (int i = 0; i < 3; ++i) {
                for (int j = i; j < 3; ++j) {
                    REQUIRE(std::fabs(Ut.get(p, i, j) - Us.get(p, i, j)) <= 1e-12);
                    REQUIRE(std::fabs(Ut.get(p, i, j) - ((1 - t) * U0.get(p, i, j) + t * U1.get(p, i, j))) <= 1e-14);
                }
            }
        }
    }
}

TEST_CASE("build_V") {
    const Grid g(3, 8);
    SymmetricTensorField U(g);
    for (std::size_t p = 0; p < g.size(); ++p) {
        U.set(p, 0, 0, 1.0);
        U.set(p, 1, 1, 2.0);
        U.set(p, 2, 2, 3.0);
    }
    const double d[] = {3.5, 4.0, 4.5};
    check_const_tensor(build_V(U, 0.5), SymMatrix::diagonal(d), 1e-15);
    const auto V1 = build_V(U, 1.0);
    CHECK(std::equal(V1.data().begin(), V1.data().end(), U.data().begin()));
    const double six[] = {6.0, 6.0, 6.0};
    check_const_tensor(build_V(U, 0.0), SymMatrix::diagonal(six), 1e-15);

    const ProblemSpec s = problem(oracle::canonical_a());
    const ScalarField u = field("0.3*sin(x1)*sin(x2)", s.grid);
    for (double t : {0.0, 0.25, 1.0}) {
        const auto Ut = build_U(u, t, s);
        const auto trU = Ut.trace();
        const auto trV = build_V(Ut, t).trace();
        for (std::size_t p = 0; p < u.size(); ++p) REQUIRE(std::fabs(trV[p] - (t + (1 - t) * 3) * trU[p]) <= 1e-13);
    }
}

TEST_CASE("build_W") {
    const ProblemSpec s = problem(oracle::canonical_c(1.0), 32);
    const ScalarField zero(s.grid, 0.0);
    check_const_tensor(build_W(zero, s), SymMatrix::identity(3), 0.0);
    const auto W0 = build_W(zero, s);
    CHECK(sigma_matrix(W0.at(0), 3) == doctest::Approx(binomial(3, 3)));
    CHECK(sigma_matrix(W0.at(0), 2) == doctest::Approx(binomial(3, 2)));

    const ScalarField u = field("0.1*sin(x1)", s.grid);
    const auto W = build_W(u, s);
    double err = 0.0;
    for (std::size_t p = 0; p < u.size(); ++p) {
        const double x = s.grid.coordinates(p)[0];
        const double c = 0.1 * std::cos(x);
        const double exact = -0.1 * std::sin(x) + c * c - 0.5 * c * c + 1.0;
        err = std::max(err, std::fabs(W.get(p, 0, 0) - exact));
    }
    const double h = s.grid.spacing();
    CHECK(err <= 0.1 * h * h);
}

TEST_CASE("conformal ricci") {
    const ProblemSpec s = problem(oracle::canonical_a());
    const ScalarField zero(s.grid, 0.0);
    const auto R0 = conformal_ricci(zero, s);
    CHECK(std::equal(R0.data().begin(), R0.data().end(), s.background.ric0.data().begin()));

    const ProblemSpec flat = problem(oracle::canonical_a() + "background.ric0.(1,1) = \"0\"\n");
    // only (1,1) given: the other diagonal entries are zero, so ric0 = 0
    CHECK(flat.background.ric0.at(3).trace() == 0.0);
    const auto Rc = conformal_ricci(ScalarField(flat.grid, 1.3), flat);
    for (double v : Rc.data()) CHECK(v == 0.0);

    // Textbook formula for e^{2u} delta: Ric = -(n-2)(Hu - du du) - (Lap u + (n-2)|du|^2) I, plus ric0.
    const ScalarField u = field("0.2*sin(x1)*cos(x2)+0.1*sin(x3)", s.grid);
    const auto du = grad(u);
    const auto H = hess(u);
    const auto L = laplacian(u);
    const auto R = conformal_ricci(u, s);
    const auto U1 = build_U(u, 1.0, s);
    for (std::size_t p = 0; p < u.size(); ++p) {
        double g2 = 0.0;
        for (int i = 0; i < 3; ++i) g2 += du[static_cast<std::size_t>(i)][p] * du[static_cast<std::size_t>(i)][p];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const double gg = du[static_cast<std::size_t>(i)][p] * du[static_cast<std::size_t>(j)][p];
                const double expect = -(H.get(p, i, j) - gg) - (i == j ? L[p] + g2 : 0.0) + s.background.ric0.get(p, i, j);
                REQUIRE(R.get(p, i, j) == doctest::Approx(expect).epsilon(1e-12).scale(1));
                // -Ric_g/(n-2) is U at t = 1
                REQUIRE(-R.get(p, i, j) == doctest::Approx(U1.get(p, i, j)).epsilon(1e-12).scale(1));
            }
        }
    }
}

TEST_CASE("background audit") {
    const ProblemSpec s = problem(oracle::canonical_a());
    CHECK(s.background.ric_margin == doctest::Approx(1.0));
    // Case A at t = 1 with an admissible background: U(0) in Gamma_k everywhere.
    const auto U = build_U(ScalarField(s.grid, 0.0), 1.0, s);
    for (std::size_t p = 0; p < s.grid.size(); ++p) CHECK(in_gamma_sigmas(sigma_jet(U.at(p), 3).sigmas, 3).inside);
    const ProblemSpec c = problem(oracle::canonical_c(7.0 / 6.0));
    CHECK(c.background.schouten_margin > 0.0);
}

TEST_CASE("case invariants") {
    CHECK_NOTHROW(problem(oracle::canonical_a()));
    CHECK_THROWS_AS(problem(oracle::canonical_a(8, "-0.1", "-1")), ConfigError);
    CHECK_THROWS_AS(problem("spec.case = A\nspec.alpha = \"0.1\"\n"), ConfigError);
    CHECK_NOTHROW(problem("spec.case = A\nspec.alpha = \"0\"\n"));
    CHECK_THROWS_AS(problem(oracle::canonical_b("0")), ConfigError);
    CHECK_THROWS_AS(problem("spec.case = B\nspec.alpha = \"-1\"\nspec.f = \"0.1\"\n"), ConfigError);
    CHECK_NOTHROW(problem(oracle::canonical_b("-1/3")));
    CHECK_THROWS_AS(problem(oracle::canonical_c(1.0, 8, "0.1")), ConfigError);
    CHECK_THROWS_AS(problem(oracle::canonical_c(1.0, 8, "-0.1", "0")), ConfigError);
    CHECK_THROWS_AS(problem(oracle::canonical_c(-1.0)), ConfigError);
    try {
        (void)problem(oracle::canonical_a(8, "-0.1", "cos(x1)"));
        FAIL("expected rejection");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("f must be") != std::string::npos);
    }
}
