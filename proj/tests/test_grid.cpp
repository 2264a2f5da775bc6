#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "sigmak/grid.hpp"

using namespace sigmak;

namespace {

ScalarField field(const std::string& src, const Grid& g) { return sample(Expr::parse(src, g.n()), g); }

double max_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) m = std::max(m, std::fabs(a[p] - b[p]));
    return m;
}

struct Errors {
    double grad, hess_diag, hess_cross, lap;
};

// Errors of the stencils on sin(x1)cos(x2) against its exact derivatives.
Errors stencil_errors(int N) {
    const Grid g(3, N);
    const ScalarField u = field("sin(x1)*cos(x2)", g);
    const auto du = grad(u);
    const auto H = hess(u);
    const ScalarField L = laplacian(u);
    Errors e{};
    e.grad = std::max(max_diff(du[0], field("cos(x1)*cos(x2)", g)), max_diff(du[1], field("-sin(x1)*sin(x2)", g)));
    e.hess_diag = max_diff(H.component(0, 0), field("-sin(x1)*cos(x2)", g));
    e.hess_cross = max_diff(H.component(0, 1), field("-cos(x1)*sin(x2)", g));
    e.lap = max_diff(L, field("-2*sin(x1)*cos(x2)", g));
    return e;
}

}  // namespace

TEST_CASE("grid indexing") {
    const Grid g(3, 8);
    CHECK(g.size() == 512);
    CHECK(g.spacing() == doctest::Approx(2 * std::numbers::pi / 8));
    CHECK(g.stride(0) == 64);
    CHECK(g.stride(2) == 1);
    for (std::size_t p = 0; p < g.size(); ++p) {
        const auto idx = g.unflatten(p);
        REQUIRE(g.flatten(std::span<const int>(idx.data(), 3)) == p);
    }
    const int origin[] = {0, 0, 0};
    const std::size_t p0 = g.flatten(origin);
    CHECK(g.neighbor(p0, 0, -1) == 7 * 64);
    CHECK(g.neighbor(p0, 2, 1) == 1);
    CHECK(g.neighbor(g.neighbor(p0, 1, 5), 1, 3) == p0);
    CHECK_THROWS_AS(Grid(2, 8), DomainError);
    CHECK_THROWS_AS(Grid(7, 8), DomainError);
    CHECK_THROWS_AS(Grid(3, 7), DomainError);
}

TEST_CASE("sample") {
    const Grid g(3, 8);
    CHECK(field("0", g).max_abs() == 0.0);
    const int idx[] = {2, 0, 0};
    CHECK(field("sin(x1)", g)[g.flatten(idx)] == 1.0);
    try {
        (void)field("1/x1", g);
        FAIL("expected evaluation error");
    } catch (const EvalError& e) {
        CHECK(std::string(e.what()).find("(0,0,0)") != std::string::npos);
    }
}

TEST_CASE("constant fields have zero derivatives") {
    const Grid g(4, 8);
    const ScalarField u(g, 3.25);
    for (const auto& d : grad(u)) CHECK(d.max_abs() == 0.0);
    const auto H = hess(u);
    for (double v : H.data()) CHECK(v == 0.0);
    CHECK(laplacian(u).max_abs() == 0.0);
}

TEST_CASE("stencils match the discrete symbol of sin") {
    // Central differences of sin(x) are sin(h)/h cos(x) and -(2 - 2cos h)/h^2 sin(x) exactly.
    const Grid g(3, 16);
    const double h = g.spacing();
    const ScalarField u = field("sin(x1)", g);
    const auto du = grad(u);
    const auto H = hess(u);
    for (std::size_t p = 0; p < g.size(); ++p) {
        const double x = g.coordinates(p)[0];
        CHECK(du[0][p] == doctest::Approx(std::sin(h) / h * std::cos(x)).epsilon(1e-12).scale(1));
        CHECK(H.get(p, 0, 0) == doctest::Approx(-(2 - 2 * std::cos(h)) / (h * h) * std::sin(x)).epsilon(1e-12).scale(1));
    }
    CHECK(du[1].max_abs() == 0.0);
    CHECK(du[2].max_abs() == 0.0);
}

TEST_CASE("second order convergence") {
    const Errors c = stencil_errors(16);
    const Errors f = stencil_errors(32);
    for (const auto& [coarse, fine] : {std::pair{c.grad, f.grad}, std::pair{c.hess_diag, f.hess_diag},
                                       std::pair{c.hess_cross, f.hess_cross}, std::pair{c.lap, f.lap}}) {
        const double ratio = coarse / fine;
        CHECK(ratio >= 3.2);
        CHECK(ratio <= 4.8);
    }
}

TEST_CASE("laplacian equals the hessian trace bitwise") {
    const Grid g(4, 8);
    const ScalarField u = field("sin(x1)+0.3*cos(x2)*sin(x4)+exp(0.1*cos(x3))", g);
    CHECK(laplacian(u) == hess(u).trace());
    const ScalarField v = field("sin(x1)+sin(x2)", Grid(3, 32));
    ScalarField neg = v;
    for (std::size_t p = 0; p < neg.size(); ++p) neg[p] = -neg[p];
    CHECK(max_diff(laplacian(v), neg) < 0.01);
}

TEST_CASE("periodic shift commutes with the stencils") {
    const Grid g(3, 8);
    const ScalarField u = field("exp(sin(x1))*cos(2*x2)+0.5*sin(x3)*cos(x1)", g);
    ScalarField shifted(g);
    for (std::size_t p = 0; p < g.size(); ++p) shifted[g.neighbor(p, 1, 1)] = u[p];
    const auto Hu = hess(u);
    const auto Hs = hess(shifted);
    const auto gu = grad(u);
    const auto gs = grad(shifted);
    for (std::size_t p = 0; p < g.size(); ++p) {
        const std::size_t q = g.neighbor(p, 1, 1);
        for (int i = 0; i < 3; ++i) {
            REQUIRE(gs[static_cast<std::size_t>(i)][q] == gu[static_cast<std::size_t>(i)][p]);
            for (int j = i; j < 3; ++j) REQUIRE(Hs.get(q, i, j) == Hu.get(p, i, j));
        }
    }
}

TEST_CASE("hessian symmetric under axis relabeling") {
    const Grid g(3, 8);
    const ScalarField u = field("sin(x1)*sin(x2)+cos(x1+x2)", g);
    const auto H = hess(u);
    // u(x1,x2) = u(x2,x1): swapping axes 0 and 1 maps H00 to H11.
    for (std::size_t p = 0; p < g.size(); ++p) {
        auto idx = g.unflatten(p);
        std::swap(idx[0], idx[1]);
        const std::size_t q = g.flatten(std::span<const int>(idx.data(), 3));
        CHECK(H.get(p, 0, 0) == doctest::Approx(H.get(q, 1, 1)).epsilon(1e-13).scale(1));
        CHECK(H.get(p, 0, 1) == doctest::Approx(H.get(q, 0, 1)).epsilon(1e-13).scale(1));
    }
}

TEST_CASE("local derivatives agree with the field operators") {
    const Grid g(3, 8);
    const ScalarField u = field("sin(x1)*cos(x2)+0.2*sin(x3)", g);
    const auto du = grad(u);
    const auto H = hess(u);
    for (std::size_t p = 0; p < g.size(); ++p) {
        const LocalDerivatives d = local_derivatives(u, p);
        REQUIRE(d.value == u[p]);
        for (int i = 0; i < 3; ++i) {
            REQUIRE(d.grad[static_cast<std::size_t>(i)] == du[static_cast<std::size_t>(i)][p]);
            for (int j = 0; j < 3; ++j) REQUIRE(d.hess(i, j) == H.get(p, i, j));
        }
    }
}

TEST_CASE("tensor packing") {
    const Grid g(3, 8);
    CHECK(SymmetricTensorField::packed_index(3, 0, 0) == 0);
    CHECK(SymmetricTensorField::packed_index(3, 0, 2) == 2);
    CHECK(SymmetricTensorField::packed_index(3, 1, 1) == 3);
    CHECK(SymmetricTensorField::packed_index(3, 2, 2) == 5);
    CHECK(SymmetricTensorField::packed_index(3, 2, 1) == 4);
    SymmetricTensorField T(g);
    T.set(5, 2, 0, 1.5);
    CHECK(T.get(5, 0, 2) == 1.5);
    CHECK(T.at(5)(2, 0) == 1.5);
}

TEST_CASE("field dump round trip") {
    const Grid g(3, 8);
    const ScalarField u = field("sin(x1)/3 + exp(cos(x2))*1e-7", g);
    std::stringstream ss;
    write_field(ss, u, "u");
    const std::string text = ss.str();
    CHECK(text.rfind("field n=3 N=8 name=u\n", 0) == 0);
    std::string name;
    const ScalarField back = read_field(ss, &name);
    CHECK(name == "u");
    CHECK(back == u);
    std::stringstream bad("field n=3 N=8 name=u\n1\n2\n");
    CHECK_THROWS_AS(read_field(bad), Error);
}
