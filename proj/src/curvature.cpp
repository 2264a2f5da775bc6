#include "sigmak/curvature.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace sigmak {

char case_letter(Case c) noexcept {
    switch (c) {
        case Case::A: return 'A';
        case Case::B: return 'B';
        case Case::C: return 'C';
    }
    return '?';
}

Case parse_case(const std::string& s) {
    if (s == "A" || s == "a") return Case::A;
    if (s == "B" || s == "b") return Case::B;
    if (s == "C" || s == "c") return Case::C;
    throw DomainError("unknown case '" + s + "', expected A, B or C");
}

int conformal_sign(Case c) noexcept { return c == Case::C ? -1 : 1; }

SymmetricTensorField sample_tensor(const Grid& grid, const TensorSource& src) {
    const int n = grid.n();
    SymmetricTensorField T(grid);
    for (const auto& [key, text] : src) {
        int i = 0, j = 0;
        char tail = 0;
        if (std::sscanf(key.c_str(), "(%d,%d%c", &i, &j, &tail) != 3 || tail != ')' || i < 1 || j < 1 || i > n ||
            j > n) {
            throw DomainError("bad tensor component key '" + key + "'");
        }
        const ScalarField c = sample(Expr::parse(text, n), grid);
        for (std::size_t p = 0; p < grid.size(); ++p) T.set(p, i - 1, j - 1, c[p]);
    }
    return T;
}

Background make_background(const Grid& grid, int k, const TensorSource& ric0, const TensorSource& schouten0) {
    Background bg;
    bg.ric0 = sample_tensor(grid, ric0);
    bg.schouten0 = sample_tensor(grid, schouten0);
    bg.ric0_source = ric0;
    bg.schouten0_source = schouten0;

    const int n = grid.n();
    bg.ric_margin = std::numeric_limits<double>::infinity();
    bg.schouten_margin = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < grid.size(); ++p) {
        SymMatrix neg_ric = bg.ric0.at(p);
        neg_ric *= -1.0 / static_cast<double>(n - 2);
        const auto jr = sigma_jet(neg_ric, k);
        const double mr = in_gamma_sigmas(std::span<const double>(jr.sigmas).subspan(1), k).margin;
        if (mr < bg.ric_margin) {
            bg.ric_margin = mr;
            bg.ric_worst_node = p;
        }
        if (k >= 2) {
            const auto js = sigma_jet(bg.schouten0.at(p), k - 1);
            const double ms = in_gamma_sigmas(std::span<const double>(js.sigmas).subspan(1), k - 1).margin;
            if (ms < bg.schouten_margin) {
                bg.schouten_margin = ms;
                bg.schouten_worst_node = p;
            }
        }
    }
    return bg;
}

void validate_problem(const ProblemSpec& spec) {
    if (spec.n != spec.grid.n()) throw DomainError("spec.n does not match the grid dimension");
    if (spec.k < 3 || spec.k > spec.n) {
        throw DomainError("spec.k = " + std::to_string(spec.k) + " must satisfy 3 <= k <= n = " + std::to_string(spec.n));
    }
    const auto fail = [](const std::string& field, const std::string& cond, std::size_t node, double v) {
        throw DomainError(field + " must be " + cond + " (violated at node " + std::to_string(node) +
                          ", value " + std::to_string(v) + ")");
    };
    const ScalarField& a = spec.alpha;
    const ScalarField& f = spec.f;
    for (std::size_t p = 0; p < spec.grid.size(); ++p) {
        switch (spec.kind) {
            case Case::A:
                if (!(a[p] <= 0.0)) fail("alpha", "<= 0 for case A", p, a[p]);
                if (!(f[p] > 0.0)) fail("f", "> 0 for case A", p, f[p]);
                break;
            case Case::B:
                if (!(a[p] < 0.0)) fail("alpha", "< 0 for case B", p, a[p]);
                if (f[p] != 0.0) fail("f", "identically 0 for case B", p, f[p]);
                break;
            case Case::C:
                if (!(a[p] <= 0.0)) fail("alpha", "<= 0 for case C", p, a[p]);
                if (!(f[p] > 0.0)) fail("f", "bounded below by a positive constant for case C", p, f[p]);
                break;
        }
    }
    if (spec.kind == Case::C && !(spec.background.schouten_margin > 0.0)) {
        throw DomainError("schouten0 must lie in Gamma_{k-1} for case C (violated at node " +
                          std::to_string(spec.background.schouten_worst_node) + ")");
    }
}

SymMatrix local_U(const LocalDerivatives& d, double t, const SymMatrix& ric0) {
    const int n = d.hess.n();
    const double inv = 1.0 / static_cast<double>(n - 2);
    double g2 = 0.0;
    for (int i = 0; i < n; ++i) g2 += d.grad[static_cast<std::size_t>(i)] * d.grad[static_cast<std::size_t>(i)];
    const double iso = inv * d.hess.trace() + g2 + (1.0 - t) / static_cast<double>(n);
    SymMatrix U(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double v = d.hess(i, j) - d.grad[static_cast<std::size_t>(i)] * d.grad[static_cast<std::size_t>(j)] -
                       t * inv * ric0(i, j);
            if (i == j) v += iso;
            U.set(i, j, v);
        }
    return U;
}

SymMatrix local_V(const SymMatrix& U, double t) {
    SymMatrix V = t * U;
    V.add_identity((1.0 - t) * U.trace());
    return V;
}

SymMatrix local_W(const LocalDerivatives& d, const SymMatrix& schouten0) {
    const int n = d.hess.n();
    double g2 = 0.0;
    for (int i = 0; i < n; ++i) g2 += d.grad[static_cast<std::size_t>(i)] * d.grad[static_cast<std::size_t>(i)];
    SymMatrix W(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double v = d.hess(i, j) + d.grad[static_cast<std::size_t>(i)] * d.grad[static_cast<std::size_t>(j)] +
                       schouten0(i, j);
            if (i == j) v -= 0.5 * g2;
            W.set(i, j, v);
        }
    return W;
}

SymmetricTensorField build_U(const ScalarField& u, double t, const ProblemSpec& spec) {
    const Grid& g = u.grid();
    SymmetricTensorField U(g);
    for (std::size_t p = 0; p < g.size(); ++p) U.store(p, local_U(local_derivatives(u, p), t, spec.background.ric0.at(p)));
    return U;
}

SymmetricTensorField build_V(const SymmetricTensorField& U, double t) {
    const Grid& g = U.grid();
    SymmetricTensorField V(g);
    for (std::size_t p = 0; p < g.size(); ++p) V.store(p, local_V(U.at(p), t));
    return V;
}

SymmetricTensorField build_W(const ScalarField& u, const ProblemSpec& spec) {
    const Grid& g = u.grid();
    SymmetricTensorField W(g);
    for (std::size_t p = 0; p < g.size(); ++p) W.store(p, local_W(local_derivatives(u, p), spec.background.schouten0.at(p)));
    return W;
}

SymmetricTensorField conformal_ricci(const ScalarField& u, const ProblemSpec& spec) {
    const Grid& g = u.grid();
    const int n = g.n();
    const double nm2 = static_cast<double>(n - 2);
    SymmetricTensorField R(g);
    for (std::size_t p = 0; p < g.size(); ++p) {
        const LocalDerivatives d = local_derivatives(u, p);
        const SymMatrix ric0 = spec.background.ric0.at(p);
        double g2 = 0.0;
        for (int i = 0; i < n; ++i) g2 += d.grad[static_cast<std::size_t>(i)] * d.grad[static_cast<std::size_t>(i)];
        const double lap = d.hess.trace();
        SymMatrix r(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double v = -d.hess(i, j) + d.grad[static_cast<std::size_t>(i)] * d.grad[static_cast<std::size_t>(j)] +
                           ric0(i, j) / nm2;
                if (i == j) v += -lap / nm2 - g2;
                r.set(i, j, nm2 * v);
            }
        R.store(p, r);
    }
    return R;
}

}  // namespace sigmak
