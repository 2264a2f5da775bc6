#include "sigmak/operators.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "sigmak/parallel.hpp"

namespace sigmak {

namespace {

struct PointCoefficients {
    SymMatrix second;
    std::array<double, kMaxDim> first{};
    double zeroth = 0.0;
};

/// Source term h = (1-t) sigma_k(e) + t f of case A.
double case_a_source(const ProblemSpec& spec, double t, std::size_t p) {
    return (1.0 - t) * binomial(spec.n, spec.k) + t * spec.f[p];
}

/// Coefficient beta = (1-t) sigma_k(e)/sigma_{k-1}(e) - t alpha of case B.
double case_b_beta(const ProblemSpec& spec, double t, std::size_t p) {
    return (1.0 - t) * binomial(spec.n, spec.k) / binomial(spec.n, spec.k - 1) - t * spec.alpha[p];
}

PointEval evaluate_local(const ProblemSpec& spec, const LocalDerivatives& d, double t, std::size_t p) {
    const int k = spec.k;
    PointEval pe;
    if (spec.kind == Case::C) {
        pe.tensor = local_W(d, spec.background.schouten0.at(p));
    } else {
        pe.tensor = local_V(local_U(d, t, spec.background.ric0.at(p)), t);
    }
    pe.jet = sigma_jet(pe.tensor, k);
    const double sk = pe.jet.sigmas[static_cast<std::size_t>(k)];
    const double skm1 = pe.jet.sigmas[static_cast<std::size_t>(k - 1)];
    const double u = d.value;
    const double a = spec.alpha[p];
    switch (spec.kind) {
        case Case::A:
            pe.multiplied = sk + t * a * std::exp(2.0 * u) * skm1 - case_a_source(spec, t, p) * std::exp(2.0 * k * u);
            break;
        case Case::B:
            pe.multiplied = sk - case_b_beta(spec, t, p) * std::exp(2.0 * u) * skm1;
            break;
        case Case::C:
            pe.multiplied = sk + a * std::exp(-2.0 * u) * skm1 - spec.f[p] * std::exp(-2.0 * k * u);
            break;
    }
    const int order = spec.cone_order();
    double m = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= order; ++j) m = std::min(m, pe.jet.sigmas[static_cast<std::size_t>(j)]);
    pe.cone_margin = m;
    return pe;
}

/// Chain rule from dF/dV to dF/dU through V = tU + (1-t) trU I.
SymMatrix pull_back_V(const SymMatrix& D, double t) {
    SymMatrix E = t * D;
    E.add_identity((1.0 - t) * D.trace());
    return E;
}

PointCoefficients coefficients_local(const ProblemSpec& spec, const LocalDerivatives& d, const PointEval& pe, double t,
                                     std::size_t p) {
    const int n = spec.n;
    const int k = spec.k;
    const double skm1 = pe.jet.sigmas[static_cast<std::size_t>(k - 1)];
    const SymMatrix& Tk = pe.jet.newton[static_cast<std::size_t>(k - 1)];
    const SymMatrix& Tkm1 = pe.jet.newton[static_cast<std::size_t>(k - 2)];
    const double u = d.value;
    const double a = spec.alpha[p];

    PointCoefficients c;
    if (spec.kind == Case::C) {
        const double em = std::exp(-2.0 * u);
        SymMatrix D = Tk + (a * em) * Tkm1;
        const double trD = D.trace();
        c.second = D;
        for (int q = 0; q < n; ++q) {
            double Dg = 0.0;
            for (int j = 0; j < n; ++j) Dg += D(q, j) * d.grad[static_cast<std::size_t>(j)];
            c.first[static_cast<std::size_t>(q)] = 2.0 * Dg - d.grad[static_cast<std::size_t>(q)] * trD;
        }
        c.zeroth = -2.0 * a * em * skm1 + 2.0 * k * spec.f[p] * std::exp(-2.0 * k * u);
        return c;
    }

    const double e2 = std::exp(2.0 * u);
    SymMatrix D;
    if (spec.kind == Case::A) {
        D = Tk + (t * a * e2) * Tkm1;
        c.zeroth = 2.0 * t * a * e2 * skm1 - 2.0 * k * case_a_source(spec, t, p) * std::exp(2.0 * k * u);
    } else {
        const double beta = case_b_beta(spec, t, p);
        D = Tk + (-beta * e2) * Tkm1;
        c.zeroth = -2.0 * beta * e2 * skm1;
    }
    const SymMatrix E = pull_back_V(D, t);
    const double trE = E.trace();
    c.second = E;
    c.second.add_identity(trE / static_cast<double>(n - 2));
    for (int q = 0; q < n; ++q) {
        double Eg = 0.0;
        for (int j = 0; j < n; ++j) Eg += E(q, j) * d.grad[static_cast<std::size_t>(j)];
        c.first[static_cast<std::size_t>(q)] = 2.0 * d.grad[static_cast<std::size_t>(q)] * trE - 2.0 * Eg;
    }
    return c;
}

double min_eigenvalue(const SymMatrix& m) {
    const int n = m.n();
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = m(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

PointEval evaluate_point(const ProblemSpec& spec, const ScalarField& u, double t, std::size_t node) {
    return evaluate_local(spec, local_derivatives(u, node), t, node);
}

ResidualField residual(const ScalarField& u, double t, const ProblemSpec& spec, ResidualForm form) {
    const Grid& g = u.grid();
    ResidualField r{ScalarField(g), form};
    std::vector<double> margins(form == ResidualForm::Quotient ? g.size() : 0);
    std::vector<double> denominators(margins.size());
    parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            const PointEval pe = evaluate_point(spec, u, t, p);
            if (form == ResidualForm::Multiplied) {
                r.values[p] = pe.multiplied;
            } else {
                const double skm1 = pe.jet.sigmas[static_cast<std::size_t>(spec.k - 1)];
                margins[p] = pe.cone_margin;
                denominators[p] = skm1;
                r.values[p] = pe.multiplied / skm1;
            }
        }
    });
    if (form == ResidualForm::Quotient) {
        for (std::size_t p = 0; p < g.size(); ++p) {
            if (!(margins[p] > 0.0)) {
                throw AdmissibilityError("tensor outside Gamma_" + std::to_string(spec.cone_order()) + " at node " +
                                             std::to_string(p),
                                         p, margins[p]);
            }
            if (denominators[p] < kSigmaFloor) {
                throw SingularityError("sigma_{k-1} below floor at node " + std::to_string(p), p);
            }
        }
    }
    return r;
}

ConeAudit cone_audit(const ScalarField& u, double t, const ProblemSpec& spec) {
    const Grid& g = u.grid();
    std::vector<double> margins(g.size());
    parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) margins[p] = evaluate_point(spec, u, t, p).cone_margin;
    });
    ConeAudit audit;
    audit.margin = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < g.size(); ++p) {
        if (margins[p] < audit.margin || std::isnan(margins[p])) {
            audit.margin = margins[p];
            audit.worst_node = p;
            if (std::isnan(margins[p])) break;
        }
    }
    const PointEval pe = evaluate_point(spec, u, t, audit.worst_node);
    audit.worst = in_gamma_sigmas(std::span<const double>(pe.jet.sigmas).subspan(1), spec.cone_order());
    return audit;
}

LinearOperator::LinearOperator(const Grid& grid)
    : grid_(grid),
      second_(grid),
      first_(grid.size() * static_cast<std::size_t>(grid.n()), 0.0),
      zeroth_(grid.size(), 0.0) {}

void LinearOperator::set_node(std::size_t node, const SymMatrix& second, std::span<const double> first, double zeroth) {
    second_.store(node, second);
    for (int q = 0; q < grid_.n(); ++q)
        first_[node * static_cast<std::size_t>(grid_.n()) + static_cast<std::size_t>(q)] = first[static_cast<std::size_t>(q)];
    zeroth_[node] = zeroth;
}

ScalarField LinearOperator::apply(const ScalarField& phi) const {
    ScalarField out(grid_);
    const int n = grid_.n();
    parallel_for(grid_.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            const LocalDerivatives d = local_derivatives(phi, p);
            double acc = zeroth_[p] * d.value;
            for (int i = 0; i < n; ++i) {
                acc += second_.get(p, i, i) * d.hess(i, i);
                for (int j = i + 1; j < n; ++j) acc += 2.0 * second_.get(p, i, j) * d.hess(i, j);
                acc += first_order(p, i) * d.grad[static_cast<std::size_t>(i)];
            }
            out[p] = acc;
        }
    });
    return out;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> LinearOperator::to_sparse() const {
    const int n = grid_.n();
    const double h = grid_.spacing();
    const std::size_t size = grid_.size();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(size * static_cast<std::size_t>(1 + 2 * n + 2 * n * (n - 1)));
    for (std::size_t p = 0; p < size; ++p) {
        const auto row = static_cast<Eigen::Index>(p);
        const auto col = [](std::size_t q) { return static_cast<Eigen::Index>(q); };
        double diag = zeroth_[p];
        for (int i = 0; i < n; ++i) {
            const double s = second_.get(p, i, i) / (h * h);
            const double fo = first_order(p, i) / (2.0 * h);
            const std::size_t ip = grid_.neighbor(p, i, 1);
            const std::size_t im = grid_.neighbor(p, i, -1);
            diag -= 2.0 * s;
            trip.emplace_back(row, col(ip), s + fo);
            trip.emplace_back(row, col(im), s - fo);
            for (int j = i + 1; j < n; ++j) {
                const double w = 2.0 * second_.get(p, i, j) / (4.0 * h * h);
                trip.emplace_back(row, col(grid_.neighbor(ip, j, 1)), w);
                trip.emplace_back(row, col(grid_.neighbor(ip, j, -1)), -w);
                trip.emplace_back(row, col(grid_.neighbor(im, j, 1)), -w);
                trip.emplace_back(row, col(grid_.neighbor(im, j, -1)), w);
            }
        }
        trip.emplace_back(row, row, diag);
    }
    Eigen::SparseMatrix<double, Eigen::RowMajor> A(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

LinearOperator linearize(const ScalarField& u, double t, const ProblemSpec& spec) {
    const Grid& g = u.grid();
    LinearOperator L(g);
    parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            const LocalDerivatives d = local_derivatives(u, p);
            const PointEval pe = evaluate_local(spec, d, t, p);
            const PointCoefficients c = coefficients_local(spec, d, pe, t, p);
            L.set_node(p, c.second, std::span<const double>(c.first.data(), static_cast<std::size_t>(spec.n)), c.zeroth);
        }
    });
    return L;
}

SymMatrix quotient_coefficients(const ProblemSpec& spec, const PointEval& pe, const ScalarField& u, double t,
                                std::size_t p) {
    const int k = spec.k;
    const double sk = pe.jet.sigmas[static_cast<std::size_t>(k)];
    const double skm1 = pe.jet.sigmas[static_cast<std::size_t>(k - 1)];
    const SymMatrix& Tk = pe.jet.newton[static_cast<std::size_t>(k - 1)];
    const SymMatrix& Tkm1 = pe.jet.newton[static_cast<std::size_t>(k - 2)];
    const double inv2 = 1.0 / (skm1 * skm1);

    // d(sigma_k/sigma_{k-1}) = (T_{k-1} sigma_{k-1} - sigma_k T_{k-2}) / sigma_{k-1}^2
    SymMatrix D = (skm1 * inv2) * Tk + (-sk * inv2) * Tkm1;
    // -h/sigma_{k-1} contributes h T_{k-2} / sigma_{k-1}^2
    double h = 0.0;
    if (spec.kind == Case::A) h = case_a_source(spec, t, p) * std::exp(2.0 * spec.k * u[p]);
    if (spec.kind == Case::C) h = spec.f[p] * std::exp(-2.0 * spec.k * u[p]);
    if (h != 0.0) D += (h * inv2) * Tkm1;

    return spec.kind == Case::C ? D : pull_back_V(D, t);
}

EllipticityReport ellipticity_certificate(const ScalarField& u, double t, const ProblemSpec& spec) {
    const Grid& g = u.grid();
    const std::size_t size = g.size();
    std::vector<double> eig(size), tr(size), op_eig(size), margin(size);
    parallel_for(size, [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            const LocalDerivatives d = local_derivatives(u, p);
            const PointEval pe = evaluate_local(spec, d, t, p);
            margin[p] = pe.cone_margin;
            if (!(pe.cone_margin > 0.0)) {
                eig[p] = tr[p] = op_eig[p] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            const SymMatrix G = quotient_coefficients(spec, pe, u, t, p);
            eig[p] = min_eigenvalue(G);
            tr[p] = G.trace();
            op_eig[p] = min_eigenvalue(coefficients_local(spec, d, pe, t, p).second);
        }
    });

    EllipticityReport rep;
    rep.trace_bound = static_cast<double>(spec.n - spec.k + 1) / static_cast<double>(spec.k);
    rep.min_eigenvalue = rep.min_trace = rep.min_operator_eigenvalue = rep.min_cone_margin =
        std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < size; ++p) {
        rep.min_cone_margin = std::min(rep.min_cone_margin, margin[p]);
        const bool cone_ok = margin[p] > 0.0;
        const bool ok = cone_ok && eig[p] > 0.0 && tr[p] >= rep.trace_bound - 1e-10;
        if (!ok) rep.failing_nodes.push_back(p);
        if (!cone_ok) continue;
        if (eig[p] < rep.min_eigenvalue) {
            rep.min_eigenvalue = eig[p];
            rep.min_eigenvalue_node = p;
        }
        if (tr[p] < rep.min_trace) {
            rep.min_trace = tr[p];
            rep.min_trace_node = p;
        }
        rep.min_operator_eigenvalue = std::min(rep.min_operator_eigenvalue, op_eig[p]);
    }
    rep.pass = rep.failing_nodes.empty();
    return rep;
}

C0Report c0_diagnostic(const ScalarField& u, double t, const ProblemSpec& spec) {
    C0Report rep;
    const Grid& g = u.grid();
    const int n = spec.n;
    const int k = spec.k;
    rep.h = g.spacing();
    for (std::size_t p = 0; p < g.size(); ++p) {
        if (u[p] > u[rep.argmax]) rep.argmax = p;
        if (u[p] < u[rep.argmin]) rep.argmin = p;
    }
    rep.u_max = u[rep.argmax];
    rep.u_min = u[rep.argmin];
    rep.exp_2ku_at_max = std::exp(2.0 * k * rep.u_max);
    rep.exp_2ku_at_min = std::exp(2.0 * k * rep.u_min);
    if (spec.kind == Case::C) {
        rep.note = "no comparison tensor for the Schouten form; extrema reported only";
        return rep;
    }
    rep.applicable = true;

    struct Side {
        double q_background, q_state, s_background;
    };
    const auto side = [&](std::size_t p) {
        // Background comparison tensor B = -t Ric0/(n-2) + ((1-t)/n) I, i.e. U with u == 0.
        const SymMatrix VB = local_V(local_U(LocalDerivatives{0.0, {}, SymMatrix(n)}, t, spec.background.ric0.at(p)), t);
        const SigmaJet jb = sigma_jet(VB, k);
        const PointEval pe = evaluate_point(spec, u, t, p);
        const auto K = static_cast<std::size_t>(k);
        return Side{jb.sigmas[K] / jb.sigmas[K - 1], pe.jet.sigmas[K] / pe.jet.sigmas[K - 1], jb.sigmas[K - 1]};
    };
    const Side mx = side(rep.argmax);
    const Side mn = side(rep.argmin);
    rep.background_at_max = mx.q_background;
    rep.state_at_max = mx.q_state;
    rep.slack_at_max = std::max(0.0, mx.q_state - mx.q_background);
    rep.background_at_min = mn.q_background;
    rep.state_at_min = mn.q_state;
    rep.slack_at_min = std::max(0.0, mn.q_background - mn.q_state);

    // Both extrema bound u by the same root y* of
    //   A: q_B + t alpha y - h y^k / sigma_{k-1}(B) = 0   (decreasing in y for alpha <= 0, positive at 0)
    //   B: q_B - beta y = 0
    const auto root = [&](std::size_t p, const Side& s) {
        if (spec.kind == Case::B) return 0.5 * std::log(s.q_background / case_b_beta(spec, t, p));
        const double a = t * spec.alpha[p];
        const double hk = case_a_source(spec, t, p) / s.s_background;
        const auto phi = [&](double y) { return s.q_background + a * y - hk * std::pow(y, k); };
        double lo = 0.0, hi = 1.0;
        while (phi(hi) > 0.0 && hi < 1e300) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (phi(mid) > 0.0 ? lo : hi) = mid;
        }
        return 0.5 * std::log(0.5 * (lo + hi));
    };
    rep.upper_bound = root(rep.argmax, mx);
    rep.lower_bound = root(rep.argmin, mn);
    return rep;
}

}  // namespace sigmak
