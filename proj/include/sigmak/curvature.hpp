#pragma once

#include <map>
#include <string>

#include "sigmak/grid.hpp"
#include "sigmak/symfunc.hpp"

namespace sigmak {

/// Equation family.
///   A: V = tU + (1-t) trU g0,  sigma_k(V) + t alpha e^{2u} sigma_{k-1}(V) = ((1-t) sigma_k(e) + t f) e^{2ku}
///   B: same V, sigma_k(V) / sigma_{k-1}(V) = ((1-t) sigma_k(e)/sigma_{k-1}(e) - t alpha) e^{2u}
///   C: W (Schouten form, g = e^{-2u} g0), sigma_k(W) + alpha e^{-2u} sigma_{k-1}(W) = f e^{-2ku}
enum class Case { A, B, C };

char case_letter(Case c) noexcept;
Case parse_case(const std::string& s);

/// +1 when g = e^{2u} g0 (cases A, B), -1 when g = e^{-2u} g0 (case C).
int conformal_sign(Case c) noexcept;

/// Component expressions keyed "(i,j)" with 1-based indices; missing
/// components are zero.
using TensorSource = std::map<std::string, std::string>;

struct Background {
    SymmetricTensorField ric0;       // Ric_{g0}
    SymmetricTensorField schouten0;  // A_{g0}
    TensorSource ric0_source;
    TensorSource schouten0_source;

    // Pointwise cone audit of -ric0/(n-2) in Gamma_k (the case A/B hypothesis)
    // and of schouten0 in Gamma_{k-1} (the case C hypothesis).
    double ric_margin = 0.0;
    std::size_t ric_worst_node = 0;
    double schouten_margin = 0.0;
    std::size_t schouten_worst_node = 0;
};

Background make_background(const Grid& grid, int k, const TensorSource& ric0, const TensorSource& schouten0);
SymmetricTensorField sample_tensor(const Grid& grid, const TensorSource& src);

struct ProblemSpec {
    Case kind = Case::A;
    int n = 3;
    int k = 3;
    Grid grid;
    ScalarField alpha;
    ScalarField f;
    std::string alpha_source;
    std::string f_source;
    Background background;

    /// Gamma_{k-1} for cases A and C, Gamma_k for case B.
    int cone_order() const noexcept { return kind == Case::B ? k : k - 1; }
};

/// Checks the sign conditions on the sampled coefficients for the case and
/// 3 <= k <= n. Throws DomainError naming the offending field and node.
void validate_problem(const ProblemSpec& spec);

// Pointwise assembly with g0 = identity.
SymMatrix local_U(const LocalDerivatives& d, double t, const SymMatrix& ric0);
SymMatrix local_V(const SymMatrix& U, double t);
SymMatrix local_W(const LocalDerivatives& d, const SymMatrix& schouten0);

/// U = Hu + (1/(n-2)) Lap u I + |grad u|^2 I - du (x) du - t Ric0/(n-2) + ((1-t)/n) I.
SymmetricTensorField build_U(const ScalarField& u, double t, const ProblemSpec& spec);
/// V = tU + (1-t) trU I.
SymmetricTensorField build_V(const SymmetricTensorField& U, double t);
/// W = Hu + du (x) du - (1/2)|grad u|^2 I + A0.
SymmetricTensorField build_W(const ScalarField& u, const ProblemSpec& spec);
/// Ricci tensor of e^{2u} g0: (n-2)(-Hu - Lap u/(n-2) I - |grad u|^2 I + du (x) du + Ric0/(n-2)).
SymmetricTensorField conformal_ricci(const ScalarField& u, const ProblemSpec& spec);

}  // namespace sigmak
