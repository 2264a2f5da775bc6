#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "sigmak/curvature.hpp"

namespace sigmak {

enum class ResidualForm { Quotient, Multiplied };

inline constexpr double kSigmaFloor = 1e-12;

struct ResidualField {
    ScalarField values;
    ResidualForm form = ResidualForm::Multiplied;
};

/// Everything the equation needs at one grid node.
struct PointEval {
    SymMatrix tensor;  // V for cases A/B, W for case C
    SigmaJet jet;      // sigma_0..sigma_k of tensor and Newton tensors
    double multiplied = 0.0;
    double cone_margin = 0.0;  // min_{j <= cone order} sigma_j(tensor)
};

PointEval evaluate_point(const ProblemSpec& spec, const ScalarField& u, double t, std::size_t node);

/// Pointwise residual. The multiplied form is polynomial in the tensor and
/// is defined everywhere; the quotient form divides by sigma_{k-1} and throws
/// AdmissibilityError outside the required cone or SingularityError when
/// sigma_{k-1} < kSigmaFloor.
ResidualField residual(const ScalarField& u, double t, const ProblemSpec& spec, ResidualForm form);

/// Location and value of the smallest cone margin over the grid.
struct ConeAudit {
    double margin = 0.0;
    std::size_t worst_node = 0;
    ConeReport worst;
};
ConeAudit cone_audit(const ScalarField& u, double t, const ProblemSpec& spec);

/// Linear operator L[phi] = G^{ij} (H phi)_{ij} + b^p (D phi)_p + c phi acting
/// on grid functions through the same discrete stencils as the residual. It
/// is the exact Jacobian of the discrete multiplied residual.
class LinearOperator {
public:
    LinearOperator() = default;
    explicit LinearOperator(const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }
    SymMatrix second_order(std::size_t node) const { return second_.at(node); }
    double first_order(std::size_t node, int p) const noexcept {
        return first_[node * static_cast<std::size_t>(grid_.n()) + static_cast<std::size_t>(p)];
    }
    double zeroth_order(std::size_t node) const noexcept { return zeroth_[node]; }

    void set_node(std::size_t node, const SymMatrix& second, std::span<const double> first, double zeroth);

    ScalarField apply(const ScalarField& phi) const;
    Eigen::SparseMatrix<double, Eigen::RowMajor> to_sparse() const;

private:
    Grid grid_;
    SymmetricTensorField second_;
    std::vector<double> first_;
    std::vector<double> zeroth_;
};

LinearOperator linearize(const ScalarField& u, double t, const ProblemSpec& spec);

/// Derivative of the quotient-form operator with respect to U (cases A/B)
/// or W (case C) at one node: the G^{ij} of the ellipticity argument.
SymMatrix quotient_coefficients(const ProblemSpec& spec, const PointEval& pe, const ScalarField& u, double t,
                                std::size_t node);

struct EllipticityReport {
    bool pass = false;
    double min_eigenvalue = 0.0;        // min over nodes of lambda_min(G^{ij})
    std::size_t min_eigenvalue_node = 0;
    double min_trace = 0.0;             // min over nodes of sum_i G^{ii}
    std::size_t min_trace_node = 0;
    double trace_bound = 0.0;           // (n-k+1)/k
    double min_operator_eigenvalue = 0.0;  // second-order coefficient of the Newton operator
    double min_cone_margin = 0.0;
    std::vector<std::size_t> failing_nodes;
};

EllipticityReport ellipticity_certificate(const ScalarField& u, double t, const ProblemSpec& spec);

struct ConcavityReport {
    int n = 0;
    int k = 0;
    int samples = 0;
    int concavity_violations = 0;
    int hessian_bound_violations = 0;
    double max_second_difference = 0.0;  // largest (least negative) value seen
    double min_hessian_bound_gap = 0.0;  // smallest slack of the G0 Hessian bound
    double step = 1e-4;
    double tolerance = 1e-8;
    bool pass = false;
};

/// Sampling certificate for concavity of
///   G(eta) = sigma_k(mu)/sigma_{k-1}(mu) - h / sigma_{k-1}(mu),  mu = t eta + (1-t) tr(eta) e,
/// on Gamma_{k-1}, plus the bound
///   -D^2 G0[d,d] >= -(1 + 1/(k+1)) G0^{-1} (D G0 . d)^2,  G0 = -1/sigma_{k-1}(mu).
ConcavityReport concavity_certificate(int n, int k, int samples, std::uint64_t seed);

struct C0Report {
    bool applicable = false;
    std::string note;
    std::size_t argmax = 0;
    std::size_t argmin = 0;
    double u_max = 0.0;
    double u_min = 0.0;
    double h = 0.0;        // grid spacing, the truncation slack scale
    // At argmax: quotient of the background comparison tensor vs of V; the
    // comparison holds when background_at_max >= state_at_max.
    double background_at_max = 0.0;
    double state_at_max = 0.0;
    double slack_at_max = 0.0;  // max(0, state - background)
    double background_at_min = 0.0;
    double state_at_min = 0.0;
    double slack_at_min = 0.0;  // max(0, background - state)
    // e^{2k u} at the extrema, the quantity the comparison controls.
    double exp_2ku_at_max = 0.0;
    double exp_2ku_at_min = 0.0;
    // Bounds on u implied by the comparison at the extrema.
    double upper_bound = 0.0;
    double lower_bound = 0.0;
};

C0Report c0_diagnostic(const ScalarField& u, double t, const ProblemSpec& spec);

}  // namespace sigmak
