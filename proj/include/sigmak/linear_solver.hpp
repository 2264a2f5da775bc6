#pragma once

#include <cstddef>
#include <string>

#include <Eigen/SparseCore>

namespace sigmak {

struct LinearSolveOptions {
    double relative_tolerance = 1e-10;
    /// 0 selects 10 * system size.
    std::size_t max_iterations = 0;
    /// Systems up to this size fall back to a dense LU when the Krylov solve fails.
    std::size_t dense_limit = 4096;
};

struct LinearSolveStats {
    std::string method;
    long iterations = 0;
    double relative_residual = 0.0;
};

/// Solves A x = b for a nonsymmetric sparse A: BiCGSTAB with Jacobi
/// preconditioning first; on failure a dense LU for systems up to
/// `dense_limit`, a sparse LU above it.
/// Throws LinearSolveError when no method reaches the tolerance.
Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double, Eigen::RowMajor>& A, const Eigen::VectorXd& b,
                             const LinearSolveOptions& options = {}, LinearSolveStats* stats = nullptr);

}  // namespace sigmak
