#include "sigmak/linear_solver.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "sigmak/errors.hpp"

namespace sigmak {

namespace {

double relative_residual(const Eigen::SparseMatrix<double, Eigen::RowMajor>& A, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& b) {
    const double bn = b.norm();
    const double rn = (b - A * x).norm();
    return bn > 0.0 ? rn / bn : rn;
}

}  // namespace

Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double, Eigen::RowMajor>& A, const Eigen::VectorXd& b,
                             const LinearSolveOptions& options, LinearSolveStats* stats) {
    const auto size = static_cast<std::size_t>(A.rows());
    LinearSolveStats local;
    LinearSolveStats& st = stats ? *stats : local;

    if (b.norm() == 0.0) {
        st = {"trivial", 0, 0.0};
        return Eigen::VectorXd::Zero(A.rows());
    }

    // Accept fallbacks a little above the Krylov target: they are limited by
    // conditioning, not by an iteration budget.
    const double accept = std::max(options.relative_tolerance, 1e-9);

    {
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double, Eigen::RowMajor>, Eigen::DiagonalPreconditioner<double>> krylov;
        krylov.setTolerance(options.relative_tolerance);
        krylov.setMaxIterations(static_cast<Eigen::Index>(options.max_iterations ? options.max_iterations : 10 * size));
        krylov.compute(A);
        if (krylov.info() == Eigen::Success) {
            Eigen::VectorXd x = krylov.solve(b);
            const double rr = relative_residual(A, x, b);
            if (krylov.info() == Eigen::Success && x.allFinite() && rr <= accept) {
                st = {"bicgstab", static_cast<long>(krylov.iterations()), rr};
                return x;
            }
        }
    }

    if (size <= options.dense_limit) {
        const Eigen::MatrixXd dense(A);
        Eigen::VectorXd x = dense.partialPivLu().solve(b);
        const double rr = relative_residual(A, x, b);
        if (x.allFinite() && rr <= accept) {
            st = {"dense_lu", 0, rr};
            return x;
        }
        throw LinearSolveError("dense LU failed: relative residual " + std::to_string(rr));
    }

    Eigen::SparseMatrix<double> colmajor(A);
    colmajor.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(colmajor);
    if (lu.info() != Eigen::Success) throw LinearSolveError("sparse LU factorization failed: " + lu.lastErrorMessage());
    Eigen::VectorXd x = lu.solve(b);
    const double rr = relative_residual(A, x, b);
    if (!x.allFinite() || rr > accept) {
        throw LinearSolveError("sparse LU failed: relative residual " + std::to_string(rr));
    }
    st = {"sparse_lu", 0, rr};
    return x;
}

}  // namespace sigmak
