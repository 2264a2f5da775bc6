#pragma once

#include <string>

#include "sigmak/config.hpp"

namespace sigmak {

enum ExitCode : int { kExitOk = 0, kExitPathFailure = 1, kExitInvalidConfig = 2, kExitIo = 3 };

/// Property suites for sigma_k on Gamma_k samples, concavity sampling and the
/// ellipticity certificate at u == 0; writes <out>/certificates.txt when `out`
/// is non-empty. Exit 0 iff every suite passes.
int run_check(const RunConfig& cfg, const std::string& out);

/// Continuation (cases A, B) or direct Newton (case C); writes trace.csv,
/// u_final.field, report.txt, report.json and config.txt.
int run_solve(const RunConfig& cfg, const std::string& out);

/// Manufactured-solution convergence study at N and 2N; writes verify.txt,
/// the two solution fields and config.txt.
int run_verify(const RunConfig& cfg, const std::string& out);

/// Continuous derivatives of a closed-form expression at x, by fourth-order
/// central differences with step `step`.
LocalDerivatives expression_derivatives(const Expr& e, std::span<const double> x, double step = 1e-3);

/// Right-hand side f for which u* solves the case A (t = 1) or case C
/// equation with the problem's alpha and background, evaluated from the
/// continuous derivatives of u*. Throws ConfigError when the tensor of u*
/// leaves the required cone or the resulting f is not positive.
ScalarField manufactured_f(const ProblemSpec& spec, const Expr& u_star);

}  // namespace sigmak
