#pragma once

#include <functional>

#include "stfosls/system.hpp"

namespace stfosls {

using ApplyFn = std::function<Vector(const Vector&)>;

struct PcgConfig {
  double rel_tol = 1e-10;
  int max_iter = 50000;
  bool verbose = false;
};

struct PcgResult {
  Vector x;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

// Conjugate gradients with diagonal (Jacobi) preconditioner. Convergence is
// measured in the preconditioned residual norm relative to the right-hand
// side. With verbose set, lines "iter k relres r" go to standard error.
PcgResult pcg(const ApplyFn& apply_A, const Vector& diag, const Vector& rhs,
              const PcgConfig& config = {});

struct EigOptions {
  int dense_limit = 3000;   // probe + dense solver up to this dimension
  double tol = 1e-8;        // Rayleigh-quotient residual tolerance (iterative path)
  int max_iter = 400;       // Lanczos steps
  bool verbose = false;
};

struct EigResult {
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  int iterations = 0;
  bool converged = false;
  double ratio() const { return std::sqrt(lambda_max / lambda_min); }
};

// Extremal eigenvalues of A x = lambda B x with A symmetric positive
// semi-definite and B symmetric positive definite. Small problems are probed
// into dense matrices and handed to a dense generalized solver; larger ones
// use Lanczos iteration in the B inner product with a sparse factorization
// of B. Throws if B is numerically indefinite.
EigResult extremal_generalized_eigs(const ApplyFn& apply_A, const ApplyFn& apply_B,
                                    const SpMat& B_sparse, int dim,
                                    const EigOptions& options = {});

// Probing assembly: apply the operator to all unit vectors.
Eigen::MatrixXd probe_dense(const ApplyFn& apply, int dim);

}  // namespace stfosls
