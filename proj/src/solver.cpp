#include "stfosls/solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <iostream>
#include <random>

namespace stfosls {

PcgResult pcg(const ApplyFn& apply_A, const Vector& diag, const Vector& rhs,
              const PcgConfig& config) {
  if (!(config.rel_tol > 0)) throw std::runtime_error("pcg: tolerance must be positive");
  for (int i = 0; i < diag.size(); ++i)
    if (!(diag(i) > 0)) throw std::runtime_error("pcg: preconditioner diagonal not positive");

  PcgResult res;
  const int n = static_cast<int>(rhs.size());
  res.x = Vector::Zero(n);
  const Vector invd = diag.cwiseInverse();

  Vector r = rhs;
  Vector z = invd.cwiseProduct(r);
  double rho = r.dot(z);
  const double rhs_norm = std::sqrt(rhs.dot(invd.cwiseProduct(rhs)));
  if (rhs_norm == 0.0) {
    res.converged = true;
    return res;
  }
  Vector p = z;

  for (int it = 0; it < config.max_iter; ++it) {
    const double relres = std::sqrt(rho) / rhs_norm;
    if (config.verbose) std::cerr << "iter " << it << " relres " << relres << '\n';
    if (relres <= config.rel_tol) {
      res.iterations = it;
      res.rel_residual = relres;
      res.converged = true;
      return res;
    }
    const Vector Ap = apply_A(p);
    const double alpha = rho / p.dot(Ap);
    res.x += alpha * p;
    r -= alpha * Ap;
    z = invd.cwiseProduct(r);
    const double rho_new = r.dot(z);
    p = z + (rho_new / rho) * p;
    rho = rho_new;
  }
  res.iterations = config.max_iter;
  res.rel_residual = std::sqrt(rho) / rhs_norm;
  res.converged = false;
  return res;
}

Eigen::MatrixXd probe_dense(const ApplyFn& apply, int dim) {
  Eigen::MatrixXd M(dim, dim);
  Vector e = Vector::Zero(dim);
  for (int j = 0; j < dim; ++j) {
    e(j) = 1.0;
    M.col(j) = apply(e);
    e(j) = 0.0;
  }
  return M;
}

namespace {

EigResult dense_path(const ApplyFn& apply_A, const ApplyFn& apply_B, int dim) {
  Eigen::MatrixXd A = probe_dense(apply_A, dim);
  Eigen::MatrixXd B = probe_dense(apply_B, dim);
  A = 0.5 * (A + A.transpose());
  B = 0.5 * (B + B.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("extremal_generalized_eigs: B is numerically indefinite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense generalized eigensolver failed");
  EigResult r;
  r.lambda_min = es.eigenvalues().minCoeff();
  r.lambda_max = es.eigenvalues().maxCoeff();
  r.converged = true;
  return r;
}

// Lanczos iteration for B^{-1} A in the B inner product with full
// reorthogonalization; B is applied through its sparse Cholesky factor.
EigResult lanczos_path(const ApplyFn& apply_A, const ApplyFn& apply_B, const SpMat& B_sparse,
                       int dim, const EigOptions& opt) {
  Eigen::SimplicialLDLT<SpMat> ldlt(B_sparse);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("extremal_generalized_eigs: B is numerically indefinite");
  if ((ldlt.vectorD().array() <= 0.0).any())
    throw std::runtime_error("extremal_generalized_eigs: B is numerically indefinite");

  std::mt19937 rng(20240717);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector q = Vector::NullaryExpr(dim, [&](Eigen::Index) { return gauss(rng); });

  std::vector<Vector> Q, BQ;
  Vector bq = apply_B(q);
  q /= std::sqrt(q.dot(bq));
  bq = apply_B(q);
  Q.push_back(q);
  BQ.push_back(bq);

  std::vector<double> alpha, beta;
  EigResult res;
  const int kmax = std::min(opt.max_iter, dim);
  for (int k = 0; k < kmax; ++k) {
    Vector z = ldlt.solve(apply_A(Q[k]));
    const double a = z.dot(BQ[k]);
    alpha.push_back(a);
    z -= a * Q[k];
    if (k > 0) z -= beta[k - 1] * Q[k - 1];
    for (int pass = 0; pass < 2; ++pass)
      for (size_t i = 0; i < Q.size(); ++i) z -= BQ[i].dot(z) * Q[i];

    const double b = std::sqrt(std::max(0.0, z.dot(apply_B(z))));
    const int m = k + 1;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const auto& ev = es.eigenvalues();
    const auto& V = es.eigenvectors();
    const double rlo = std::abs(b * V(m - 1, 0));
    const double rhi = std::abs(b * V(m - 1, m - 1));
    res.lambda_min = ev(0);
    res.lambda_max = ev(m - 1);
    res.iterations = m;
    if (opt.verbose)
      std::cerr << "lanczos " << m << " lo " << ev(0) << " (" << rlo << ") hi " << ev(m - 1)
                << " (" << rhi << ")\n";
    if (rlo <= opt.tol * std::abs(ev(0)) && rhi <= opt.tol * std::abs(ev(m - 1))) {
      res.converged = true;
      return res;
    }
    if (b < 1e-14 * std::abs(ev(m - 1))) {  // invariant subspace exhausted
      res.converged = true;
      return res;
    }
    beta.push_back(b);
    Q.push_back(z / b);
    BQ.push_back(apply_B(Q.back()));
  }
  return res;
}

}  // namespace

EigResult extremal_generalized_eigs(const ApplyFn& apply_A, const ApplyFn& apply_B,
                                    const SpMat& B_sparse, int dim, const EigOptions& options) {
  if (dim <= options.dense_limit) return dense_path(apply_A, apply_B, dim);
  return lanczos_path(apply_A, apply_B, B_sparse, dim, options);
}

}  // namespace stfosls
