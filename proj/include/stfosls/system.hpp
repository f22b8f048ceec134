#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "stfosls/spaces.hpp"

namespace stfosls {

// Norm used for the divergence component of the residual and of the solution
// norm: H^1(I;L2) (the well-posed formulation) or plain L2(I;L2).
enum class DivergenceNorm { h1_in_time, l2_in_time };

using SpMat = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

struct ProblemData {
  double viscosity = 1.0;
  std::function<Vec2(double, const Vec2&)> f;      // momentum data
  std::function<double(double, const Vec2&)> g;    // divergence data
  std::function<double(double, const Vec2&)> g_t;  // its time derivative
  std::function<Vec2(const Vec2&)> u0;             // initial velocity
  int time_quad_points = 5;                        // data quadrature in time
  int space_quad_degree = 7;                       // data quadrature in space

  static ProblemData zero() {
    ProblemData d;
    d.f = [](double, const Vec2&) { return Vec2{0, 0}; };
    d.g = [](double, const Vec2&) { return 0.0; };
    d.g_t = [](double, const Vec2&) { return 0.0; };
    d.u0 = [](const Vec2&) { return Vec2{0, 0}; };
    return d;
  }
};

// Layout of the monolithic coefficient vector: velocity nodes (time-major),
// then stress slabs, then pressure slabs.
struct Blocks {
  int n_u = 0, n_w = 0, n_p = 0;
  int slabs = 0;

  int dim() const { return (slabs + 1) * n_u + slabs * (n_w + n_p); }
  int u_index(int node, int i) const { return node * n_u + i; }
  int w_index(int slab, int a) const { return (slabs + 1) * n_u + slab * n_w + a; }
  int p_index(int slab, int k) const {
    return (slabs + 1) * n_u + slabs * (n_w) + slab * n_p + k;
  }
};

struct ResidualDecomposition {
  double r_stress = 0;      // |w + T(nu u, p)|^2
  double r_momentum = 0;    // |f - (du/dt + div w)|^2
  double r_divergence = 0;  // |g - div u|^2 in the configured norm
  double r_initial = 0;     // |u0 - u(0,.)|^2
  double r_mean = 0;        // |M p|^2
  double total() const { return r_stress + r_momentum + r_divergence + r_initial + r_mean; }
  double eta() const { return std::sqrt(total()); }
};

// Matrix-free least-squares normal operator, solution-norm Gram operator,
// right-hand side, diagonal, and a posteriori estimator. Everything is built
// from per-triangle spatial Gram matrices combined with exact temporal
// integration slab by slab.
class FoslsSystem {
 public:
  FoslsSystem(const FeSpaces& spaces, ProblemData data,
              DivergenceNorm div_norm = DivergenceNorm::h1_in_time, int assembly_degree = 4);

  const Blocks& blocks() const { return blocks_; }
  int dim() const { return blocks_.dim(); }
  DivergenceNorm divergence_norm() const { return div_norm_; }
  const FeSpaces& spaces() const { return *spaces_; }
  const ProblemData& data() const { return data_; }

  // y = A x with <A x, z> = <Gbar x, Gbar z>_F for all z
  Vector apply_normal(const Vector& x) const;
  // y = B x, the Gram operator of the squared solution norm
  Vector apply_xnorm(const Vector& x) const;
  // <Gbar x, Gbar y>_F
  double gbar_product(const Vector& x, const Vector& y) const;
  // <M p_x, M p_y>_{L2(I)} (pressure blocks of two coefficient vectors)
  double m_pairing(const Vector& x, const Vector& y) const;

  Vector assemble_rhs() const;        // z -> <F, Gbar z>_F
  Vector diagonal() const;            // exact diagonal of A
  double fnorm_squared() const;       // |F|_F^2 by quadrature
  ResidualDecomposition estimator(const Vector& x) const;

  // explicit sparse representation of B (it has no global coupling), used by
  // the factorization-based eigensolver
  SpMat assemble_xnorm_sparse() const;

  // spatial Gram matrices (exposed for tests and diagnostics)
  const SpMat& velocity_mass() const { return Mv_; }
  const SpMat& velocity_h1() const { return Hv_; }
  const SpMat& deformation_gram() const { return Dv_; }
  const SpMat& velocity_div_gram() const { return DIVv_; }
  const SpMat& stress_mass() const { return Mw_; }
  const SpMat& stress_div_gram() const { return DIVw_; }
  // <D(chi_i), Id 1_K> = 2 int_K div chi_i, per velocity dof and triangle
  const SpMat& velocity_div_means() const { return Tu_sp_; }

 private:
  const FeSpaces* spaces_;
  ProblemData data_;
  DivergenceNorm div_norm_;
  Blocks blocks_;
  double domain_area_ = 0;

  // spatial Gram matrices; velocity block size n_u, stress n_w, pressure n_p
  SpMat Mv_, Gv_, Hv_, Dv_, DIVv_;      // velocity x velocity
  SpMat Mw_, DIVw_;                     // stress x stress
  SpMat Cwd_, CwdT_;                    // <W_a, D(chi_i)> and transpose
  SpMat Cvw_, CvwT_;                    // <chi_i, div W_a> and transpose
  SpMat Tw_sp_, TwT_sp_;                // <W_a, Id 1_K> = int_K tr W_a
  SpMat Tu_sp_, TuT_sp_;                // <D(chi_i), Id 1_K>
  Vector areas_;                        // |K| per pressure dof

  void assemble_spatial(int degree);
};

}  // namespace stfosls
