#pragma once

#include "stfosls/system.hpp"

namespace stfosls {

// Manufactured divergence-free solution used by the convergence studies:
// the velocity is exp(-t) curl(sin(pi x1) sin(pi x2) / pi) and the pressure
// exp(-t) sin(pi (x1 - x2)); both satisfy the slip conditions on the two
// polygonal domains. All derivatives are hand-coded.
struct ExactSolution {
  double viscosity = 1.0;

  Vec2 velocity(double t, const Vec2& x) const;
  Vec2 velocity_dt(double t, const Vec2& x) const;
  Mat2 velocity_grad(double t, const Vec2& x) const;
  Sym2 deformation(double t, const Vec2& x) const;  // D(u)
  double pressure(double t, const Vec2& x) const;
  Vec2 pressure_grad(double t, const Vec2& x) const;
  Sym2 stress(double t, const Vec2& x) const;  // w = -nu D(u) + p Id
  Vec2 forcing(double t, const Vec2& x) const;  // du/dt - nu lap u + grad p

  ProblemData problem_data() const;
};

struct SlipCheckResult {
  bool pass = true;
  double worst = 0.0;
  double time = 0.0;
  Vec2 point;
};

// Evaluates u.n and (D(u) n).tau at boundary quadrature points of the mesh
// for a few time samples; reports the first violation beyond the tolerance.
SlipCheckResult check_slip_compatibility(const Triangulation& tri,
                                         const std::function<Vec2(double, const Vec2&)>& u,
                                         const std::function<Mat2(double, const Vec2&)>& grad_u,
                                         double tol = 1e-12);

struct ErrorReport {
  double err_u = 0;    // (|u-u_h|^2_{L2(I;H1)} + |div(u-u_h)|^2_{H1(I;L2)})^{1/2}
  double err_w = 0;    // L2(I x Omega) tensor norm
  double err_pde = 0;  // |f - (du_h/dt + div w_h)|_{L2}
  double err_p = 0;    // L2(I x Omega)
  double eta = 0;      // least-squares estimator
};

ErrorReport compute_errors(const FoslsSystem& system, const ExactSolution& exact,
                           const Vector& x);

}  // namespace stfosls
