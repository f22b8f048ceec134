#include "stfosls/system.hpp"

#include <vector>

namespace stfosls {

namespace {

struct TripletList {
  std::vector<Eigen::Triplet<double>> t;
  void add(int i, int j, double v) {
    if (v != 0.0) t.emplace_back(i, j, v);
  }
  SpMat build(int rows, int cols) {
    SpMat m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
  }
};

inline Sym2 sym_of(const Mat2& g) {
  return {2.0 * g.g[0][0], g.g[0][1] + g.g[1][0], 2.0 * g.g[1][1]};
}

}  // namespace

FoslsSystem::FoslsSystem(const FeSpaces& sp, ProblemData data, DivergenceNorm div_norm,
                         int assembly_degree)
    : spaces_(&sp), data_(std::move(data)), div_norm_(div_norm) {
  if (!data_.f) data_.f = [](double, const Vec2&) { return Vec2{0, 0}; };
  if (!data_.g) data_.g = [](double, const Vec2&) { return 0.0; };
  if (!data_.g_t) data_.g_t = [](double, const Vec2&) { return 0.0; };
  if (!data_.u0) data_.u0 = [](const Vec2&) { return Vec2{0, 0}; };
  if (!(data_.viscosity > 0)) throw std::runtime_error("viscosity must be positive");

  blocks_.n_u = sp.velocity.dim;
  blocks_.n_w = sp.stress.dim;
  blocks_.n_p = sp.pressure.dim;
  blocks_.slabs = sp.mesh->time.num_intervals();
  domain_area_ = sp.mesh->space.domain_area();

  assemble_spatial(assembly_degree);
}

void FoslsSystem::assemble_spatial(int degree) {
  const FeSpaces& sp = *spaces_;
  const Triangulation& tri = sp.mesh->space;
  const int nu = blocks_.n_u, nw = blocks_.n_w, np = blocks_.n_p;

  TripletList mv, gv, dv, divv, mw, divw, cwd, cvw, tw, tu;
  areas_ = Vector::Zero(np);
  for (int t = 0; t < tri.num_triangles(); ++t) areas_(t) = tri.tri_area(t);

  for (int t = 0; t < tri.num_triangles(); ++t) {
    for (const IntegrationCell& cell : sp.cells[t]) {
      auto rule = triangle_rule(cell.p[0], cell.p[1], cell.p[2], degree);
      for (const auto& q : rule) {
        const auto uev = sp.eval_velocity_in_cell(t, q.p, cell.ps);
        const auto wev = sp.eval_stress_in_cell(t, q.p, cell.ct);
        const double w = q.w;
        for (size_t i = 0; i < uev.size(); ++i) {
          const auto& a = uev[i];
          const Sym2 Da = sym_of(a.grad);
          for (size_t j = 0; j < uev.size(); ++j) {
            const auto& b = uev[j];
            mv.add(a.dof, b.dof, w * dot(a.value, b.value));
            gv.add(a.dof, b.dof, w * frob(a.grad, b.grad));
            dv.add(a.dof, b.dof, w * frob(Da, sym_of(b.grad)));
            divv.add(a.dof, b.dof, w * a.div * b.div);
          }
          for (const auto& s : wev) {
            if (s.dof < 0) continue;
            cwd.add(s.dof, a.dof, w * frob(s.value, Da));
            cvw.add(a.dof, s.dof, w * dot(a.value, s.divergence));
          }
          tu.add(a.dof, t, w * 2.0 * a.div);
        }
        for (const auto& s : wev) {
          if (s.dof < 0) continue;
          for (const auto& r : wev) {
            if (r.dof < 0) continue;
            mw.add(s.dof, r.dof, w * frob(s.value, r.value));
            divw.add(s.dof, r.dof, w * dot(s.divergence, r.divergence));
          }
          tw.add(s.dof, t, w * s.value.trace());
        }
      }
    }
  }

  Mv_ = mv.build(nu, nu);
  Gv_ = gv.build(nu, nu);
  Hv_ = Mv_ + Gv_;
  Dv_ = dv.build(nu, nu);
  DIVv_ = divv.build(nu, nu);
  Mw_ = mw.build(nw, nw);
  DIVw_ = divw.build(nw, nw);
  Cwd_ = cwd.build(nw, nu);
  CwdT_ = Cwd_.transpose();
  Cvw_ = cvw.build(nu, nw);
  CvwT_ = Cvw_.transpose();
  Tw_sp_ = tw.build(nw, np);
  TwT_sp_ = Tw_sp_.transpose();
  Tu_sp_ = tu.build(nu, np);
  TuT_sp_ = Tu_sp_.transpose();
}

// --------------------------------------------------------------------------
// Operator applications. On a slab J = (t_j, t_{j+1}) of length tau the
// velocity is u(t) = ubar + (t - tmid) a with ubar the mean of the endpoint
// coefficients and a their difference quotient; time integrals of products
// of such affine factors reduce to tau times the midpoint pairing plus
// tau^3/12 times the slope pairing.
// --------------------------------------------------------------------------

Vector FoslsSystem::apply_normal(const Vector& x) const {
  const Blocks& b = blocks_;
  const double nuv = data_.viscosity;
  Vector y = Vector::Zero(b.dim());
  const bool h1div = div_norm_ == DivergenceNorm::h1_in_time;
  const double inv_sqrt_area = 1.0 / std::sqrt(domain_area_);

  for (int j = 0; j < b.slabs; ++j) {
    const double tau = spaces_->mesh->time.length(j);
    const auto U0 = x.segment(b.u_index(j, 0), b.n_u);
    const auto U1 = x.segment(b.u_index(j + 1, 0), b.n_u);
    const auto W = x.segment(b.w_index(j, 0), b.n_w);
    const auto P = x.segment(b.p_index(j, 0), b.n_p);
    const Vector ub = 0.5 * (U0 + U1);
    const Vector a = (U1 - U0) / tau;

    // r1 = |w + nu D(u) - p Id|^2
    Vector y_mid = tau * (nuv * (CwdT_ * W) + nuv * nuv * (Dv_ * ub) - nuv * (Tu_sp_ * P));
    Vector y_slope = (tau * tau * tau / 12.0) * (nuv * nuv) * (Dv_ * a);
    Vector y_w = tau * (Mw_ * W + nuv * (Cwd_ * ub) - Tw_sp_ * P);
    Vector y_p = tau * (-(TwT_sp_ * W) - nuv * (TuT_sp_ * ub));
    y_p += tau * 2.0 * (areas_.array() * P.array()).matrix();

    // r2 = |du/dt + div w|^2
    y_slope += tau * (Mv_ * a + Cvw_ * W);
    y_w += tau * (CvwT_ * a + DIVw_ * W);

    // r3 = |div u|^2 in the configured norm
    y_mid += tau * (DIVv_ * ub);
    y_slope += (tau * tau * tau / 12.0) * (DIVv_ * a);
    if (h1div) y_slope += tau * (DIVv_ * a);

    // r5 = |M p|^2, a rank-one term per slab
    const double mu = inv_sqrt_area * areas_.dot(P);
    y_p += (tau * mu * inv_sqrt_area) * areas_;

    y.segment(b.u_index(j, 0), b.n_u) += 0.5 * y_mid - y_slope / tau;
    y.segment(b.u_index(j + 1, 0), b.n_u) += 0.5 * y_mid + y_slope / tau;
    y.segment(b.w_index(j, 0), b.n_w) += y_w;
    y.segment(b.p_index(j, 0), b.n_p) += y_p;
  }

  // r4 = |u(0,.)|^2
  y.segment(0, b.n_u) += Mv_ * x.segment(0, b.n_u);
  return y;
}

Vector FoslsSystem::apply_xnorm(const Vector& x) const {
  const Blocks& b = blocks_;
  Vector y = Vector::Zero(b.dim());
  const bool h1div = div_norm_ == DivergenceNorm::h1_in_time;

  for (int j = 0; j < b.slabs; ++j) {
    const double tau = spaces_->mesh->time.length(j);
    const auto U0 = x.segment(b.u_index(j, 0), b.n_u);
    const auto U1 = x.segment(b.u_index(j + 1, 0), b.n_u);
    const auto W = x.segment(b.w_index(j, 0), b.n_w);
    const auto P = x.segment(b.p_index(j, 0), b.n_p);
    const Vector ub = 0.5 * (U0 + U1);
    const Vector a = (U1 - U0) / tau;

    Vector y_mid = tau * (Hv_ * ub);
    Vector y_slope = (tau * tau * tau / 12.0) * (Hv_ * a);
    Vector y_w = tau * (Mw_ * W);

    y_slope += tau * (Mv_ * a + Cvw_ * W);
    y_w += tau * (CvwT_ * a + DIVw_ * W);

    y_mid += tau * (DIVv_ * ub);
    y_slope += (tau * tau * tau / 12.0) * (DIVv_ * a);
    if (h1div) y_slope += tau * (DIVv_ * a);

    Vector y_p = tau * (areas_.array() * P.array()).matrix();

    y.segment(b.u_index(j, 0), b.n_u) += 0.5 * y_mid - y_slope / tau;
    y.segment(b.u_index(j + 1, 0), b.n_u) += 0.5 * y_mid + y_slope / tau;
    y.segment(b.w_index(j, 0), b.n_w) += y_w;
    y.segment(b.p_index(j, 0), b.n_p) += y_p;
  }
  return y;
}

double FoslsSystem::gbar_product(const Vector& x, const Vector& y) const {
  return y.dot(apply_normal(x));
}

SpMat FoslsSystem::assemble_xnorm_sparse() const {
  const Blocks& b = blocks_;
  const bool h1div = div_norm_ == DivergenceNorm::h1_in_time;
  std::vector<Eigen::Triplet<double>> trip;

  auto add_block = [&trip](int row0, int col0, const SpMat& m, double scale) {
    if (scale == 0.0) return;
    for (int k = 0; k < m.outerSize(); ++k)
      for (SpMat::InnerIterator it(m, k); it; ++it)
        trip.emplace_back(row0 + static_cast<int>(it.row()), col0 + static_cast<int>(it.col()),
                          scale * it.value());
  };

  const SpMat Sval = Hv_ + DIVv_;
  const SpMat Sder = h1div ? SpMat(Mv_ + DIVv_) : Mv_;
  const SpMat Sww = Mw_ + DIVw_;

  for (int j = 0; j < b.slabs; ++j) {
    const double tau = spaces_->mesh->time.length(j);
    const int u0 = b.u_index(j, 0), u1 = b.u_index(j + 1, 0);
    const int w0 = b.w_index(j, 0), p0 = b.p_index(j, 0);

    add_block(u0, u0, Sval, tau / 3.0);
    add_block(u1, u1, Sval, tau / 3.0);
    add_block(u0, u1, Sval, tau / 6.0);
    add_block(u1, u0, Sval, tau / 6.0);
    add_block(u0, u0, Sder, 1.0 / tau);
    add_block(u1, u1, Sder, 1.0 / tau);
    add_block(u0, u1, Sder, -1.0 / tau);
    add_block(u1, u0, Sder, -1.0 / tau);

    add_block(u0, w0, Cvw_, -1.0);
    add_block(u1, w0, Cvw_, 1.0);
    add_block(w0, u0, CvwT_, -1.0);
    add_block(w0, u1, CvwT_, 1.0);

    add_block(w0, w0, Sww, tau);
    for (int k = 0; k < b.n_p; ++k) trip.emplace_back(p0 + k, p0 + k, tau * areas_(k));
  }

  SpMat B(b.dim(), b.dim());
  B.setFromTriplets(trip.begin(), trip.end());
  B.makeCompressed();
  return B;
}

double FoslsSystem::m_pairing(const Vector& x, const Vector& y) const {
  const Blocks& b = blocks_;
  double s = 0.0;
  for (int j = 0; j < b.slabs; ++j) {
    const double tau = spaces_->mesh->time.length(j);
    const double mx = areas_.dot(x.segment(b.p_index(j, 0), b.n_p));
    const double my = areas_.dot(y.segment(b.p_index(j, 0), b.n_p));
    s += tau * mx * my / domain_area_;
  }
  return s;
}

Vector FoslsSystem::diagonal() const {
  const Blocks& b = blocks_;
  const double nu2 = data_.viscosity * data_.viscosity;
  const bool h1div = div_norm_ == DivergenceNorm::h1_in_time;
  Vector diag = Vector::Zero(b.dim());

  const Vector dMv = Mv_.diagonal();
  const Vector dDv = Dv_.diagonal();
  const Vector dDIVv = DIVv_.diagonal();
  const Vector dMw = Mw_.diagonal();
  const Vector dDIVw = DIVw_.diagonal();

  for (int j = 0; j < b.slabs; ++j) {
    const double tau = spaces_->mesh->time.length(j);
    // int_J theta^2 = tau/3 for the value factors, int_J theta'^2 = 1/tau
    const double val = tau / 3.0, der = 1.0 / tau;
    for (int node : {j, j + 1}) {
      auto seg = diag.segment(b.u_index(node, 0), b.n_u);
      seg += val * nu2 * dDv;
      seg += der * dMv;
      seg += val * dDIVv;
      if (h1div) seg += der * dDIVv;
    }
    diag.segment(b.w_index(j, 0), b.n_w) += tau * (dMw + dDIVw);
    auto segp = diag.segment(b.p_index(j, 0), b.n_p);
    segp += tau * 2.0 * areas_;
    segp += (tau / domain_area_) * (areas_.array() * areas_.array()).matrix();
  }
  diag.segment(0, b.n_u) += dMv;
  return diag;
}

// --------------------------------------------------------------------------
// Data-dependent quantities: right-hand side, |F|^2, estimator.
// --------------------------------------------------------------------------

Vector FoslsSystem::assemble_rhs() const {
  const FeSpaces& sp = *spaces_;
  const Triangulation& tri = sp.mesh->space;
  const Blocks& b = blocks_;
  const bool h1div = div_norm_ == DivergenceNorm::h1_in_time;
  Vector rhs = Vector::Zero(b.dim());
  const auto tg = gauss_legendre_01(data_.time_quad_points);

  for (int t = 0; t < tri.num_triangles(); ++t) {
    for (const IntegrationCell& cell : sp.cells[t]) {
      auto rule = triangle_rule(cell.p[0], cell.p[1], cell.p[2], data_.space_quad_degree);
      for (const auto& q : rule) {
        const auto uev = sp.eval_velocity_in_cell(t, q.p, cell.ps);
        const auto wev = sp.eval_stress_in_cell(t, q.p, cell.ct);
        // initial data pairs with the t = 0 nodal value
        const Vec2 u0 = data_.u0(q.p);
        for (const auto& ev : uev) rhs(b.u_index(0, ev.dof)) += q.w * dot(u0, ev.value);

        for (int j = 0; j < b.slabs; ++j) {
          const double t0 = sp.mesh->time.breakpoints[j];
          const double tau = sp.mesh->time.length(j);
          for (const auto& tq : tg) {
            const double time = t0 + tq.x * tau;
            const double wt = q.w * tq.w * tau;
            const Vec2 f = data_.f(time, q.p);
            const double g = data_.g(time, q.p);
            const double gt = h1div ? data_.g_t(time, q.p) : 0.0;
            const double th[2] = {1.0 - tq.x, tq.x};
            for (const auto& ev : uev) {
              const double fdot = dot(f, ev.value);
              const double slope = wt * (fdot + gt * ev.div) / tau;
              rhs(b.u_index(j, ev.dof)) += -slope + wt * g * th[0] * ev.div;
              rhs(b.u_index(j + 1, ev.dof)) += slope + wt * g * th[1] * ev.div;
            }
            for (const auto& ev : wev) {
              if (ev.dof < 0) continue;
              rhs(b.w_index(j, ev.dof)) += wt * dot(f, ev.divergence);
            }
          }
        }
      }
    }
  }
  return rhs;
}

double FoslsSystem::fnorm_squared() const {
  const FeSpaces& sp = *spaces_;
  const Triangulation& tri = sp.mesh->space;
  const bool h1div = div_norm_ == DivergenceNorm::h1_in_time;
  const auto tg = gauss_legendre_01(data_.time_quad_points);
  double s = 0.0;
  for (int t = 0; t < tri.num_triangles(); ++t) {
    for (const IntegrationCell& cell : sp.cells[t]) {
    auto rule = triangle_rule(cell.p[0], cell.p[1], cell.p[2], data_.space_quad_degree);
    for (const auto& q : rule) {
      for (int j = 0; j < blocks_.slabs; ++j) {
        const double t0 = sp.mesh->time.breakpoints[j];
        const double tau = sp.mesh->time.length(j);
        for (const auto& tq : tg) {
          const double time = t0 + tq.x * tau;
          const Vec2 f = data_.f(time, q.p);
          const double g = data_.g(time, q.p);
          double v = dot(f, f) + g * g;
          if (h1div) {
            const double gt = data_.g_t(time, q.p);
            v += gt * gt;
          }
          s += q.w * tq.w * tau * v;
        }
      }
      const Vec2 u0 = data_.u0(q.p);
      s += q.w * dot(u0, u0);
    }
    }
  }
  return s;
}

ResidualDecomposition FoslsSystem::estimator(const Vector& x) const {
  const FeSpaces& sp = *spaces_;
  const Triangulation& tri = sp.mesh->space;
  const Blocks& b = blocks_;
  const double nuv = data_.viscosity;
  const bool h1div = div_norm_ == DivergenceNorm::h1_in_time;
  const auto tg = gauss_legendre_01(data_.time_quad_points);
  const int nodes = b.slabs + 1;

  ResidualDecomposition r;
  std::vector<Vec2> uval(nodes);
  std::vector<Sym2> Duval(nodes);
  std::vector<double> divval(nodes);

  for (int t = 0; t < tri.num_triangles(); ++t) {
    for (const IntegrationCell& cell : sp.cells[t]) {
      auto rule = triangle_rule(cell.p[0], cell.p[1], cell.p[2], data_.space_quad_degree);
      for (const auto& q : rule) {
        const auto uev = sp.eval_velocity_in_cell(t, q.p, cell.ps);
        const auto wev = sp.eval_stress_in_cell(t, q.p, cell.ct);
        for (int m = 0; m < nodes; ++m) {
          Vec2 u;
          Sym2 Du;
          double dv = 0;
          for (const auto& ev : uev) {
            const double c = x(b.u_index(m, ev.dof));
            u += c * ev.value;
            Du += c * sym_of(ev.grad);
            dv += c * ev.div;
          }
          uval[m] = u;
          Duval[m] = Du;
          divval[m] = dv;
        }
        {
          const Vec2 diff = data_.u0(q.p) - uval[0];
          r.r_initial += q.w * dot(diff, diff);
        }
        for (int j = 0; j < b.slabs; ++j) {
          const double t0 = sp.mesh->time.breakpoints[j];
          const double tau = sp.mesh->time.length(j);
          Sym2 w;
          Vec2 divw;
          for (const auto& ev : wev) {
            if (ev.dof < 0) continue;
            const double c = x(b.w_index(j, ev.dof));
            w += c * ev.value;
            divw += c * ev.divergence;
          }
          const double p = x(b.p_index(j, t));
          const Vec2 dtu = (uval[j + 1] - uval[j]) / tau;
          const double dtdiv = (divval[j + 1] - divval[j]) / tau;
          for (const auto& tq : tg) {
            const double time = t0 + tq.x * tau;
            const double wt = q.w * tq.w * tau;
            const double th[2] = {1.0 - tq.x, tq.x};
            const Sym2 Du = th[0] * Duval[j] + th[1] * Duval[j + 1];
            const double du = th[0] * divval[j] + th[1] * divval[j + 1];
            Sym2 s1 = w + nuv * Du;
            s1.xx -= p;
            s1.yy -= p;
            r.r_stress += wt * frob(s1, s1);
            const Vec2 s2 = data_.f(time, q.p) - (dtu + divw);
            r.r_momentum += wt * dot(s2, s2);
            const double s3 = data_.g(time, q.p) - du;
            r.r_divergence += wt * s3 * s3;
            if (h1div) {
              const double s3t = data_.g_t(time, q.p) - dtdiv;
              r.r_divergence += wt * s3t * s3t;
            }
          }
        }
      }
    }
  }

  for (int j = 0; j < b.slabs; ++j) {
    const double tau = sp.mesh->time.length(j);
    const double mu = areas_.dot(x.segment(b.p_index(j, 0), b.n_p)) / std::sqrt(domain_area_);
    r.r_mean += tau * mu * mu;
  }
  return r;
}

}  // namespace stfosls
