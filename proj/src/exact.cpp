#include "stfosls/exact.hpp"

namespace stfosls {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Vec2 ExactSolution::velocity(double t, const Vec2& x) const {
  const double e = std::exp(-t);
  return {e * std::sin(kPi * x.x) * std::cos(kPi * x.y),
          -e * std::cos(kPi * x.x) * std::sin(kPi * x.y)};
}

Vec2 ExactSolution::velocity_dt(double t, const Vec2& x) const {
  return -1.0 * velocity(t, x);
}

Mat2 ExactSolution::velocity_grad(double t, const Vec2& x) const {
  const double e = std::exp(-t);
  const double cc = std::cos(kPi * x.x) * std::cos(kPi * x.y);
  const double ss = std::sin(kPi * x.x) * std::sin(kPi * x.y);
  Mat2 g;
  g.g[0][0] = kPi * e * cc;
  g.g[0][1] = -kPi * e * ss;
  g.g[1][0] = kPi * e * ss;
  g.g[1][1] = -kPi * e * cc;
  return g;
}

Sym2 ExactSolution::deformation(double t, const Vec2& x) const {
  const Mat2 g = velocity_grad(t, x);
  return {2.0 * g.g[0][0], g.g[0][1] + g.g[1][0], 2.0 * g.g[1][1]};
}

double ExactSolution::pressure(double t, const Vec2& x) const {
  return std::exp(-t) * std::sin(kPi * (x.x - x.y));
}

Vec2 ExactSolution::pressure_grad(double t, const Vec2& x) const {
  const double c = kPi * std::exp(-t) * std::cos(kPi * (x.x - x.y));
  return {c, -c};
}

Sym2 ExactSolution::stress(double t, const Vec2& x) const {
  Sym2 w = (-viscosity) * deformation(t, x);
  const double p = pressure(t, x);
  w.xx += p;
  w.yy += p;
  return w;
}

Vec2 ExactSolution::forcing(double t, const Vec2& x) const {
  // each velocity component is a Laplace eigenfunction: lap u = -2 pi^2 u
  const Vec2 u = velocity(t, x);
  return (2.0 * kPi * kPi * viscosity - 1.0) * u + pressure_grad(t, x);
}

ProblemData ExactSolution::problem_data() const {
  ProblemData d = ProblemData::zero();
  d.viscosity = viscosity;
  const ExactSolution ex = *this;
  d.f = [ex](double t, const Vec2& x) { return ex.forcing(t, x); };
  d.u0 = [ex](const Vec2& x) { return ex.velocity(0.0, x); };
  return d;
}

SlipCheckResult check_slip_compatibility(const Triangulation& tri,
                                         const std::function<Vec2(double, const Vec2&)>& u,
                                         const std::function<Mat2(double, const Vec2&)>& grad_u,
                                         double tol) {
  SlipCheckResult res;
  const auto g = gauss_legendre_01(5);
  const double times[3] = {0.0, 0.371, 1.0};
  for (int e = 0; e < tri.num_edges(); ++e) {
    const Edge& E = tri.edges[e];
    if (!E.boundary()) continue;
    const Vec2 a = tri.vertices[E.v[0]], b = tri.vertices[E.v[1]];
    const Vec2 n = tri.edge_normal[e];
    const Vec2 tau = rot_ccw(n);
    for (double t : times) {
      for (const auto& q : g) {
        const Vec2 x = a + q.x * (b - a);
        const double un = dot(u(t, x), n);
        const Mat2 gr = grad_u(t, x);
        const Sym2 D{2 * gr.g[0][0], gr.g[0][1] + gr.g[1][0], 2 * gr.g[1][1]};
        const double tn = dot(D.apply(n), tau);
        const double v = std::max(std::abs(un), std::abs(tn));
        if (v > res.worst) {
          res.worst = v;
          res.time = t;
          res.point = x;
        }
        if (v > tol && res.pass) {
          res.pass = false;
          res.time = t;
          res.point = x;
          res.worst = v;
        }
      }
    }
  }
  res.pass = res.worst <= tol;
  return res;
}

ErrorReport compute_errors(const FoslsSystem& system, const ExactSolution& exact,
                           const Vector& x) {
  const FeSpaces& sp = system.spaces();
  const Triangulation& tri = sp.mesh->space;
  const Blocks& b = system.blocks();
  const ProblemData& data = system.data();
  const auto tg = gauss_legendre_01(data.time_quad_points);
  const int nodes = b.slabs + 1;

  double u_h1 = 0, u_div = 0, w_l2 = 0, pde = 0, p_l2 = 0;
  std::vector<Vec2> uval(nodes);
  std::vector<Mat2> ugrad(nodes);
  std::vector<double> divval(nodes);

  for (int t = 0; t < tri.num_triangles(); ++t) {
    for (const IntegrationCell& cell : sp.cells[t]) {
      auto rule = triangle_rule(cell.p[0], cell.p[1], cell.p[2], data.space_quad_degree);
      for (const auto& q : rule) {
        const auto uev = sp.eval_velocity_in_cell(t, q.p, cell.ps);
        const auto wev = sp.eval_stress_in_cell(t, q.p, cell.ct);
        for (int m = 0; m < nodes; ++m) {
          Vec2 u;
          Mat2 gg;
          double dv = 0;
          for (const auto& ev : uev) {
            const double c = x(b.u_index(m, ev.dof));
            u += c * ev.value;
            dv += c * ev.div;
            for (int i = 0; i < 2; ++i)
              for (int jj = 0; jj < 2; ++jj) gg.g[i][jj] += c * ev.grad.g[i][jj];
          }
          uval[m] = u;
          ugrad[m] = gg;
          divval[m] = dv;
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
            Vec2 u{th[0] * uval[j].x + th[1] * uval[j + 1].x,
                   th[0] * uval[j].y + th[1] * uval[j + 1].y};
            Mat2 g;
            for (int i = 0; i < 2; ++i)
              for (int jj = 0; jj < 2; ++jj)
                g.g[i][jj] = th[0] * ugrad[j].g[i][jj] + th[1] * ugrad[j + 1].g[i][jj];
            const double du = th[0] * divval[j] + th[1] * divval[j + 1];

            const Vec2 du_err = exact.velocity(time, q.p) - u;
            Mat2 dg = exact.velocity_grad(time, q.p);
            for (int i = 0; i < 2; ++i)
              for (int jj = 0; jj < 2; ++jj) dg.g[i][jj] -= g.g[i][jj];
            u_h1 += wt * (dot(du_err, du_err) + frob(dg, dg));
            // exact divergence vanishes identically
            u_div += wt * (du * du + dtdiv * dtdiv);

            const Sym2 dw = exact.stress(time, q.p) - w;
            w_l2 += wt * frob(dw, dw);

            const Vec2 dpde = exact.forcing(time, q.p) - (dtu + divw);
            pde += wt * dot(dpde, dpde);

            const double dp = exact.pressure(time, q.p) - p;
            p_l2 += wt * dp * dp;
          }
        }
      }
    }
  }

  ErrorReport rep;
  rep.err_u = std::sqrt(u_h1 + u_div);
  rep.err_w = std::sqrt(w_l2);
  rep.err_pde = std::sqrt(pde);
  rep.err_p = std::sqrt(p_l2);
  rep.eta = system.estimator(x).eta();
  return rep;
}

}  // namespace stfosls
