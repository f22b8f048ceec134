#include <doctest.h>

#include <random>

#include "stfosls/exact.hpp"
#include "stfosls/solver.hpp"

using namespace stfosls;

namespace {

std::mt19937 rng(99);
double urand(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

}  // namespace

TEST_CASE("point values of the exact solution") {
  ExactSolution ex;
  const Vec2 a = ex.velocity(0.0, {0.5, 0.5});
  CHECK(std::abs(a.x) < 1e-15);
  CHECK(std::abs(a.y) < 1e-15);
  const Vec2 b = ex.velocity(0.0, {0.5, 0.25});
  CHECK(b.x == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));
  CHECK(std::abs(b.y) < 1e-15);
}

TEST_CASE("hand-coded derivatives agree with finite differences at random points") {
  ExactSolution ex;
  ex.viscosity = 1.0;
  const double h = 1e-6;
  for (int k = 0; k < 100; ++k) {
    const double t = urand(0, 1);
    const Vec2 x{urand(-0.99, 0.99), urand(-0.99, 0.99)};

    // velocity gradient
    const Mat2 g = ex.velocity_grad(t, x);
    const Vec2 dux = (ex.velocity(t, {x.x + h, x.y}) - ex.velocity(t, {x.x - h, x.y})) / (2 * h);
    const Vec2 duy = (ex.velocity(t, {x.x, x.y + h}) - ex.velocity(t, {x.x, x.y - h})) / (2 * h);
    CHECK(g.g[0][0] == doctest::Approx(dux.x).epsilon(1e-6));
    CHECK(g.g[1][0] == doctest::Approx(dux.y).epsilon(1e-6));
    CHECK(g.g[0][1] == doctest::Approx(duy.x).epsilon(1e-6));
    CHECK(g.g[1][1] == doctest::Approx(duy.y).epsilon(1e-6));

    // time derivative
    const Vec2 dt = (ex.velocity(t + h, x) - ex.velocity(t - h, x)) / (2 * h);
    const Vec2 dte = ex.velocity_dt(t, x);
    CHECK(norm(dt - dte) < 1e-6 * (1 + norm(dte)));

    // pressure gradient
    const Vec2 gp = ex.pressure_grad(t, x);
    CHECK(gp.x == doctest::Approx((ex.pressure(t, {x.x + h, x.y}) -
                                   ex.pressure(t, {x.x - h, x.y})) / (2 * h)).epsilon(1e-6));
    CHECK(gp.y == doctest::Approx((ex.pressure(t, {x.x, x.y + h}) -
                                   ex.pressure(t, {x.x, x.y - h})) / (2 * h)).epsilon(1e-6));

    // forcing against a fully finite-difference momentum residual
    const double lap_u1 =
        (ex.velocity(t, {x.x + h, x.y}).x + ex.velocity(t, {x.x - h, x.y}).x +
         ex.velocity(t, {x.x, x.y + h}).x + ex.velocity(t, {x.x, x.y - h}).x -
         4 * ex.velocity(t, x).x) / (h * h);
    const double lap_u2 =
        (ex.velocity(t, {x.x + h, x.y}).y + ex.velocity(t, {x.x - h, x.y}).y +
         ex.velocity(t, {x.x, x.y + h}).y + ex.velocity(t, {x.x, x.y - h}).y -
         4 * ex.velocity(t, x).y) / (h * h);
    const Vec2 f_fd = dte - ex.viscosity * Vec2{lap_u1, lap_u2} + gp;
    const Vec2 f = ex.forcing(t, x);
    CHECK(norm(f - f_fd) < 2e-4 * (1 + norm(f)));
  }
}

TEST_CASE("the velocity field is divergence-free") {
  ExactSolution ex;
  for (int k = 0; k < 1000; ++k) {
    const double t = urand(0, 1);
    const Vec2 x{urand(-1, 1), urand(-1, 1)};
    const Mat2 g = ex.velocity_grad(t, x);
    CHECK(std::abs(g.trace()) < 1e-12);
  }
}

TEST_CASE("slip compatibility holds on both domains and fails for a broken field") {
  ExactSolution ex;
  auto u = [&](double t, const Vec2& x) { return ex.velocity(t, x); };
  auto gu = [&](double t, const Vec2& x) { return ex.velocity_grad(t, x); };
  for (Domain dom : {Domain::square, Domain::lshape}) {
    PrismMesh mesh = refine_uniform(make_initial_mesh(dom));
    auto rep = check_slip_compatibility(mesh.space, u, gu);
    CHECK(rep.pass);
    CHECK(rep.worst <= 1e-12);
  }

  // adding x1 to the stream function breaks u.n on horizontal edges
  auto ubad = [&](double t, const Vec2& x) { return ex.velocity(t, x) + Vec2{0.0, -1.0}; };
  PrismMesh mesh = make_initial_mesh(Domain::square);
  auto rep = check_slip_compatibility(mesh.space, ubad, gu);
  CHECK(!rep.pass);
  CHECK(rep.worst > 0.5);
}

TEST_CASE("errors of the zero state reduce to data norms") {
  ExactSolution ex;
  PrismMesh mesh = refine_uniform(make_initial_mesh(Domain::square));
  FeSpaces sp = build_spaces(mesh, VelocityBc::slip, true);
  FoslsSystem system(sp, ex.problem_data());
  const Vector zero = Vector::Zero(system.dim());
  auto rep = compute_errors(system, ex, zero);

  // |w|_{L2(I x Omega)} by direct quadrature
  double w2 = 0;
  auto tg = gauss_legendre_01(5);
  for (int t = 0; t < mesh.space.num_triangles(); ++t) {
    const Triangle& T = mesh.space.triangles[t];
    auto rule = triangle_rule(mesh.space.vertices[T.v[0]], mesh.space.vertices[T.v[1]],
                              mesh.space.vertices[T.v[2]], 7);
    for (const auto& q : rule)
      for (int j = 0; j < mesh.time.num_intervals(); ++j) {
        const double tau = mesh.time.length(j);
        for (const auto& tq : tg) {
          const Sym2 w = ex.stress(mesh.time.breakpoints[j] + tq.x * tau, q.p);
          w2 += q.w * tq.w * tau * frob(w, w);
        }
      }
  }
  CHECK(rep.err_w == doctest::Approx(std::sqrt(w2)).epsilon(1e-10));
  CHECK(rep.err_u > 0);
  CHECK(rep.err_p > 0);
}

TEST_CASE("pressure-block injection matches the P0 best approximation error") {
  ExactSolution ex;
  PrismMesh mesh = refine_uniform(make_initial_mesh(Domain::square));
  FeSpaces sp = build_spaces(mesh, VelocityBc::slip, true);
  FoslsSystem system(sp, ex.problem_data());
  const Blocks& b = system.blocks();

  // per-prism means of the exact pressure (independent per-prism oracle)
  Vector x = Vector::Zero(system.dim());
  auto tg = gauss_legendre_01(5);
  double best2 = 0;
  for (int j = 0; j < b.slabs; ++j) {
    const double t0 = mesh.time.breakpoints[j];
    const double tau = mesh.time.length(j);
    for (int t = 0; t < mesh.space.num_triangles(); ++t) {
      const Triangle& T = mesh.space.triangles[t];
      auto rule = triangle_rule(mesh.space.vertices[T.v[0]], mesh.space.vertices[T.v[1]],
                                mesh.space.vertices[T.v[2]], 7);
      double mean = 0;
      for (const auto& q : rule)
        for (const auto& tq : tg) mean += q.w * tq.w * tau * ex.pressure(t0 + tq.x * tau, q.p);
      mean /= tau * mesh.space.tri_area(t);
      x(b.p_index(j, t)) = mean;
      for (const auto& q : rule)
        for (const auto& tq : tg) {
          const double diff = ex.pressure(t0 + tq.x * tau, q.p) - mean;
          best2 += q.w * tq.w * tau * diff * diff;
        }
    }
  }
  auto rep = compute_errors(system, ex, x);
  CHECK(rep.err_p == doctest::Approx(std::sqrt(best2)).epsilon(1e-9));
}
