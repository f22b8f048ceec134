#include "stfosls/geometry.hpp"

namespace stfosls {

std::vector<QPoint1D> gauss_legendre_01(int npoints) {
  // Newton iteration on the Legendre polynomial roots; nodes on [-1,1] are
  // mapped to [0,1] at the end.
  if (npoints < 1) throw std::runtime_error("gauss_legendre_01: need at least one point");
  std::vector<QPoint1D> pts(npoints);
  const int n = npoints;
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double x = std::cos(3.14159265358979323846 * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    pts[k] = {-x, w};
    pts[n - 1 - k] = {x, w};
  }
  for (auto& q : pts) {
    q.x = 0.5 * (q.x + 1.0);
    q.w *= 0.5;
  }
  return pts;
}

std::vector<QPoint2D> triangle_rule(const Vec2& a, const Vec2& b, const Vec2& c, int degree) {
  // Duffy transform of a tensor Gauss rule: x = u, y = v(1-u) on the
  // reference triangle multiplies the integrand by (1-u), so n points per
  // direction integrate total degree d exactly when 2n-1 >= d+1.
  const int n = (degree + 3) / 2;
  const auto g = gauss_legendre_01(n);
  const double A2 = 2.0 * signed_area(a, b, c);
  std::vector<QPoint2D> pts;
  pts.reserve(g.size() * g.size());
  for (const auto& qu : g)
    for (const auto& qv : g) {
      const double u = qu.x, v = qv.x * (1.0 - qu.x);
      const double w = qu.w * qv.w * (1.0 - qu.x) * A2;
      const Vec2 p = a + u * (b - a) + v * (c - a);
      pts.push_back({p, w});
    }
  return pts;
}

Polygon clip_halfplane(const Polygon& poly, const Vec2& a, const Vec2& b, double eps) {
  Polygon out;
  const int n = static_cast<int>(poly.size());
  if (n == 0) return out;
  auto side = [&](const Vec2& p) { return cross(b - a, p - a); };
  for (int i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    const double sp = side(p), sq = side(q);
    if (sp >= -eps) out.push_back(p);
    if ((sp > eps && sq < -eps) || (sp < -eps && sq > eps)) {
      const double t = sp / (sp - sq);
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

Polygon clip_triangle(const Polygon& poly, const Vec2& a, const Vec2& b, const Vec2& c,
                      double eps) {
  Polygon r = clip_halfplane(poly, a, b, eps);
  r = clip_halfplane(r, b, c, eps);
  r = clip_halfplane(r, c, a, eps);
  return r;
}

double polygon_area(const Polygon& poly) {
  double s = 0.0;
  const int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) s += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * s;
}

std::vector<std::array<Vec2, 3>> fan_triangulate(const Polygon& poly) {
  std::vector<std::array<Vec2, 3>> tris;
  for (size_t i = 1; i + 1 < poly.size(); ++i)
    tris.push_back({poly[0], poly[i], poly[i + 1]});
  return tris;
}

}  // namespace stfosls
