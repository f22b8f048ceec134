#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace stfosls {

struct Vec2 {
  double x = 0.0, y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {s * x, s * y}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
};

inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }

// 90 degree rotations. rot_cw maps an edge tangent to the normal on its
// right-hand side; for a counterclockwise triangle boundary that is the
// outward normal.
inline Vec2 rot_cw(const Vec2& v) { return {v.y, -v.x}; }
inline Vec2 rot_ccw(const Vec2& v) { return {-v.y, v.x}; }

// Full 2x2 matrix, g[i][j] = entry (i,j); used for velocity Jacobians
// with g[i][j] = d v_i / d x_j.
struct Mat2 {
  double g[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

  static Mat2 outer(const Vec2& v, const Vec2& w) {
    Mat2 m;
    m.g[0][0] = v.x * w.x;
    m.g[0][1] = v.x * w.y;
    m.g[1][0] = v.y * w.x;
    m.g[1][1] = v.y * w.y;
    return m;
  }
  Mat2& operator+=(const Mat2& o) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g[i][j] += o.g[i][j];
    return *this;
  }
  double trace() const { return g[0][0] + g[1][1]; }
};

inline double frob(const Mat2& a, const Mat2& b) {
  double s = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s += a.g[i][j] * b.g[i][j];
  return s;
}

// Symmetric 2x2 tensor stored as (xx, xy, yy).
struct Sym2 {
  double xx = 0.0, xy = 0.0, yy = 0.0;

  Sym2() = default;
  Sym2(double a, double b, double c) : xx(a), xy(b), yy(c) {}

  Sym2 operator+(const Sym2& o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
  Sym2 operator-(const Sym2& o) const { return {xx - o.xx, xy - o.xy, yy - o.yy}; }
  Sym2 operator*(double s) const { return {s * xx, s * xy, s * yy}; }
  Sym2& operator+=(const Sym2& o) {
    xx += o.xx;
    xy += o.xy;
    yy += o.yy;
    return *this;
  }

  Vec2 apply(const Vec2& v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
  double trace() const { return xx + yy; }
};

inline Sym2 operator*(double s, const Sym2& m) { return {s * m.xx, s * m.xy, s * m.yy}; }

// Frobenius inner product; the off-diagonal entry appears twice.
inline double frob(const Sym2& a, const Sym2& b) {
  return a.xx * b.xx + 2.0 * a.xy * b.xy + a.yy * b.yy;
}

inline double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * cross(b - a, c - a);
}

inline double tri_diameter(const Vec2& a, const Vec2& b, const Vec2& c) {
  return std::max({norm(b - a), norm(c - b), norm(a - c)});
}

// Gradients of the barycentric (hat) functions of triangle (a,b,c).
inline std::array<Vec2, 3> hat_gradients(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double inv2A = 1.0 / (2.0 * signed_area(a, b, c));
  return {rot_ccw(c - b) * inv2A, rot_ccw(a - c) * inv2A, rot_ccw(b - a) * inv2A};
}

inline std::array<double, 3> barycentric(const Vec2& a, const Vec2& b, const Vec2& c,
                                         const Vec2& p) {
  const double A = signed_area(a, b, c);
  return {signed_area(p, b, c) / A, signed_area(a, p, c) / A, signed_area(a, b, p) / A};
}

inline Vec2 incenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double la = norm(c - b), lb = norm(a - c), lc = norm(b - a);
  return (la * a + lb * b + lc * c) / (la + lb + lc);
}

// --------------------------------------------------------------------------
// Quadrature
// --------------------------------------------------------------------------

struct QPoint1D {
  double x;  // on [0,1]
  double w;
};

// Gauss-Legendre on [0,1], exact for degree 2n-1.
std::vector<QPoint1D> gauss_legendre_01(int npoints);

struct QPoint2D {
  Vec2 p;
  double w;
};

// Rule on the triangle (a,b,c), exact for polynomials of the given total
// degree (collapsed tensor-Gauss construction).
std::vector<QPoint2D> triangle_rule(const Vec2& a, const Vec2& b, const Vec2& c, int degree);

// --------------------------------------------------------------------------
// Convex polygon clipping (Sutherland-Hodgman), used to form the common
// refinement of two splits of the same triangle.
// --------------------------------------------------------------------------

using Polygon = std::vector<Vec2>;

// Intersection of a convex polygon with the closed half-plane on the left of
// the directed line a -> b.
Polygon clip_halfplane(const Polygon& poly, const Vec2& a, const Vec2& b, double eps);

// Intersection of convex polygon `poly` with triangle (a,b,c) (counterclockwise).
Polygon clip_triangle(const Polygon& poly, const Vec2& a, const Vec2& b, const Vec2& c,
                      double eps);

double polygon_area(const Polygon& poly);

// Fan triangulation about the first vertex.
std::vector<std::array<Vec2, 3>> fan_triangulate(const Polygon& poly);

}  // namespace stfosls
