#include "stfosls/spaces.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace stfosls {

namespace {

template <typename GetCell>
int best_cell(int ncells, GetCell get, const Vec2& p) {
  double best = -1e300;
  int arg = -1;
  for (int c = 0; c < ncells; ++c) {
    auto cell = get(c);
    auto l = barycentric(cell[0], cell[1], cell[2], p);
    double m = std::min({l[0], l[1], l[2]});
    if (m > best) {
      best = m;
      arg = c;
    }
  }
  if (best < -1e-9) throw std::runtime_error("point outside triangle");
  return arg;
}

}  // namespace

int TriangleSplits::find_ct_cell(const Vec2& p) const {
  return best_cell(3, [this](int c) { return ct_cell(c); }, p);
}

int TriangleSplits::find_ps_cell(const Vec2& p) const {
  return best_cell(6, [this](int c) { return ps_cell(c); }, p);
}

std::vector<TriangleSplits> compute_splits(const Triangulation& tri) {
  const int nt = tri.num_triangles();
  std::vector<TriangleSplits> out(nt);
  for (int t = 0; t < nt; ++t) {
    TriangleSplits& s = out[t];
    for (int k = 0; k < 3; ++k) s.v[k] = tri.vertices[tri.triangles[t].v[k]];
    s.centroid = (s.v[0] + s.v[1] + s.v[2]) / 3.0;
    s.incenter = incenter(s.v[0], s.v[1], s.v[2]);
  }
  // Edge points: on interior edges the intersection of the segment joining
  // the two adjacent incenters with the edge, so the neighbouring splits
  // match; midpoints on the boundary.
  for (int e = 0; e < tri.num_edges(); ++e) {
    const Edge& E = tri.edges[e];
    const Vec2 p = tri.vertices[E.v[0]], q = tri.vertices[E.v[1]];
    Vec2 m = 0.5 * (p + q);
    if (!E.boundary()) {
      const Vec2 z0 = out[E.tri[0]].incenter, z1 = out[E.tri[1]].incenter;
      const double t01 = cross(p - z0, q - p) / cross(z1 - z0, q - p);
      m = z0 + t01 * (z1 - z0);
      const double s = dot(m - p, q - p) / dot(q - p, q - p);
      if (!(s > 1e-12 && s < 1.0 - 1e-12))
        throw std::runtime_error("powell-sabin edge point outside edge");
    }
    for (int side = 0; side < 2; ++side) {
      const int t = E.tri[side];
      if (t < 0) continue;
      const Triangle& T = tri.triangles[t];
      for (int j = 0; j < 3; ++j) {
        const int a = T.v[j], b = T.v[(j + 1) % 3];
        if (std::minmax(a, b) == std::minmax(E.v[0], E.v[1])) out[t].edge_point[j] = m;
      }
    }
  }
  return out;
}

std::vector<IntegrationCell> common_refinement(const TriangleSplits& s) {
  std::vector<IntegrationCell> out;
  const double scale = tri_diameter(s.v[0], s.v[1], s.v[2]);
  const double eps = 1e-13 * scale;
  const double area_tol = 1e-13 * std::abs(signed_area(s.v[0], s.v[1], s.v[2]));
  for (int ct = 0; ct < 3; ++ct) {
    auto c = s.ct_cell(ct);
    Polygon base = {c[0], c[1], c[2]};
    for (int ps = 0; ps < 6; ++ps) {
      auto q = s.ps_cell(ps);
      Polygon inter = clip_triangle(base, q[0], q[1], q[2], eps);
      if (inter.size() < 3 || std::abs(polygon_area(inter)) < area_tol) continue;
      for (auto& t : fan_triangulate(inter)) {
        if (std::abs(signed_area(t[0], t[1], t[2])) < area_tol) continue;
        IntegrationCell cell;
        cell.p[0] = t[0];
        cell.p[1] = t[1];
        cell.p[2] = t[2];
        cell.ct = ct;
        cell.ps = ps;
        out.push_back(cell);
      }
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// Edge bubble
// --------------------------------------------------------------------------

EdgeBubble build_edge_bubble(const Triangulation& tri, const std::vector<TriangleSplits>& splits,
                             int edge) {
  const Edge& E = tri.edges[edge];
  EdgeBubble bub;
  bub.edge = edge;
  bub.tris[0] = E.tri[0];
  bub.tris[1] = E.tri[1];
  const int nsides = E.boundary() ? 1 : 2;

  const Vec2 p = tri.vertices[E.v[0]], q = tri.vertices[E.v[1]];
  const double elen = norm(q - p);
  const Vec2 tau = (q - p) / elen;
  const Vec2 ne = rot_cw(tau);

  // Unknowns: the value at the edge split point, then one value per adjacent
  // incenter. Equations: constant divergence on the 4 regions of each
  // adjacent triangle cut out by the edge point and the incenter, plus the
  // normalization int_e phi.n = |e|.
  const int nunk = 2 + 2 * nsides;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(4 * nsides + 1, nunk);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(4 * nsides + 1);

  std::array<int, 2> locals{-1, -1};
  std::array<double, 2> dval{0.0, 0.0};
  for (int s = 0; s < nsides; ++s) {
    const int t = E.tri[s];
    const Triangle& T = tri.triangles[t];
    const TriangleSplits& spl = splits[t];
    int jloc = -1;
    for (int j = 0; j < 3; ++j)
      if (std::minmax(T.v[j], T.v[(j + 1) % 3]) == std::minmax(E.v[0], E.v[1])) jloc = j;
    locals[s] = jloc;

    const Vec2 a = spl.v[jloc], b = spl.v[(jloc + 1) % 3], c = spl.v[(jloc + 2) % 3];
    const Vec2 m = spl.edge_point[jloc], z = spl.incenter;
    const double areaK = signed_area(spl.v[0], spl.v[1], spl.v[2]);
    const double sgn = dot(ne, c - 0.5 * (p + q)) < 0.0 ? 1.0 : -1.0;
    const double d = sgn * elen / areaK;
    dval[s] = d;

    const int zcol = 2 + 2 * s;
    struct Region {
      Vec2 p0, p1, p2;
      int cols[3];  // unknown column of the value at each corner (-1: zero)
    };
    const Region regions[4] = {
        {a, m, z, {-1, 0, zcol}},
        {m, b, z, {0, -1, zcol}},
        {b, c, z, {-1, -1, zcol}},
        {c, a, z, {-1, -1, zcol}},
    };
    for (int r = 0; r < 4; ++r) {
      const Region& R = regions[r];
      auto grad = hat_gradients(R.p0, R.p1, R.p2);
      for (int k = 0; k < 3; ++k) {
        if (R.cols[k] < 0) continue;
        M(4 * s + r, R.cols[k] + 0) += grad[k].x;
        M(4 * s + r, R.cols[k] + 1) += grad[k].y;
      }
      rhs(4 * s + r) = d;
    }
  }
  M(4 * nsides, 0) = ne.x;
  M(4 * nsides, 1) = ne.y;
  rhs(4 * nsides) = 2.0;

  Eigen::VectorXd x = M.colPivHouseholderQr().solve(rhs);
  const double resid = (M * x - rhs).lpNorm<Eigen::Infinity>();
  const double scale = rhs.lpNorm<Eigen::Infinity>();
  if (!(resid < 1e-9 * scale))
    throw std::runtime_error("edge bubble construction is inconsistent (degenerate patch)");

  for (int s = 0; s < nsides; ++s) {
    auto& nv = bub.node_value[s];
    nv.fill(Vec2());
    nv[3 + locals[s]] = {x(0), x(1)};
    nv[6] = {x(2 + 2 * s), x(3 + 2 * s)};
    bub.div_value[s] = dval[s];
  }
  return bub;
}

// --------------------------------------------------------------------------
// Stress element
// --------------------------------------------------------------------------

namespace {

// (S_s n) for the three symmetric component fields S_xx, S_xy, S_yy.
inline Vec2 comp_times(const Vec2& n, int s) {
  switch (s) {
    case 0:
      return {n.x, 0.0};
    case 1:
      return {n.y, n.x};
    default:
      return {0.0, n.y};
  }
}

inline int coeff_index(int cell, int corner, int comp) { return (cell * 3 + corner) * 3 + comp; }

}  // namespace

TriangleStressBasis build_stress_local_basis(const TriangleSplits& sp, const bool edge_orient[3],
                                             const double edge_len[3]) {
  // Raw space: per Clough-Tocher cell a linear symmetric tensor field given
  // by its corner values, 27 coefficients. Constraints: continuity of w.n
  // and of (div w).n across the three internal edges, and (w n).tau constant
  // along each exterior edge. The 9-dimensional nullspace is then dualized
  // against the edge moments.
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(18, 27);
  int row = 0;

  std::array<std::array<Vec2, 3>, 3> grads;
  for (int c = 0; c < 3; ++c) {
    auto cell = sp.ct_cell(c);
    grads[c] = hat_gradients(cell[0], cell[1], cell[2]);
  }

  for (int i = 0; i < 3; ++i) {
    // internal edge (v_i, centroid): cell i has v_i as corner 0 and the
    // centroid as corner 2; cell (i+2)%3 has them as corners 1 and 2
    const int cr = i, cl = (i + 2) % 3;
    Vec2 d = sp.centroid - sp.v[i];
    const Vec2 n = rot_cw(d) / norm(d);
    const int ptR[2] = {0, 2}, ptL[2] = {1, 2};
    for (int pt = 0; pt < 2; ++pt) {
      for (int comp = 0; comp < 2; ++comp) {
        for (int s = 0; s < 3; ++s) {
          const Vec2 wn = comp_times(n, s);
          const double val = comp == 0 ? wn.x : wn.y;
          C(row, coeff_index(cr, ptR[pt], s)) += val;
          C(row, coeff_index(cl, ptL[pt], s)) -= val;
        }
        ++row;
      }
    }
    for (int k = 0; k < 3; ++k) {
      for (int s = 0; s < 3; ++s) {
        C(row, coeff_index(cr, k, s)) += dot(comp_times(grads[cr][k], s), n);
        C(row, coeff_index(cl, k, s)) -= dot(comp_times(grads[cl][k], s), n);
      }
    }
    ++row;
  }
  for (int j = 0; j < 3; ++j) {
    // exterior edge (v_j, v_{j+1}) lives in cell j as corners 0,1
    Vec2 d = sp.v[(j + 1) % 3] - sp.v[j];
    const Vec2 tau = d / norm(d);
    const Vec2 n = rot_cw(tau);
    for (int s = 0; s < 3; ++s) {
      const double val = dot(comp_times(n, s), tau);
      C(row, coeff_index(j, 0, s)) += val;
      C(row, coeff_index(j, 1, s)) -= val;
    }
    ++row;
  }

  for (int r = 0; r < 18; ++r) {
    const double nr = C.row(r).norm();
    if (nr > 0) C.row(r) /= nr;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) rank += sv(i) > 1e-10 * sv(0);
  if (27 - rank != 9)
    throw std::runtime_error("stress element: constraint nullspace dimension != 9");
  const Eigen::MatrixXd N = svd.matrixV().rightCols(9);

  Eigen::MatrixXd Mmt(9, 9);
  for (int col = 0; col < 9; ++col) {
    for (int j = 0; j < 3; ++j) {
      Vec2 dloc = sp.v[(j + 1) % 3] - sp.v[j];
      const double len = edge_len[j];
      Vec2 taug = dloc / norm(dloc);
      if (!edge_orient[j]) taug = -1.0 * taug;
      const Vec2 ng = rot_cw(taug);
      Vec2 tr[2];
      for (int k = 0; k < 2; ++k) {
        Sym2 w(N(coeff_index(j, k, 0), col), N(coeff_index(j, k, 1), col),
               N(coeff_index(j, k, 2), col));
        tr[k] = w.apply(ng);
      }
      const Vec2 lo = edge_orient[j] ? tr[0] : tr[1];
      const Vec2 hi = edge_orient[j] ? tr[1] : tr[0];
      Mmt(3 * j + 0, col) = 0.5 * len * dot(lo + hi, taug);
      Mmt(3 * j + 1, col) = 0.5 * len * dot(lo + hi, ng);
      Mmt(3 * j + 2, col) = len * dot(hi - lo, ng) / 12.0;
    }
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(Mmt);
  if (!lu.isInvertible()) throw std::runtime_error("stress element: moment matrix is singular");
  const Eigen::MatrixXd D = N * lu.inverse();

  TriangleStressBasis basis;
  for (int s = 0; s < 9; ++s) {
    for (int c = 0; c < 3; ++c) {
      for (int k = 0; k < 3; ++k)
        basis.value[s][c][k] = Sym2(D(coeff_index(c, k, 0), s), D(coeff_index(c, k, 1), s),
                                    D(coeff_index(c, k, 2), s));
      Vec2 div;
      for (int k = 0; k < 3; ++k) div += basis.value[s][c][k].apply(grads[c][k]);
      basis.divergence[s][c] = div;
    }
  }
  return basis;
}

// --------------------------------------------------------------------------
// Space assembly
// --------------------------------------------------------------------------

FeSpaces build_spaces(const PrismMesh& mesh, VelocityBc bc, bool with_bubbles) {
  FeSpaces sp;
  sp.mesh = &mesh;
  sp.bc = bc;
  sp.with_bubbles = with_bubbles;
  const Triangulation& tri = mesh.space;

  sp.splits = compute_splits(tri);
  sp.cells.resize(tri.num_triangles());
  for (int t = 0; t < tri.num_triangles(); ++t) sp.cells[t] = common_refinement(sp.splits[t]);

  VelocitySpace& U = sp.velocity;
  U.bc = bc;
  U.with_bubbles = with_bubbles;
  U.vertex_dofs.assign(tri.num_vertices(), {});
  int next = 0;
  for (int v = 0; v < tri.num_vertices(); ++v) {
    VelocitySpace::VertexDofs& vd = U.vertex_dofs[v];
    const VertexKind kind = tri.vertex_kind[v];
    if (bc == VelocityBc::none || kind == VertexKind::interior) {
      vd.count = 2;
      vd.dir[0] = {1, 0};
      vd.dir[1] = {0, 1};
    } else if (bc == VelocityBc::slip && kind == VertexKind::boundary) {
      vd.count = 1;
      vd.dir[0] = tri.vertex_tangent[v];
    } else {
      vd.count = 0;  // corners under slip, all boundary nodes under noslip
    }
    for (int d = 0; d < vd.count; ++d) vd.id[d] = next++;
  }
  U.nodal_dim = next;

  U.bubble_dof.assign(tri.num_edges(), -1);
  U.bubble_index.assign(tri.num_edges(), -1);
  if (with_bubbles) {
    for (int e = 0; e < tri.num_edges(); ++e) {
      const bool wanted = bc == VelocityBc::none || !tri.edges[e].boundary();
      if (!wanted) continue;
      U.bubble_index[e] = static_cast<int>(U.bubbles.size());
      U.bubbles.push_back(build_edge_bubble(tri, sp.splits, e));
      U.bubble_dof[e] = next++;
      U.bubble_of_dof.push_back(e);
    }
  }
  U.dim = next;

  StressSpace& W = sp.stress;
  W.constrain_boundary_tangential = bc != VelocityBc::noslip;
  for (auto& v : W.edge_dof) v.assign(tri.num_edges(), -1);
  int wnext = 0;
  for (int e = 0; e < tri.num_edges(); ++e) {
    const bool drop_t = W.constrain_boundary_tangential && tri.edges[e].boundary();
    if (!drop_t) W.edge_dof[0][e] = wnext++;
    W.edge_dof[1][e] = wnext++;
    W.edge_dof[2][e] = wnext++;
  }
  W.dim = wnext;

  W.local.resize(tri.num_triangles());
  for (int t = 0; t < tri.num_triangles(); ++t) {
    const Triangle& T = tri.triangles[t];
    bool orient[3];
    double len[3];
    for (int j = 0; j < 3; ++j) {
      const int a = T.v[j], b = T.v[(j + 1) % 3];
      orient[j] = a < b;
      len[j] = norm(tri.vertices[b] - tri.vertices[a]);
    }
    W.local[t] = build_stress_local_basis(sp.splits[t], orient, len);
  }

  sp.pressure.dim = tri.num_triangles();
  return sp;
}

// --------------------------------------------------------------------------
// Evaluation
// --------------------------------------------------------------------------

std::vector<VelocityEval> FeSpaces::eval_velocity_in_cell(int t, const Vec2& p,
                                                          int ps_cell) const {
  const Triangulation& tri = mesh->space;
  const Triangle& T = tri.triangles[t];
  const TriangleSplits& s = splits[t];
  std::vector<VelocityEval> out;
  out.reserve(9);

  const auto lam = barycentric(s.v[0], s.v[1], s.v[2], p);
  const auto grad = hat_gradients(s.v[0], s.v[1], s.v[2]);
  for (int k = 0; k < 3; ++k) {
    const auto& vd = velocity.vertex_dofs[T.v[k]];
    for (int d = 0; d < vd.count; ++d) {
      VelocityEval ev;
      ev.dof = vd.id[d];
      ev.value = lam[k] * vd.dir[d];
      ev.grad = Mat2::outer(vd.dir[d], grad[k]);
      ev.div = dot(vd.dir[d], grad[k]);
      out.push_back(ev);
    }
  }

  if (velocity.with_bubbles) {
    auto cell = s.ps_cell(ps_cell);
    const auto lam_ps = barycentric(cell[0], cell[1], cell[2], p);
    const auto grad_ps = hat_gradients(cell[0], cell[1], cell[2]);
    // Powell-Sabin node ids of the corners of ps cell c:
    // cell 2j = (v_j, m_j, z) -> (j, 3+j, 6); cell 2j+1 = (m_j, v_{j+1}, z)
    const int j = ps_cell / 2;
    int nodes[3];
    if (ps_cell % 2 == 0) {
      nodes[0] = j;
      nodes[1] = 3 + j;
    } else {
      nodes[0] = 3 + j;
      nodes[1] = (j + 1) % 3;
    }
    nodes[2] = 6;
    for (int je = 0; je < 3; ++je) {
      const int e = tri.edge_of_tri[t][(je + 2) % 3];  // edge (v_je, v_{je+1})
      const int bi = velocity.bubble_index[e];
      if (bi < 0) continue;
      const EdgeBubble& bub = velocity.bubbles[bi];
      const int side = bub.tris[0] == t ? 0 : 1;
      VelocityEval ev;
      ev.dof = velocity.bubble_dof[e];
      ev.value = Vec2();
      Mat2 g;
      for (int k = 0; k < 3; ++k) {
        const Vec2 val = bub.node_value[side][nodes[k]];
        ev.value += lam_ps[k] * val;
        g += Mat2::outer(val, grad_ps[k]);
      }
      ev.grad = g;
      ev.div = bub.div_value[side];
      out.push_back(ev);
    }
  }
  return out;
}

std::vector<VelocityEval> FeSpaces::eval_velocity(int t, const Vec2& p) const {
  return eval_velocity_in_cell(t, p, splits[t].find_ps_cell(p));
}

std::vector<StressEval> FeSpaces::eval_stress_in_cell(int t, const Vec2& p, int ct_cell) const {
  const Triangulation& tri = mesh->space;
  const TriangleSplits& s = splits[t];
  auto cell = s.ct_cell(ct_cell);
  const auto lam = barycentric(cell[0], cell[1], cell[2], p);
  std::vector<StressEval> out;
  out.reserve(9);
  const TriangleStressBasis& loc = stress.local[t];
  for (int j = 0; j < 3; ++j) {
    const int e = tri.edge_of_tri[t][(j + 2) % 3];
    for (int m = 0; m < 3; ++m) {
      StressEval ev;
      ev.dof = stress.edge_dof[m][e];
      const int sidx = 3 * j + m;
      Sym2 val;
      for (int k = 0; k < 3; ++k) val += lam[k] * loc.value[sidx][ct_cell][k];
      ev.value = val;
      ev.divergence = loc.divergence[sidx][ct_cell];
      out.push_back(ev);
    }
  }
  return out;
}

std::vector<StressEval> FeSpaces::eval_stress(int t, const Vec2& p) const {
  return eval_stress_in_cell(t, p, splits[t].find_ct_cell(p));
}

std::vector<int> FeSpaces::velocity_dofs_on_tri(int t) const {
  const Triangulation& tri = mesh->space;
  const Triangle& T = tri.triangles[t];
  std::vector<int> dofs;
  for (int k = 0; k < 3; ++k) {
    const auto& vd = velocity.vertex_dofs[T.v[k]];
    for (int d = 0; d < vd.count; ++d) dofs.push_back(vd.id[d]);
  }
  for (int k = 0; k < 3; ++k) {
    const int e = tri.edge_of_tri[t][k];
    if (velocity.bubble_dof[e] >= 0) dofs.push_back(velocity.bubble_dof[e]);
  }
  return dofs;
}

// --------------------------------------------------------------------------
// Interpolation operators
// --------------------------------------------------------------------------

namespace {

// int_e v.dir psi_e ds with psi_e the dual linear weight of the hat function
// of endpoint z on the edge (z, zt); the edge length cancels.
double edge_dual_moment(const Vec2& pz, const Vec2& pzt, const VectorField& v, const Vec2& dir) {
  const auto g = gauss_legendre_01(5);
  double s = 0.0;
  for (const auto& q : g) {
    const Vec2 p = pz + q.x * (pzt - pz);
    s += q.w * dot(v(p), dir) * (4.0 - 6.0 * q.x);
  }
  return s;
}

Vec2 vertex_value(const VelocitySpace& U, const std::vector<double>& coef, int v) {
  const auto& vd = U.vertex_dofs[v];
  Vec2 val;
  for (int d = 0; d < vd.count; ++d) val += coef[vd.id[d]] * vd.dir[d];
  return val;
}

}  // namespace

std::vector<double> scott_zhang_velocity(const FeSpaces& sp, const VectorField& v) {
  const Triangulation& tri = sp.mesh->space;
  const VelocitySpace& U = sp.velocity;
  std::vector<double> coef(U.dim, 0.0);

  std::vector<int> pick(tri.num_vertices(), -1);
  std::vector<std::array<int, 2>> bnd_pair(tri.num_vertices(), std::array<int, 2>{-1, -1});
  for (int e = 0; e < tri.num_edges(); ++e) {
    const Edge& E = tri.edges[e];
    for (int k = 0; k < 2; ++k) {
      const int z = E.v[k];
      if (tri.vertex_kind[z] != VertexKind::interior) {
        if (!E.boundary()) continue;
        auto& pair = bnd_pair[z];
        (pair[0] < 0 ? pair[0] : pair[1]) = e;
      }
      if (pick[z] < 0) pick[z] = e;
    }
  }

  for (int z = 0; z < tri.num_vertices(); ++z) {
    const auto& vd = U.vertex_dofs[z];
    if (vd.count == 0) continue;
    const VertexKind kind = tri.vertex_kind[z];
    Vec2 val;
    if (kind == VertexKind::interior) {
      const Edge& E = tri.edges[pick[z]];
      const int zt = E.v[0] == z ? E.v[1] : E.v[0];
      val.x = edge_dual_moment(tri.vertices[z], tri.vertices[zt], v, {1, 0});
      val.y = edge_dual_moment(tri.vertices[z], tri.vertices[zt], v, {0, 1});
    } else if (kind == VertexKind::boundary) {
      const int e = std::min(bnd_pair[z][0], bnd_pair[z][1]);
      const Edge& E = tri.edges[e];
      const int zt = E.v[0] == z ? E.v[1] : E.v[0];
      const Vec2 n = tri.edge_normal[e], tau = rot_ccw(n);
      const double mn = edge_dual_moment(tri.vertices[z], tri.vertices[zt], v, n);
      const double mt = edge_dual_moment(tri.vertices[z], tri.vertices[zt], v, tau);
      val = mn * n + mt * tau;
    } else {
      // corner: the normal moments of the two adjacent boundary edges
      // determine the value
      Eigen::Matrix2d A;
      Eigen::Vector2d b;
      for (int k = 0; k < 2; ++k) {
        const int e = bnd_pair[z][k];
        const Edge& E = tri.edges[e];
        const int zt = E.v[0] == z ? E.v[1] : E.v[0];
        const Vec2 n = tri.edge_normal[e];
        A(k, 0) = n.x;
        A(k, 1) = n.y;
        b(k) = edge_dual_moment(tri.vertices[z], tri.vertices[zt], v, n);
      }
      Eigen::Vector2d x = A.fullPivLu().solve(b);
      val = {x(0), x(1)};
    }
    for (int d = 0; d < vd.count; ++d) coef[vd.id[d]] = dot(val, vd.dir[d]);
  }
  return coef;
}

std::vector<double> quasi_interpolate_velocity(const FeSpaces& sp, const VectorField& v) {
  const Triangulation& tri = sp.mesh->space;
  const VelocitySpace& U = sp.velocity;
  std::vector<double> coef = scott_zhang_velocity(sp, v);
  const auto g = gauss_legendre_01(5);
  for (int e = 0; e < tri.num_edges(); ++e) {
    if (U.bubble_dof[e] < 0) continue;
    const Edge& E = tri.edges[e];
    const Vec2 p = tri.vertices[E.v[0]], q = tri.vertices[E.v[1]];
    const double elen = norm(q - p);
    const Vec2 ne = rot_cw((q - p) / elen);
    const Vec2 v0 = vertex_value(U, coef, E.v[0]);
    const Vec2 v1 = vertex_value(U, coef, E.v[1]);
    double moment = 0.0;
    for (const auto& qp : g) {
      const Vec2 x = p + qp.x * (q - p);
      const Vec2 diff = v(x) - ((1.0 - qp.x) * v0 + qp.x * v1);
      moment += qp.w * elen * dot(diff, ne);
    }
    coef[U.bubble_dof[e]] = moment / elen;  // int_e phi.n ds = |e|
  }
  return coef;
}

std::vector<double> interpolate_stress(const FeSpaces& sp, const TensorField& w) {
  const Triangulation& tri = sp.mesh->space;
  const StressSpace& W = sp.stress;
  std::vector<double> coef(W.dim, 0.0);
  const auto g = gauss_legendre_01(5);
  for (int e = 0; e < tri.num_edges(); ++e) {
    const Edge& E = tri.edges[e];
    const Vec2 p = tri.vertices[E.v[0]], q = tri.vertices[E.v[1]];
    const double elen = norm(q - p);
    const Vec2 tau = (q - p) / elen;
    const Vec2 n = rot_cw(tau);
    double mt = 0.0, mn0 = 0.0, mn1 = 0.0;
    for (const auto& qp : g) {
      const Vec2 x = p + qp.x * (q - p);
      const Vec2 wn = w(x).apply(n);
      mt += qp.w * elen * dot(wn, tau);
      mn0 += qp.w * elen * dot(wn, n);
      mn1 += qp.w * elen * dot(wn, n) * (qp.x - 0.5);
    }
    if (W.edge_dof[0][e] >= 0) coef[W.edge_dof[0][e]] = mt;
    coef[W.edge_dof[1][e]] = mn0;
    coef[W.edge_dof[2][e]] = mn1;
  }
  return coef;
}

std::vector<double> project_p0(const Triangulation& tri,
                               const std::function<double(const Vec2&)>& f) {
  std::vector<double> out(tri.num_triangles(), 0.0);
  for (int t = 0; t < tri.num_triangles(); ++t) {
    const Triangle& T = tri.triangles[t];
    auto rule = triangle_rule(tri.vertices[T.v[0]], tri.vertices[T.v[1]], tri.vertices[T.v[2]], 7);
    double s = 0.0;
    for (const auto& q : rule) s += q.w * f(q.p);
    out[t] = s / tri.tri_area(t);
  }
  return out;
}

}  // namespace stfosls
