#include "stfosls/mesh.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <utility>

namespace stfosls {

double TimePartition::max_length() const {
  double h = 0.0;
  for (int j = 0; j < num_intervals(); ++j) h = std::max(h, length(j));
  return h;
}

TimePartition TimePartition::refined() const {
  TimePartition out;
  out.breakpoints.reserve(2 * breakpoints.size() - 1);
  for (size_t j = 0; j + 1 < breakpoints.size(); ++j) {
    out.breakpoints.push_back(breakpoints[j]);
    out.breakpoints.push_back(0.5 * (breakpoints[j] + breakpoints[j + 1]));
  }
  out.breakpoints.push_back(breakpoints.back());
  return out;
}

double Triangulation::max_diameter() const {
  double h = 0.0;
  for (const Triangle& T : triangles)
    h = std::max(h, tri_diameter(vertices[T.v[0]], vertices[T.v[1]], vertices[T.v[2]]));
  return h;
}

double Triangulation::domain_area() const {
  double s = 0.0;
  for (int t = 0; t < num_triangles(); ++t) s += tri_area(t);
  return s;
}

void classify_boundary(Triangulation& tri, const std::vector<char>& corner_hint) {
  const int nv = tri.num_vertices();
  const int nt = tri.num_triangles();

  for (int t = 0; t < nt; ++t)
    if (tri.tri_area(t) <= 0.0)
      throw std::runtime_error("classify_boundary: non-positive triangle area");

  std::map<std::pair<int, int>, int> edge_id;
  tri.edges.clear();
  tri.edge_of_tri.assign(nt, {-1, -1, -1});
  for (int t = 0; t < nt; ++t) {
    const Triangle& T = tri.triangles[t];
    for (int k = 0; k < 3; ++k) {
      // edge opposite local vertex k
      int a = T.v[(k + 1) % 3], b = T.v[(k + 2) % 3];
      auto key = std::minmax(a, b);
      auto it = edge_id.find(key);
      int e;
      if (it == edge_id.end()) {
        e = tri.num_edges();
        edge_id.emplace(key, e);
        tri.edges.push_back({{key.first, key.second}, {t, -1}});
      } else {
        e = it->second;
        if (tri.edges[e].tri[1] != -1)
          throw std::runtime_error("classify_boundary: edge shared by >2 triangles");
        tri.edges[e].tri[1] = t;
      }
      tri.edge_of_tri[t][k] = e;
    }
  }

  // Outward normals of boundary edges, from the traversal direction of the
  // unique adjacent triangle.
  tri.edge_normal.assign(tri.num_edges(), Vec2());
  std::vector<std::vector<int>> bnd_edges_of_vertex(nv);
  for (int e = 0; e < tri.num_edges(); ++e) {
    const Edge& E = tri.edges[e];
    if (!E.boundary()) continue;
    const Triangle& T = tri.triangles[E.tri[0]];
    for (int k = 0; k < 3; ++k) {
      int a = T.v[k], b = T.v[(k + 1) % 3];
      if (std::minmax(a, b) == std::minmax(E.v[0], E.v[1])) {
        Vec2 d = tri.vertices[b] - tri.vertices[a];
        tri.edge_normal[e] = rot_cw(d) / norm(d);
        break;
      }
    }
    bnd_edges_of_vertex[E.v[0]].push_back(e);
    bnd_edges_of_vertex[E.v[1]].push_back(e);
  }

  tri.vertex_kind.assign(nv, VertexKind::interior);
  tri.vertex_normal.assign(nv, Vec2());
  tri.vertex_tangent.assign(nv, Vec2());
  for (int v = 0; v < nv; ++v) {
    const auto& adj = bnd_edges_of_vertex[v];
    if (adj.empty()) continue;
    if (adj.size() != 2)
      throw std::runtime_error("classify_boundary: boundary vertex without two boundary edges");
    const bool corner = v < static_cast<int>(corner_hint.size()) && corner_hint[v];
    const Vec2 n0 = tri.edge_normal[adj[0]], n1 = tri.edge_normal[adj[1]];
    const double misalign = std::abs(cross(n0, n1));
    if (corner) {
      tri.vertex_kind[v] = VertexKind::corner;
    } else {
      if (misalign > 1e-12)
        throw std::runtime_error("classify_boundary: non-collinear boundary edges at vertex "
                                 "not flagged as corner");
      tri.vertex_kind[v] = VertexKind::boundary;
      tri.vertex_normal[v] = n0;
      tri.vertex_tangent[v] = rot_ccw(n0);
    }
  }
}

namespace {

void add_square(std::vector<Vec2>& vx, std::vector<Triangle>& tris,
                std::map<std::pair<double, double>, int>& vid, Vec2 lo) {
  auto get = [&](Vec2 p) {
    auto key = std::make_pair(p.x, p.y);
    auto it = vid.find(key);
    if (it != vid.end()) return it->second;
    int i = static_cast<int>(vx.size());
    vid.emplace(key, i);
    vx.push_back(p);
    return i;
  };
  const int c0 = get(lo);
  const int c1 = get(lo + Vec2(1, 0));
  const int c2 = get(lo + Vec2(1, 1));
  const int c3 = get(lo + Vec2(0, 1));
  const int z = get(lo + Vec2(0.5, 0.5));
  tris.push_back({{c0, c1, z}});
  tris.push_back({{c1, c2, z}});
  tris.push_back({{c2, c3, z}});
  tris.push_back({{c3, c0, z}});
}

}  // namespace

PrismMesh make_initial_mesh(Domain domain) {
  PrismMesh mesh;
  mesh.time.breakpoints = {0.0, 1.0};
  mesh.level = 0;

  std::map<std::pair<double, double>, int> vid;
  std::vector<Vec2> corners;
  if (domain == Domain::square) {
    add_square(mesh.space.vertices, mesh.space.triangles, vid, {0, 0});
    corners = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  } else {
    add_square(mesh.space.vertices, mesh.space.triangles, vid, {0, 0});
    add_square(mesh.space.vertices, mesh.space.triangles, vid, {-1, 0});
    add_square(mesh.space.vertices, mesh.space.triangles, vid, {0, -1});
    corners = {{0, -1}, {1, -1}, {1, 1}, {-1, 1}, {-1, 0}, {0, 0}};
  }

  mesh.corner_flags.assign(mesh.space.num_vertices(), 0);
  for (const Vec2& c : corners) mesh.corner_flags[vid.at({c.x, c.y})] = 1;

  classify_boundary(mesh.space, mesh.corner_flags);
  return mesh;
}

namespace {

// One round of newest-vertex bisection applied to every triangle.
void bisect_all(Triangulation& tri) {
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    int i = tri.num_vertices();
    midpoint.emplace(key, i);
    tri.vertices.push_back(0.5 * (tri.vertices[a] + tri.vertices[b]));
    return i;
  };

  std::vector<Triangle> out;
  out.reserve(2 * tri.triangles.size());
  for (const Triangle& T : tri.triangles) {
    const int a = T.v[0], b = T.v[1], c = T.v[2];
    const int m = mid(a, b);
    out.push_back({{c, a, m}});
    out.push_back({{b, c, m}});
  }
  tri.triangles = std::move(out);
}

}  // namespace

PrismMesh refine_uniform(const PrismMesh& mesh) {
  PrismMesh out;
  out.time = mesh.time.refined();
  out.space.vertices = mesh.space.vertices;
  out.space.triangles = mesh.space.triangles;
  out.level = mesh.level + 1;

  bisect_all(out.space);
  bisect_all(out.space);

  out.corner_flags = mesh.corner_flags;
  out.corner_flags.resize(out.space.num_vertices(), 0);
  classify_boundary(out.space, out.corner_flags);
  return out;
}

void dump_mesh(const PrismMesh& mesh, std::ostream& os) {
  os.precision(17);
  for (const Vec2& v : mesh.space.vertices) os << "v " << v.x << ' ' << v.y << '\n';
  for (const Triangle& T : mesh.space.triangles)
    os << "t " << T.v[0] << ' ' << T.v[1] << ' ' << T.v[2] << ' ' << T.v[2] << '\n';
  for (double t : mesh.time.breakpoints) os << "s " << t << '\n';
}

}  // namespace stfosls
