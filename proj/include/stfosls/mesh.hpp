#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stfosls/geometry.hpp"

namespace stfosls {

enum class Domain { square, lshape };

// Partition of the time interval (0,T) into subintervals.
struct TimePartition {
  std::vector<double> breakpoints;  // strictly increasing, from 0 to T

  int num_intervals() const { return static_cast<int>(breakpoints.size()) - 1; }
  double length(int j) const { return breakpoints[j + 1] - breakpoints[j]; }
  double final_time() const { return breakpoints.back(); }
  double max_length() const;

  TimePartition refined() const;  // bisect every interval
};

enum class VertexKind { interior, boundary, corner };

struct Triangle {
  int v[3];  // vertex indices, counterclockwise; v[2] is the newest vertex,
             // so the refinement edge is (v[0], v[1])
};

struct Edge {
  int v[2];     // endpoint indices, v[0] < v[1]
  int tri[2];   // adjacent triangles; tri[1] = -1 on the boundary
  bool boundary() const { return tri[1] < 0; }
};

// Conforming triangulation of one of the two polygonal domains, with
// boundary metadata used by the slip condition.
struct Triangulation {
  std::vector<Vec2> vertices;
  std::vector<Triangle> triangles;
  std::vector<Edge> edges;

  std::vector<VertexKind> vertex_kind;
  std::vector<Vec2> vertex_normal;   // unit outward normal at non-corner boundary vertices
  std::vector<Vec2> vertex_tangent;  // unit tangent there (normal rotated ccw)
  std::vector<Vec2> edge_normal;     // unit outward normal per boundary edge

  // edges of each triangle, edge_of_tri[t][k] opposite local vertex k
  std::vector<std::array<int, 3>> edge_of_tri;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  const Vec2& vertex(int i) const { return vertices[i]; }
  double tri_area(int t) const {
    const Triangle& T = triangles[t];
    return signed_area(vertices[T.v[0]], vertices[T.v[1]], vertices[T.v[2]]);
  }
  double max_diameter() const;
  double domain_area() const;
};

// Rebuilds the edge list, adjacency and boundary classification. Corner
// flags are taken from `corner_hint` (per-vertex, may be shorter than the
// vertex list: vertices beyond it are never corners). Throws if a boundary
// vertex has non-collinear adjacent boundary edges but is not flagged as a
// corner.
void classify_boundary(Triangulation& tri, const std::vector<char>& corner_hint);

// Tensor-product space-time mesh: time partition x triangulation.
struct PrismMesh {
  TimePartition time;
  Triangulation space;
  int level = 0;
  std::vector<char> corner_flags;  // per initial-or-inherited vertex

  int num_prisms() const { return time.num_intervals() * space.num_triangles(); }
  double mesh_size() const { return std::max(time.max_length(), space.max_diameter()); }
};

PrismMesh make_initial_mesh(Domain domain);

// One uniform refinement: bisect every time interval, and replace every
// triangle by 4 children via two rounds of newest-vertex bisection.
PrismMesh refine_uniform(const PrismMesh& mesh);

// Plain-text dump for debugging: "v x y", "t i j k newest", "s t" lines.
void dump_mesh(const PrismMesh& mesh, std::ostream& os);

}  // namespace stfosls
