#pragma once

#include <functional>
#include <vector>

#include "stfosls/mesh.hpp"

namespace stfosls {

// Boundary condition imposed on the trial spaces. `slip` constrains the
// normal velocity component at boundary nodes (both components at corners)
// and the tangential traction of the stress; `noslip` removes all velocity
// boundary dofs and leaves the stress unconstrained; `none` keeps the full
// unconstrained spaces (used by the quasi-interpolation operators and in
// tests).
enum class VelocityBc { slip, noslip, none };

// --------------------------------------------------------------------------
// Per-triangle split geometry.
//
// Two splits of each triangle are in play: the Clough-Tocher split at the
// centroid carries the stress element, and the Powell-Sabin split at the
// incenter carries the edge bubbles. The Powell-Sabin point on an interior
// edge is the intersection of the segment joining the two adjacent incenters
// with that edge, so that the splits of neighbouring triangles match there;
// on boundary edges it is the midpoint.
// --------------------------------------------------------------------------
struct TriangleSplits {
  Vec2 v[3];
  Vec2 centroid;
  Vec2 incenter;
  Vec2 edge_point[3];  // on edge (v_j, v_{j+1})

  // Clough-Tocher cell j = (v_j, v_{j+1}, centroid)
  std::array<Vec2, 3> ct_cell(int j) const {
    return {v[j], v[(j + 1) % 3], centroid};
  }
  // Powell-Sabin cells 2j = (v_j, m_j, z), 2j+1 = (m_j, v_{j+1}, z)
  std::array<Vec2, 3> ps_cell(int c) const {
    const int j = c / 2;
    if (c % 2 == 0) return {v[j], edge_point[j], incenter};
    return {edge_point[j], v[(j + 1) % 3], incenter};
  }

  int find_ct_cell(const Vec2& p) const;
  int find_ps_cell(const Vec2& p) const;
};

std::vector<TriangleSplits> compute_splits(const Triangulation& tri);

// Common refinement of the two splits, used to integrate products of
// functions that are piecewise polynomial with respect to different splits.
struct IntegrationCell {
  Vec2 p[3];
  int ct = -1;  // parent Clough-Tocher cell
  int ps = -1;  // parent Powell-Sabin cell
};

std::vector<IntegrationCell> common_refinement(const TriangleSplits& s);

// --------------------------------------------------------------------------
// Edge bubble: a continuous vector field supported on the 1-2 triangles
// adjacent to an edge, piecewise linear with respect to their Powell-Sabin
// splits, vanishing on the patch boundary, with constant divergence per
// macro triangle and normal moment int_e phi.n = |e|.
// --------------------------------------------------------------------------
struct EdgeBubble {
  int edge = -1;
  int tris[2] = {-1, -1};
  // values at the 7 Powell-Sabin nodes of each adjacent triangle, ordered as
  // v0,v1,v2,m0,m1,m2,z (only the node on `edge` and z are nonzero)
  std::array<std::array<Vec2, 7>, 2> node_value{};
  double div_value[2] = {0.0, 0.0};  // per adjacent triangle
};

EdgeBubble build_edge_bubble(const Triangulation& tri, const std::vector<TriangleSplits>& splits,
                             int edge);

// --------------------------------------------------------------------------
// Velocity space: continuous piecewise linear vector fields with the chosen
// boundary constraint, optionally enriched by one bubble per (interior)
// edge. This is the spatial factor; in time it is paired with continuous
// piecewise linears.
// --------------------------------------------------------------------------
struct VelocitySpace {
  VelocityBc bc = VelocityBc::slip;
  bool with_bubbles = true;

  struct VertexDofs {
    int count = 0;
    int id[2] = {-1, -1};
    Vec2 dir[2];  // unit directions of the dofs
  };
  std::vector<VertexDofs> vertex_dofs;
  std::vector<int> bubble_dof;  // per edge, -1 if absent
  std::vector<int> bubble_of_dof;  // dof id -> edge, for dofs >= nodal_dim
  std::vector<EdgeBubble> bubbles;  // per edge with a bubble (indexed via bubble_index)
  std::vector<int> bubble_index;    // per edge, index into `bubbles`, -1 if none
  int nodal_dim = 0;
  int dim = 0;
};

// Evaluation of all basis functions supported on a triangle at a point.
struct VelocityEval {
  int dof;
  Vec2 value;
  Mat2 grad;
  double div;
};

// --------------------------------------------------------------------------
// Stress space: per triangle the 9-dimensional space of piecewise linear
// symmetric tensors on the Clough-Tocher split with w.n continuous across
// the internal edges, piecewise constant divergence with continuous normal
// component, and constant tangential trace (w n).tau per exterior edge.
// The degrees of freedom are edge moments: the zeroth moment of (w n).tau
// and the zeroth and first moments of (w n).n per edge.
// --------------------------------------------------------------------------
struct TriangleStressBasis {
  // shape s, Clough-Tocher cell c, corner k (corners: v_c, v_{c+1}, centroid)
  Sym2 value[9][3][3];
  Vec2 divergence[9][3];  // constant per cell
};

struct StressSpace {
  bool constrain_boundary_tangential = true;  // slip case
  std::vector<int> edge_dof[3];  // [moment][edge]; moment 0 = tangential,
                                 // 1 = normal zeroth, 2 = normal first; -1 if constrained
  std::vector<TriangleStressBasis> local;  // per triangle
  int dim = 0;
};

struct StressEval {
  int dof;  // global dof, -1 for a constrained (boundary tangential) shape
  Sym2 value;
  Vec2 divergence;
};

// Builds the local constraint nullspace on one triangle and the basis dual
// to the 9 edge moments. `edge_orient[j]` flips the global tangent/normal
// orientation of local edge j (true: local direction v_j -> v_{j+1} agrees
// with the global low-to-high direction). Throws if the constrained space
// does not have dimension 9 or the moment matrix is singular.
TriangleStressBasis build_stress_local_basis(const TriangleSplits& s, const bool edge_orient[3],
                                             const double edge_len[3]);

struct PressureSpace {
  int dim = 0;  // one dof per triangle (spatial factor; per prism globally)
};

// --------------------------------------------------------------------------
// The assembled triple of spatial spaces on one mesh.
// --------------------------------------------------------------------------
struct FeSpaces {
  const PrismMesh* mesh = nullptr;
  VelocityBc bc = VelocityBc::slip;
  bool with_bubbles = true;

  std::vector<TriangleSplits> splits;
  std::vector<std::vector<IntegrationCell>> cells;  // per triangle
  VelocitySpace velocity;
  StressSpace stress;
  PressureSpace pressure;

  // evaluation (throws if the point lies outside the triangle)
  std::vector<VelocityEval> eval_velocity(int tri, const Vec2& p) const;
  std::vector<StressEval> eval_stress(int tri, const Vec2& p) const;

  // cell-tagged evaluation used by quadrature loops (no point location)
  std::vector<VelocityEval> eval_velocity_in_cell(int tri, const Vec2& p, int ps_cell) const;
  std::vector<StressEval> eval_stress_in_cell(int tri, const Vec2& p, int ct_cell) const;

  // global-to-local coefficient gather for one triangle
  std::vector<int> velocity_dofs_on_tri(int tri) const;
};

FeSpaces build_spaces(const PrismMesh& mesh, VelocityBc bc, bool with_bubbles);

// --------------------------------------------------------------------------
// Interpolation operators (spatial). These serve as independent oracles for
// the commuting-diagram and approximation properties of the spaces.
// --------------------------------------------------------------------------
using VectorField = std::function<Vec2(const Vec2&)>;
using TensorField = std::function<Sym2(const Vec2&)>;

// Scott-Zhang type nodal interpolant onto the piecewise linear part;
// boundary nodes use edge moments against the dual linear weight of the
// lowest-index adjacent boundary edge (both adjacent edges at corners).
std::vector<double> scott_zhang_velocity(const FeSpaces& sp, const VectorField& v);

// Nodal interpolant plus bubble corrections restoring all edge normal
// moments; satisfies div(interpolant) = P0-projection of div v.
std::vector<double> quasi_interpolate_velocity(const FeSpaces& sp, const VectorField& v);

// Edge-moment interpolant onto the stress space (boundary tangential moments
// are dropped when constrained).
std::vector<double> interpolate_stress(const FeSpaces& sp, const TensorField& w);

// L2(Omega)-orthogonal projection onto piecewise constants.
std::vector<double> project_p0(const Triangulation& tri, const std::function<double(const Vec2&)>& f);

}  // namespace stfosls
