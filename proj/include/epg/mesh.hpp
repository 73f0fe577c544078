#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "epg/core.hpp"

namespace epg {

enum class BcTag { dirichlet, neumann };

// Conforming triangulation with oriented face topology. Immutable after
// construction; safe for concurrent read-only access.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> tris;  // CCW vertex indices
  std::vector<double> area;

  // Interior face shared by elements (left, right), left < right. Vertices
  // (a, b) as traversed CCW by the left element; the unit normal points out
  // of left, i.e. from the lower-indexed element to the higher-indexed one.
  struct InteriorFace {
    int a = -1, b = -1;
    int left = -1, right = -1;
    int left_local = -1, right_local = -1;  // local edge index in each element
    Vec2 normal{0, 0};
    double length = 0;
  };
  // Boundary face with (a, b) as traversed CCW by the owner; outward normal.
  struct BoundaryFace {
    int a = -1, b = -1;
    int owner = -1;
    int owner_local = -1;
    Vec2 normal{0, 0};
    double length = 0;
    BcTag tag = BcTag::neumann;
  };
  std::vector<InteriorFace> interior_faces;
  std::vector<BoundaryFace> boundary_faces;

  // Per element, for each local edge (edge i is opposite local vertex i):
  // which face it is and on which side this element sits.
  struct FaceRef {
    bool interior = false;
    int index = -1;
    bool is_left = true;  // interior: left side; boundary: always true
  };
  std::vector<std::array<FaceRef, 3>> elem_faces;

  int n_elements() const { return static_cast<int>(tris.size()); }
  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_edges() const {
    return static_cast<int>(interior_faces.size() + boundary_faces.size());
  }
  int n_dirichlet_faces() const;

  Vec2 barycenter(int t) const;
  double max_diameter() const;
  // Constant gradients of the barycentric coordinates of element t.
  std::array<Vec2, 3> barycentric_gradients(int t) const;
};

// Axis-aligned box with a conductivity value; boxes override the background.
struct KRegion {
  double xmin, ymin, xmax, ymax;
  double value;
};

// Axis-aligned boundary segment carrying a Dirichlet pressure value.
struct DirichletSegment {
  int axis;      // 0: segment on a vertical line x = coord; 1: horizontal y = coord
  double coord;  // the fixed coordinate
  double lo, hi; // range of the running coordinate
  double value;  // boundary pressure

  bool contains(Vec2 p, double tol = kGeomTol) const {
    const double fixed = axis == 0 ? p[0] : p[1];
    const double run = axis == 0 ? p[1] : p[0];
    return std::abs(fixed - coord) <= tol && run >= lo - tol && run <= hi + tol;
  }
};

enum class DomainShape { unit_square, ten_shape, l_shape };

// Union of unit squares on an integer lattice, with a piecewise-constant
// conductivity map and a boundary-condition assignment.
struct DomainSpec {
  DomainShape shape = DomainShape::unit_square;
  std::vector<std::array<int, 2>> cells;  // lower-left corners of unit squares
  double base_conductivity = 1.0;
  std::vector<KRegion> k_regions;
  bool all_dirichlet = false;             // whole boundary Dirichlet
  std::vector<DirichletSegment> dirichlet_segments;
  int base_resolution = 1;                // triangles per unit square = 2*n^2 at level 0
};

DomainSpec domain_spec(DomainShape shape);

// Structured mesh: each unit square is split into an n x n grid of squares,
// each cut along the (+1,+1) diagonal, with n = base_resolution * 2^level.
// Conductivity-region boundaries must land on grid lines; a resolution that
// misaligns them is rejected.
Mesh build_structured_mesh(const DomainSpec& spec, int level);

// Explicit per-unit-square resolution (used by tests; same alignment checks).
Mesh build_structured_mesh_n(const DomainSpec& spec, int n_per_unit);

// Red refinement: every triangle split into 4 congruent children by edge
// midpoints; boundary tags inherited.
Mesh uniform_refine(const Mesh& mesh);

// Per-element conductivity from the region map. Every element must lie
// entirely inside one region (checked via its barycenter plus vertex tests).
std::vector<double> conductivity_field(const DomainSpec& spec, const Mesh& mesh);

// Structural invariants: positive areas, unit normals, per-element polygon
// closure, conforming face records. Throws ValidationError on failure.
void validate_mesh(const Mesh& mesh);

// Assemble topology from raw vertices, triangles and tagged boundary edges
// (pairs may be listed in either orientation). Used by the readers/builders.
Mesh finish_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> tris,
                 const std::vector<std::array<int, 2>>& boundary_edges,
                 const std::vector<BcTag>& boundary_tags);

// Plain-text mesh format:
//   nodes N        followed by N lines "x y"
//   elements M     followed by M lines "i0 i1 i2"   (0-based, CCW)
//   boundary B     followed by B lines "i0 i1 tag"  (tag D or N)
void write_mesh_text(const Mesh& mesh, std::ostream& out);
Mesh read_mesh_text(std::istream& in);
void write_mesh_file(const Mesh& mesh, const std::string& path);
Mesh read_mesh_file(const std::string& path);

}  // namespace epg
