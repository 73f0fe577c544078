#pragma once

#include <functional>
#include <vector>

#include "epg/lagrange.hpp"
#include "epg/mesh.hpp"

namespace epg {

using ScalarField = std::function<double(double, double)>;
using VectorField = std::function<Vec2(double, double)>;

// Global numbering for the continuous Lagrange space of degree k:
// vertex dofs first, then (k-1) dofs per edge (interior faces first, then
// boundary faces, ordered from the lower-indexed edge endpoint), then one
// interior dof per element for k=3.
class DofMap {
 public:
  DofMap(const Mesh& mesh, int degree);

  int degree() const { return degree_; }
  int n_dofs() const { return n_dofs_; }
  int n_local() const { return basis_.size(); }
  const LagrangeBasis& basis() const { return basis_; }

  // Global dof of local node `i` of element `t` (local order as in LagrangeBasis).
  int global_dof(int t, int i) const { return element_dofs_[static_cast<size_t>(t) * n_local() + i]; }

  Vec2 dof_position(int dof) const { return positions_[dof]; }

  // Dofs sitting on a given boundary face: its two vertices + edge dofs.
  std::vector<int> boundary_face_dofs(int bface) const;

 private:
  int degree_;
  int n_dofs_;
  LagrangeBasis basis_;
  std::vector<int> element_dofs_;
  std::vector<Vec2> positions_;
  const Mesh* mesh_;
};

// Dirichlet constraints: which dofs are pinned and to what value.
struct DirichletSet {
  std::vector<unsigned char> is_dirichlet;  // per dof
  std::vector<double> value;                // per dof, 0 where free
  std::vector<int> free_index;              // dof -> reduced index, -1 if pinned
  std::vector<int> free_dofs;               // reduced index -> dof
  int n_free = 0;
  int n_pinned = 0;
};

// Pins every dof on a Dirichlet-tagged boundary face to the interpolated
// boundary value.
DirichletSet dirichlet_constraints(const Mesh& mesh, const DofMap& dofmap,
                                   const ScalarField& dirichlet_value);

// Evaluate a coefficient field (values and physical gradient) at a barycentric
// point of an element.
struct FieldValue {
  double value = 0.0;
  Vec2 grad{0.0, 0.0};
};
FieldValue eval_field(const Mesh& mesh, const DofMap& dofmap, const std::vector<double>& coeff,
                      int element, const std::array<double, 3>& lambda);

}  // namespace epg
