#include "epg/fespace.hpp"

#include "epg/core.hpp"

namespace epg {

DofMap::DofMap(const Mesh& mesh, int degree) : degree_(degree), basis_(degree), mesh_(&mesh) {
  const int k = degree;
  const int n_edge_dofs = k - 1;
  const int nv = mesh.n_vertices();
  const int ne = mesh.n_edges();
  const int nt = mesh.n_elements();
  const int n_interior = (k == 3) ? 1 : 0;
  n_dofs_ = nv + ne * n_edge_dofs + nt * n_interior;

  positions_.resize(n_dofs_);
  for (int v = 0; v < nv; ++v) positions_[v] = mesh.vertices[v];

  // Edge id: interior faces first, then boundary faces. Edge dofs run from
  // the face's first stored vertex toward the second.
  const int nif = static_cast<int>(mesh.interior_faces.size());
  auto edge_base = [&](int edge_id) { return nv + edge_id * n_edge_dofs; };
  auto edge_endpoints = [&](int edge_id) -> std::pair<int, int> {
    if (edge_id < nif)
      return {mesh.interior_faces[edge_id].a, mesh.interior_faces[edge_id].b};
    const auto& f = mesh.boundary_faces[edge_id - nif];
    return {f.a, f.b};
  };
  if (n_edge_dofs > 0) {
    for (int e = 0; e < ne; ++e) {
      const auto [a, b] = edge_endpoints(e);
      for (int m = 1; m <= n_edge_dofs; ++m) {
        const double s = static_cast<double>(m) / k;
        positions_[edge_base(e) + m - 1] = (1.0 - s) * mesh.vertices[a] + s * mesh.vertices[b];
      }
    }
  }

  element_dofs_.resize(static_cast<size_t>(nt) * n_local());
  for (int t = 0; t < nt; ++t) {
    int* dofs = &element_dofs_[static_cast<size_t>(t) * n_local()];
    for (int v = 0; v < 3; ++v) dofs[v] = mesh.tris[t][v];
    int slot = 3;
    for (int edge = 0; edge < 3; ++edge) {
      if (n_edge_dofs == 0) break;
      const auto& ref = mesh.elem_faces[t][edge];
      const int edge_id = ref.interior ? ref.index : nif + ref.index;
      const auto [fa, fb] = edge_endpoints(edge_id);
      // Local edge nodes run from local vertex (edge+1)%3 toward (edge+2)%3.
      const int ga = mesh.tris[t][(edge + 1) % 3];
      const bool forward = (ga == fa);
      for (int m = 1; m <= n_edge_dofs; ++m, ++slot) {
        const int global_m = forward ? m : k - m;
        dofs[slot] = edge_base(edge_id) + global_m - 1;
      }
    }
    if (n_interior == 1) {
      const int dof = nv + ne * n_edge_dofs + t;
      dofs[slot] = dof;
      positions_[dof] = mesh.barycenter(t);
    }
  }
}

std::vector<int> DofMap::boundary_face_dofs(int bface) const {
  const auto& f = mesh_->boundary_faces[bface];
  std::vector<int> dofs = {f.a, f.b};
  const int n_edge_dofs = degree_ - 1;
  if (n_edge_dofs > 0) {
    const int nif = static_cast<int>(mesh_->interior_faces.size());
    const int base = mesh_->n_vertices() + (nif + bface) * n_edge_dofs;
    for (int m = 0; m < n_edge_dofs; ++m) dofs.push_back(base + m);
  }
  return dofs;
}

DirichletSet dirichlet_constraints(const Mesh& mesh, const DofMap& dofmap,
                                   const ScalarField& dirichlet_value) {
  DirichletSet set;
  set.is_dirichlet.assign(dofmap.n_dofs(), 0);
  set.value.assign(dofmap.n_dofs(), 0.0);
  for (size_t bf = 0; bf < mesh.boundary_faces.size(); ++bf) {
    if (mesh.boundary_faces[bf].tag != BcTag::dirichlet) continue;
    for (int dof : dofmap.boundary_face_dofs(static_cast<int>(bf))) {
      set.is_dirichlet[dof] = 1;
      const Vec2 p = dofmap.dof_position(dof);
      set.value[dof] = dirichlet_value(p[0], p[1]);
    }
  }
  set.free_index.assign(dofmap.n_dofs(), -1);
  for (int d = 0; d < dofmap.n_dofs(); ++d) {
    if (set.is_dirichlet[d]) {
      ++set.n_pinned;
    } else {
      set.free_index[d] = set.n_free;
      set.free_dofs.push_back(d);
      ++set.n_free;
    }
  }
  return set;
}

FieldValue eval_field(const Mesh& mesh, const DofMap& dofmap, const std::vector<double>& coeff,
                      int element, const std::array<double, 3>& lambda) {
  thread_local std::vector<double> values;
  thread_local std::vector<std::array<double, 3>> grads;
  dofmap.basis().eval(lambda, values);
  dofmap.basis().eval_grad(lambda, grads);
  const auto glam = mesh.barycentric_gradients(element);
  FieldValue out;
  for (int i = 0; i < dofmap.n_local(); ++i) {
    const double c = coeff[dofmap.global_dof(element, i)];
    out.value += c * values[i];
    for (int l = 0; l < 3; ++l) {
      out.grad[0] += c * grads[i][l] * glam[l][0];
      out.grad[1] += c * grads[i][l] * glam[l][1];
    }
  }
  return out;
}

}  // namespace epg
