#include "epg/darcy.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "epg/core.hpp"
#include "epg/quadrature.hpp"

namespace epg {

namespace {

// Exactness degrees: data integrals (f, p_D, g_N and all bubble-related
// terms) use 10/8; error functionals involve squared bubble gradients of
// degree up to 12, hence the larger rules there.
constexpr int kVolumeDegree = 10;
constexpr int kEdgeDegree = 8;
constexpr int kErrorVolumeDegree = 12;
constexpr int kErrorEdgeDegree = 10;

// Basis values and barycentric derivatives tabulated at rule points.
struct BasisTable {
  std::vector<std::vector<double>> value;                  // [q][i]
  std::vector<std::vector<std::array<double, 3>>> dlam;    // [q][i]
};

BasisTable tabulate(const LagrangeBasis& basis, const TriangleRule& rule) {
  BasisTable t;
  t.value.resize(rule.points.size());
  t.dlam.resize(rule.points.size());
  for (size_t q = 0; q < rule.points.size(); ++q) {
    basis.eval(rule.points[q], t.value[q]);
    basis.eval_grad(rule.points[q], t.dlam[q]);
  }
  return t;
}

// Barycentric coordinates along a local edge (the edge opposite local vertex
// `local_edge`), at parameter s measured from the face's first stored vertex.
std::array<double, 3> edge_lambda(int local_edge, bool forward, double s) {
  std::array<double, 3> lam{0.0, 0.0, 0.0};
  const int u = (local_edge + 1) % 3, v = (local_edge + 2) % 3;
  lam[u] = forward ? 1.0 - s : s;
  lam[v] = forward ? s : 1.0 - s;
  return lam;
}

Vec2 physical_point(const Mesh& mesh, int element, const std::array<double, 3>& lam) {
  const auto& tri = mesh.tris[element];
  Vec2 p{0.0, 0.0};
  for (int v = 0; v < 3; ++v) p = p + lam[v] * mesh.vertices[tri[v]];
  return p;
}

// grad(p_c) at a tabulated quadrature point.
Vec2 coeff_gradient(const DofMap& dofmap, const std::vector<double>& coeff, int element,
                    const std::vector<std::array<double, 3>>& dlam_row,
                    const std::array<Vec2, 3>& glam) {
  Vec2 g{0.0, 0.0};
  for (int i = 0; i < dofmap.n_local(); ++i) {
    const double c = coeff[dofmap.global_dof(element, i)];
    for (int l = 0; l < 3; ++l) {
      g[0] += c * dlam_row[i][l] * glam[l][0];
      g[1] += c * dlam_row[i][l] * glam[l][1];
    }
  }
  return g;
}

Vec2 bubble_gradient(const BubbleBasis& basis, const std::array<double, 3>& lam,
                     const std::array<Vec2, 3>& glam) {
  double value;
  std::array<double, 3> dl;
  bubble_eval(basis, lam, value, dl);
  return {dl[0] * glam[0][0] + dl[1] * glam[1][0] + dl[2] * glam[2][0],
          dl[0] * glam[0][1] + dl[1] * glam[1][1] + dl[2] * glam[2][1]};
}

// Per-element integral of a scalar field.
std::vector<double> integrate_per_element(const Mesh& mesh, const ScalarField& f, Exec exec) {
  std::vector<double> out(mesh.n_elements(), 0.0);
  if (!f) return out;
  const TriangleRule rule = triangle_rule(kVolumeDegree);
  parallel_for(exec, mesh.n_elements(), [&](std::int64_t t) {
    double sum = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 x = physical_point(mesh, static_cast<int>(t), rule.points[q]);
      sum += rule.weights[q] * f(x[0], x[1]);
    }
    out[t] = sum * 2.0 * mesh.area[t];
  });
  return out;
}

void require_dirichlet(const Mesh& mesh) {
  if (mesh.n_dirichlet_faces() == 0)
    throw ValidationError("darcy: pure Neumann problem is singular; need a Dirichlet face");
}

}  // namespace

CgSystem assemble_cg(const Mesh& mesh, const DofMap& dofmap, const DirichletSet& bc,
                     const ProblemData& data, Exec exec) {
  require_dirichlet(mesh);
  const int nt = mesh.n_elements();
  const int nl = dofmap.n_local();
  const TriangleRule rule = triangle_rule(kVolumeDegree);
  const BasisTable table = tabulate(dofmap.basis(), rule);

  // Independent per-element local matrices and loads, then a serial scatter.
  std::vector<double> local_mat(static_cast<size_t>(nt) * nl * nl);
  std::vector<double> local_rhs(static_cast<size_t>(nt) * nl);
  parallel_for(exec, nt, [&](std::int64_t t) {
    const auto glam = mesh.barycentric_gradients(static_cast<int>(t));
    const double k_t = data.conductivity[t];
    const double jac = 2.0 * mesh.area[t];
    double* a = &local_mat[static_cast<size_t>(t) * nl * nl];
    double* b = &local_rhs[static_cast<size_t>(t) * nl];
    std::fill(a, a + nl * nl, 0.0);
    std::fill(b, b + nl, 0.0);
    std::vector<Vec2> grad(nl);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      for (int i = 0; i < nl; ++i) {
        grad[i] = {0.0, 0.0};
        for (int l = 0; l < 3; ++l) {
          grad[i][0] += table.dlam[q][i][l] * glam[l][0];
          grad[i][1] += table.dlam[q][i][l] * glam[l][1];
        }
      }
      const double w = rule.weights[q] * jac;
      for (int i = 0; i < nl; ++i)
        for (int j = 0; j <= i; ++j) {
          const double v = w * k_t * dot(grad[i], grad[j]);
          a[i * nl + j] += v;
          if (i != j) a[j * nl + i] += v;
        }
      if (data.source) {
        const Vec2 x = physical_point(mesh, static_cast<int>(t), rule.points[q]);
        const double fw = w * data.source(x[0], x[1]);
        for (int i = 0; i < nl; ++i) b[i] += fw * table.value[q][i];
      }
    }
  });

  // Neumann loads, per boundary face.
  const int nbf = static_cast<int>(mesh.boundary_faces.size());
  const EdgeRule erule = edge_rule(kEdgeDegree);
  std::vector<double> neumann_rhs(static_cast<size_t>(nbf) * nl, 0.0);
  if (data.neumann) {
    parallel_for(exec, nbf, [&](std::int64_t bf) {
      const auto& face = mesh.boundary_faces[bf];
      if (face.tag != BcTag::neumann) return;
      double* b = &neumann_rhs[static_cast<size_t>(bf) * nl];
      std::vector<double> values;
      for (size_t q = 0; q < erule.points.size(); ++q) {
        const auto lam = edge_lambda(face.owner_local, true, erule.points[q]);
        dofmap.basis().eval(lam, values);
        const Vec2 x = physical_point(mesh, face.owner, lam);
        const double w = erule.weights[q] * face.length * data.neumann(x[0], x[1]);
        for (int i = 0; i < nl; ++i) b[i] -= w * values[i];
      }
    });
  }

  // Serial scatter with Dirichlet elimination.
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<size_t>(nt) * nl * nl);
  std::vector<double> rhs(bc.n_free, 0.0);
  for (int t = 0; t < nt; ++t) {
    const double* a = &local_mat[static_cast<size_t>(t) * nl * nl];
    const double* b = &local_rhs[static_cast<size_t>(t) * nl];
    for (int i = 0; i < nl; ++i) {
      const int gi = dofmap.global_dof(t, i);
      const int fi = bc.free_index[gi];
      if (fi < 0) continue;
      rhs[fi] += b[i];
      for (int j = 0; j < nl; ++j) {
        const int gj = dofmap.global_dof(t, j);
        const int fj = bc.free_index[gj];
        if (fj >= 0)
          triplets.push_back({fi, fj, a[i * nl + j]});
        else
          rhs[fi] -= a[i * nl + j] * bc.value[gj];
      }
    }
  }
  for (int bf = 0; bf < nbf; ++bf) {
    const double* b = &neumann_rhs[static_cast<size_t>(bf) * nl];
    const int owner = mesh.boundary_faces[bf].owner;
    for (int i = 0; i < nl; ++i) {
      const int fi = bc.free_index[dofmap.global_dof(owner, i)];
      if (fi >= 0) rhs[fi] += b[i];
    }
  }

  CgSystem sys;
  sys.matrix = SparseMatrix::from_triplets(bc.n_free, std::move(triplets));
  sys.rhs = std::move(rhs);
  return sys;
}

PressureSolution solve_cg_pressure(const Mesh& mesh, const DofMap& dofmap,
                                   const ProblemData& data, double rtol, Exec exec) {
  const DirichletSet bc = dirichlet_constraints(mesh, dofmap, data.dirichlet);
  const CgSystem sys = assemble_cg(mesh, dofmap, bc, data, exec);

  PressureSolution sol;
  sol.method = Method::cg;
  sol.degree = dofmap.degree();
  std::vector<double> x;
  if (bc.n_free > 0) {
    x = solve_spd(sys.matrix, sys.rhs, rtol, sol.step1_report);
    if (!sol.step1_report.converged)
      throw SolverError("solve_cg_pressure: PCG did not reach rtol (residual " +
                        std::to_string(sol.step1_report.rel_residual_internal) + " after " +
                        std::to_string(sol.step1_report.iterations) + " iterations)");
  } else {
    sol.step1_report.converged = true;
    sol.step1_report.method = "none";
  }
  sol.coeff.assign(dofmap.n_dofs(), 0.0);
  for (int d = 0; d < dofmap.n_dofs(); ++d)
    sol.coeff[d] = bc.is_dirichlet[d] ? bc.value[d] : x[bc.free_index[d]];
  return sol;
}

Vec2 velocity_at(const Mesh& mesh, const DofMap& dofmap, const PressureSolution& sol,
                 const std::vector<BubbleBasis>& bases, const ProblemData& data, int element,
                 const std::array<double, 3>& lambda) {
  const auto glam = mesh.barycentric_gradients(element);
  const FieldValue fv = eval_field(mesh, dofmap, sol.coeff, element, lambda);
  Vec2 grad = fv.grad;
  if (!sol.alpha.empty() && sol.alpha[element] != 0.0) {
    const Vec2 gb = bubble_gradient(bases[element], lambda, glam);
    grad = grad + sol.alpha[element] * gb;
  }
  return {-data.conductivity[element] * grad[0], -data.conductivity[element] * grad[1]};
}

FaceFluxField recover_velocity(const Mesh& mesh, const DofMap& dofmap,
                               const PressureSolution& sol, const ProblemData& data,
                               Exec exec) {
  FaceFluxField flux;
  flux.interior.assign(mesh.interior_faces.size(), 0.0);
  flux.boundary.assign(mesh.boundary_faces.size(), 0.0);
  const EdgeRule erule = edge_rule(kEdgeDegree);
  const bool has_bubble = !sol.alpha.empty();

  parallel_for(exec, static_cast<std::int64_t>(mesh.interior_faces.size()), [&](std::int64_t e) {
    const auto& face = mesh.interior_faces[e];
    const auto glam_l = mesh.barycentric_gradients(face.left);
    const auto glam_r = mesh.barycentric_gradients(face.right);
    const double k_l = data.conductivity[face.left];
    const double k_r = data.conductivity[face.right];
    thread_local std::vector<std::array<double, 3>> dlam;
    double sum = 0.0;
    for (size_t q = 0; q < erule.points.size(); ++q) {
      const double s = erule.points[q];
      const auto lam_l = edge_lambda(face.left_local, true, s);
      const auto lam_r = edge_lambda(face.right_local, false, s);
      dofmap.basis().eval_grad(lam_l, dlam);
      const Vec2 gl = coeff_gradient(dofmap, sol.coeff, face.left, dlam, glam_l);
      dofmap.basis().eval_grad(lam_r, dlam);
      const Vec2 gr = coeff_gradient(dofmap, sol.coeff, face.right, dlam, glam_r);
      sum += erule.weights[q] * 0.5 * (-k_l * dot(gl, face.normal) - k_r * dot(gr, face.normal));
    }
    sum *= face.length;
    // Bubble part in closed form: the flux normalization makes the one-sided
    // bubble flux through the face equal to the owner's amplitude.
    if (has_bubble) sum -= 0.5 * (sol.alpha[face.left] - sol.alpha[face.right]);
    flux.interior[e] = sum;
  });

  parallel_for(exec, static_cast<std::int64_t>(mesh.boundary_faces.size()), [&](std::int64_t e) {
    const auto& face = mesh.boundary_faces[e];
    double sum = 0.0;
    if (face.tag == BcTag::neumann) {
      if (data.neumann) {
        for (size_t q = 0; q < erule.points.size(); ++q) {
          const auto lam = edge_lambda(face.owner_local, true, erule.points[q]);
          const Vec2 x = physical_point(mesh, face.owner, lam);
          sum += erule.weights[q] * data.neumann(x[0], x[1]);
        }
        sum *= face.length;
      }
    } else {
      const auto glam = mesh.barycentric_gradients(face.owner);
      const double k = data.conductivity[face.owner];
      thread_local std::vector<std::array<double, 3>> dlam;
      for (size_t q = 0; q < erule.points.size(); ++q) {
        const auto lam = edge_lambda(face.owner_local, true, erule.points[q]);
        dofmap.basis().eval_grad(lam, dlam);
        const Vec2 g = coeff_gradient(dofmap, sol.coeff, face.owner, dlam, glam);
        sum += erule.weights[q] * (-k * dot(g, face.normal));
      }
      sum *= face.length;
      if (has_bubble) sum -= sol.alpha[face.owner];
    }
    flux.boundary[e] = sum;
  });

  return flux;
}

ResidualField local_conservation_residual(const Mesh& mesh, const FaceFluxField& flux,
                                          const ScalarField& source, Exec exec) {
  ResidualField out;
  out.per_element = integrate_per_element(mesh, source, exec);
  for (auto& v : out.per_element) v = -v;
  for (size_t e = 0; e < mesh.interior_faces.size(); ++e) {
    const auto& face = mesh.interior_faces[e];
    out.per_element[face.left] += flux.interior[e];
    out.per_element[face.right] -= flux.interior[e];
  }
  for (size_t e = 0; e < mesh.boundary_faces.size(); ++e)
    out.per_element[mesh.boundary_faces[e].owner] += flux.boundary[e];
  for (size_t t = 0; t < out.per_element.size(); ++t) {
    const double a = std::abs(out.per_element[t]);
    if (a > out.max_abs) {
      out.max_abs = a;
      out.argmax = static_cast<int>(t);
    }
  }
  return out;
}

std::vector<unsigned char> classify_inflow_outflow(const Mesh& mesh, const FaceFluxField& flux) {
  std::vector<unsigned char> inflow(mesh.boundary_faces.size(), 0);
  for (size_t e = 0; e < mesh.boundary_faces.size(); ++e)
    if (flux.boundary[e] < 0.0) inflow[e] = 1;
  return inflow;
}

BubbleCorrection assemble_bubble_correction(const Mesh& mesh, const DofMap& dofmap,
                                            const ProblemData& data,
                                            const PressureSolution& first_step, Exec exec) {
  require_dirichlet(mesh);

  // Every element-adjacency component needs a Dirichlet face, otherwise the
  // correction system is singular on that component.
  {
    std::vector<int> component(mesh.n_elements(), -1);
    std::vector<char> has_dirichlet;
    for (int seed = 0; seed < mesh.n_elements(); ++seed) {
      if (component[seed] >= 0) continue;
      const int c = static_cast<int>(has_dirichlet.size());
      has_dirichlet.push_back(0);
      std::queue<int> bfs;
      bfs.push(seed);
      component[seed] = c;
      while (!bfs.empty()) {
        const int t = bfs.front();
        bfs.pop();
        for (const auto& ref : mesh.elem_faces[t]) {
          if (!ref.interior) {
            if (mesh.boundary_faces[ref.index].tag == BcTag::dirichlet) has_dirichlet[c] = 1;
            continue;
          }
          const auto& f = mesh.interior_faces[ref.index];
          const int other = ref.is_left ? f.right : f.left;
          if (component[other] < 0) {
            component[other] = c;
            bfs.push(other);
          }
        }
      }
      if (!has_dirichlet[c])
        throw ValidationError(
            "assemble_bubble_correction: a mesh component has no Dirichlet face; the "
            "correction system is singular");
    }
  }

  // First-step recovered fluxes; the defect they leave per element drives the
  // correction.
  PressureSolution cg_part = first_step;
  cg_part.alpha.clear();
  const FaceFluxField flux = recover_velocity(mesh, dofmap, cg_part, data, exec);
  ResidualField defect = local_conservation_residual(mesh, flux, data.source, exec);

  std::vector<Triplet> triplets;
  triplets.reserve(4 * mesh.interior_faces.size() + mesh.boundary_faces.size());
  for (const auto& face : mesh.interior_faces) {
    triplets.push_back({face.left, face.left, 0.5});
    triplets.push_back({face.right, face.right, 0.5});
    triplets.push_back({face.left, face.right, -0.5});
    triplets.push_back({face.right, face.left, -0.5});
  }
  for (const auto& face : mesh.boundary_faces)
    if (face.tag == BcTag::dirichlet) triplets.push_back({face.owner, face.owner, 1.0});

  BubbleCorrection corr;
  corr.matrix = SparseMatrix::from_triplets(mesh.n_elements(), std::move(triplets));
  corr.rhs = std::move(defect.per_element);
  return corr;
}

PressureSolution solve_epg(const Mesh& mesh, const DofMap& dofmap, const ProblemData& data,
                           double rtol, Exec exec) {
  PressureSolution sol = solve_cg_pressure(mesh, dofmap, data, rtol, exec);
  const BubbleCorrection corr = assemble_bubble_correction(mesh, dofmap, data, sol, exec);
  sol.alpha = solve_spd(corr.matrix, corr.rhs, rtol, sol.step2_report);
  if (!sol.step2_report.converged)
    throw SolverError("solve_epg: bubble correction solve did not converge");
  sol.method = Method::epg;
  return sol;
}

ErrorNorms energy_and_velocity_errors(const Mesh& mesh, const DofMap& dofmap,
                                      const PressureSolution& sol,
                                      const std::vector<BubbleBasis>& bases,
                                      const ProblemData& data, Exec exec) {
  if (!data.exact_pressure || !data.exact_pressure_grad)
    throw ValidationError("energy_and_velocity_errors: no exact solution in problem data");

  const int nt = mesh.n_elements();
  const TriangleRule rule = triangle_rule(kErrorVolumeDegree);
  const BasisTable table = tabulate(dofmap.basis(), rule);
  const bool has_bubble = !sol.alpha.empty();

  // Per-element squared contributions, reduced serially.
  std::vector<double> energy_sq(nt), vel_sq(nt), exact_energy_sq(nt), exact_vel_sq(nt);
  parallel_for(exec, nt, [&](std::int64_t t) {
    const auto glam = mesh.barycentric_gradients(static_cast<int>(t));
    const double k_t = data.conductivity[t];
    const double jac = 2.0 * mesh.area[t];
    double e_sq = 0.0, v_sq = 0.0, xe_sq = 0.0, xv_sq = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 x = physical_point(mesh, static_cast<int>(t), rule.points[q]);
      Vec2 grad_h = coeff_gradient(dofmap, sol.coeff, static_cast<int>(t), table.dlam[q], glam);
      if (has_bubble && sol.alpha[t] != 0.0) {
        const Vec2 gb = bubble_gradient(bases[t], rule.points[q], glam);
        grad_h = grad_h + sol.alpha[t] * gb;
      }
      const Vec2 grad_ex = data.exact_pressure_grad(x[0], x[1]);
      const Vec2 dg = grad_ex - grad_h;
      const double w = rule.weights[q] * jac;
      e_sq += w * k_t * dot(dg, dg);
      xe_sq += w * k_t * dot(grad_ex, grad_ex);
      // u = -K grad p, so |u - u_h| = K |grad p - grad p_h| for scalar K.
      v_sq += w * k_t * k_t * dot(dg, dg);
      xv_sq += w * k_t * k_t * dot(grad_ex, grad_ex);
    }
    energy_sq[t] = e_sq;
    vel_sq[t] = v_sq;
    exact_energy_sq[t] = xe_sq;
    exact_vel_sq[t] = xv_sq;
  });

  ErrorNorms out;
  for (int t = 0; t < nt; ++t) {
    out.energy += energy_sq[t];
    out.velocity += vel_sq[t];
    out.exact_energy += exact_energy_sq[t];
    out.exact_velocity += exact_vel_sq[t];
  }

  // Dirichlet jump term of the energy norm (the bubble vanishes on faces).
  const EdgeRule erule = edge_rule(kErrorEdgeDegree);
  const int nbf = static_cast<int>(mesh.boundary_faces.size());
  std::vector<double> jump_sq(nbf, 0.0);
  parallel_for(exec, nbf, [&](std::int64_t e) {
    const auto& face = mesh.boundary_faces[e];
    if (face.tag != BcTag::dirichlet) return;
    double sum = 0.0;
    for (size_t q = 0; q < erule.points.size(); ++q) {
      const auto lam = edge_lambda(face.owner_local, true, erule.points[q]);
      const Vec2 x = physical_point(mesh, face.owner, lam);
      const FieldValue fv = eval_field(mesh, dofmap, sol.coeff, face.owner, lam);
      const double diff = data.exact_pressure(x[0], x[1]) - fv.value;
      sum += erule.weights[q] * diff * diff;
    }
    jump_sq[e] = sum;  // (1/h_e) and the face length cancel with h_e = |e|
  });
  for (int e = 0; e < nbf; ++e) out.energy += jump_sq[e];

  // Face-trace error of the recovered normal flux density.
  const int nif = static_cast<int>(mesh.interior_faces.size());
  std::vector<double> trace_sq(nif + nbf, 0.0);
  parallel_for(exec, nif, [&](std::int64_t e) {
    const auto& face = mesh.interior_faces[e];
    const auto glam_l = mesh.barycentric_gradients(face.left);
    const auto glam_r = mesh.barycentric_gradients(face.right);
    const double k_l = data.conductivity[face.left];
    const double k_r = data.conductivity[face.right];
    thread_local std::vector<std::array<double, 3>> dlam;
    double sum = 0.0;
    for (size_t q = 0; q < erule.points.size(); ++q) {
      const double s = erule.points[q];
      const auto lam_l = edge_lambda(face.left_local, true, s);
      const auto lam_r = edge_lambda(face.right_local, false, s);
      dofmap.basis().eval_grad(lam_l, dlam);
      Vec2 gl = coeff_gradient(dofmap, sol.coeff, face.left, dlam, glam_l);
      dofmap.basis().eval_grad(lam_r, dlam);
      Vec2 gr = coeff_gradient(dofmap, sol.coeff, face.right, dlam, glam_r);
      if (has_bubble) {
        gl = gl + sol.alpha[face.left] * bubble_gradient(bases[face.left], lam_l, glam_l);
        gr = gr + sol.alpha[face.right] * bubble_gradient(bases[face.right], lam_r, glam_r);
      }
      const double un_h = 0.5 * (-k_l * dot(gl, face.normal) - k_r * dot(gr, face.normal));
      const Vec2 x = physical_point(mesh, face.left, lam_l);
      const Vec2 gex = data.exact_pressure_grad(x[0], x[1]);
      const double k_ex = 0.5 * (k_l + k_r);
      const double un_ex = -k_ex * dot(gex, face.normal);
      const double diff = un_ex - un_h;
      sum += erule.weights[q] * diff * diff;
    }
    trace_sq[e] = sum * face.length;
  });
  parallel_for(exec, nbf, [&](std::int64_t e) {
    const auto& face = mesh.boundary_faces[e];
    if (face.tag != BcTag::dirichlet) return;
    const auto glam = mesh.barycentric_gradients(face.owner);
    const double k = data.conductivity[face.owner];
    thread_local std::vector<std::array<double, 3>> dlam;
    double sum = 0.0;
    for (size_t q = 0; q < erule.points.size(); ++q) {
      const auto lam = edge_lambda(face.owner_local, true, erule.points[q]);
      dofmap.basis().eval_grad(lam, dlam);
      Vec2 g = coeff_gradient(dofmap, sol.coeff, face.owner, dlam, glam);
      if (has_bubble) g = g + sol.alpha[face.owner] * bubble_gradient(bases[face.owner], lam, glam);
      const Vec2 x = physical_point(mesh, face.owner, lam);
      const Vec2 gex = data.exact_pressure_grad(x[0], x[1]);
      const double diff = -k * dot(gex, face.normal) + k * dot(g, face.normal);
      sum += erule.weights[q] * diff * diff;
    }
    trace_sq[nif + e] = sum * face.length;
  });
  for (double v : trace_sq) out.trace += v;

  out.energy = std::sqrt(out.energy);
  out.velocity = std::sqrt(out.velocity);
  out.trace = std::sqrt(out.trace);
  out.exact_energy = std::sqrt(out.exact_energy);
  out.exact_velocity = std::sqrt(out.exact_velocity);
  return out;
}

double discrete_energy_norm(const Mesh& mesh, const DofMap& dofmap,
                            const std::vector<BubbleBasis>& bases, const ProblemData& data,
                            const std::vector<double>& coeff, const std::vector<double>& alpha) {
  const TriangleRule rule = triangle_rule(kErrorVolumeDegree);
  const BasisTable table = tabulate(dofmap.basis(), rule);
  double sum = 0.0;
  for (int t = 0; t < mesh.n_elements(); ++t) {
    const auto glam = mesh.barycentric_gradients(t);
    const double jac = 2.0 * mesh.area[t];
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Vec2 g = coeff_gradient(dofmap, coeff, t, table.dlam[q], glam);
      if (!alpha.empty() && alpha[t] != 0.0)
        g = g + alpha[t] * bubble_gradient(bases[t], rule.points[q], glam);
      sum += rule.weights[q] * jac * data.conductivity[t] * dot(g, g);
    }
  }
  const EdgeRule erule = edge_rule(kErrorEdgeDegree);
  for (const auto& face : mesh.boundary_faces) {
    if (face.tag != BcTag::dirichlet) continue;
    double s2 = 0.0;
    for (size_t q = 0; q < erule.points.size(); ++q) {
      const auto lam = edge_lambda(face.owner_local, true, erule.points[q]);
      const FieldValue fv = eval_field(mesh, dofmap, coeff, face.owner, lam);
      s2 += erule.weights[q] * fv.value * fv.value;
    }
    sum += s2;  // (1/h_e) * |e| cancels with h_e = |e|
  }
  return std::sqrt(sum);
}

double bubble_energy_seminorm(const Mesh& mesh, const std::vector<BubbleBasis>& bases,
                              const ProblemData& data, const std::vector<double>& alpha) {
  const TriangleRule rule = triangle_rule(kErrorVolumeDegree);
  double sum = 0.0;
  for (int t = 0; t < mesh.n_elements(); ++t) {
    if (alpha[t] == 0.0) continue;
    const auto glam = mesh.barycentric_gradients(t);
    double local = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 g = bubble_gradient(bases[t], rule.points[q], glam);
      local += rule.weights[q] * dot(g, g);
    }
    sum += data.conductivity[t] * alpha[t] * alpha[t] * local * 2.0 * mesh.area[t];
  }
  return std::sqrt(sum);
}

double bubble_jump_norm(const Mesh& mesh, const std::vector<double>& alpha) {
  // With h_e equal to the face length, (1/h_e) * |[alpha]|^2 * |e| = [alpha]^2.
  double sum = 0.0;
  for (const auto& face : mesh.interior_faces) {
    const double j = alpha[face.left] - alpha[face.right];
    sum += j * j;
  }
  for (const auto& face : mesh.boundary_faces)
    if (face.tag == BcTag::dirichlet) sum += alpha[face.owner] * alpha[face.owner];
  return std::sqrt(sum);
}

MonolithicSystem assemble_monolithic_epg(const Mesh& mesh, const DofMap& dofmap,
                                         const DirichletSet& bc, const ProblemData& data,
                                         const std::vector<BubbleBasis>& bases) {
  require_dirichlet(mesh);
  const int nt = mesh.n_elements();
  const int n = bc.n_free + nt;
  MonolithicSystem sys{DenseMatrix(n), std::vector<double>(n, 0.0), bc.n_free};

  // Lagrange-test rows: the stiffness block from the first-step assembly.
  const CgSystem cg = assemble_cg(mesh, dofmap, bc, data, Exec::serial);
  for (int r = 0; r < bc.n_free; ++r) {
    for (int k = cg.matrix.row_ptr()[r]; k < cg.matrix.row_ptr()[r + 1]; ++k)
      sys.matrix(r, cg.matrix.cols()[k]) = cg.matrix.values()[k];
    sys.rhs[r] = cg.rhs[r];
  }

  // Coupling block: volume integrals of K grad(b_T) . grad(phi_i); these
  // vanish by the orthogonality construction of the bubbles.
  const TriangleRule rule = triangle_rule(kVolumeDegree);
  const BasisTable table = tabulate(dofmap.basis(), rule);
  for (int t = 0; t < nt; ++t) {
    const auto glam = mesh.barycentric_gradients(t);
    const double jac = 2.0 * mesh.area[t];
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 gb = bubble_gradient(bases[t], rule.points[q], glam);
      const double w = rule.weights[q] * jac * data.conductivity[t];
      for (int i = 0; i < dofmap.n_local(); ++i) {
        const int fi = bc.free_index[dofmap.global_dof(t, i)];
        if (fi < 0) continue;
        Vec2 gi{0.0, 0.0};
        for (int l = 0; l < 3; ++l) {
          gi[0] += table.dlam[q][i][l] * glam[l][0];
          gi[1] += table.dlam[q][i][l] * glam[l][1];
        }
        sys.matrix(fi, bc.n_free + t) += w * dot(gb, gi);
      }
    }
  }

  // Indicator-test rows, assembled face by face with edge quadrature: for
  // each element row, the outward flux averages of every trial function.
  const EdgeRule erule = edge_rule(kEdgeDegree);
  auto indicator_row = [&](int elem) { return bc.n_free + elem; };
  auto add_face_terms = [&](int row_elem, int elem, int local_edge, bool forward, Vec2 normal,
                            double length, double half) {
    // Adds half * integral over the face of -K grad(trial) . normal for all
    // trial functions supported on `elem` into the indicator row of `row_elem`.
    const auto glam = mesh.barycentric_gradients(elem);
    const double k = data.conductivity[elem];
    const int row = indicator_row(row_elem);
    std::vector<std::array<double, 3>> dlam;
    for (size_t q = 0; q < erule.points.size(); ++q) {
      const auto lam = edge_lambda(local_edge, forward, erule.points[q]);
      dofmap.basis().eval_grad(lam, dlam);
      const double w = erule.weights[q] * length * half;
      for (int i = 0; i < dofmap.n_local(); ++i) {
        Vec2 gi{0.0, 0.0};
        for (int l = 0; l < 3; ++l) {
          gi[0] += dlam[i][l] * glam[l][0];
          gi[1] += dlam[i][l] * glam[l][1];
        }
        const double entry = w * (-k * dot(gi, normal));
        const int gdof = dofmap.global_dof(elem, i);
        const int fi = bc.free_index[gdof];
        if (fi >= 0)
          sys.matrix(row, fi) += entry;
        else
          sys.rhs[row] -= entry * bc.value[gdof];
      }
      const Vec2 gbub = bubble_gradient(bases[elem], lam, glam);
      sys.matrix(row, bc.n_free + elem) += w * (-k * dot(gbub, normal));
    }
  };

  for (int t = 0; t < nt; ++t) {
    for (int e = 0; e < 3; ++e) {
      const auto& ref = mesh.elem_faces[t][e];
      if (ref.interior) {
        const auto& face = mesh.interior_faces[ref.index];
        const Vec2 n_out = ref.is_left ? face.normal : -1.0 * face.normal;
        // Average of the two one-sided traces.
        add_face_terms(t, face.left, face.left_local, true, n_out, face.length, 0.5);
        add_face_terms(t, face.right, face.right_local, false, n_out, face.length, 0.5);
      } else {
        const auto& face = mesh.boundary_faces[ref.index];
        if (face.tag == BcTag::neumann) {
          if (data.neumann) {
            double gsum = 0.0;
            for (size_t q = 0; q < erule.points.size(); ++q) {
              const auto lam = edge_lambda(face.owner_local, true, erule.points[q]);
              const Vec2 x = physical_point(mesh, face.owner, lam);
              gsum += erule.weights[q] * data.neumann(x[0], x[1]);
            }
            sys.rhs[indicator_row(t)] -= gsum * face.length;
          }
          continue;
        }
        add_face_terms(t, face.owner, face.owner_local, true, face.normal, face.length, 1.0);
      }
    }
    // Element source.
    double fsum = 0.0;
    if (data.source) {
      for (size_t q = 0; q < rule.points.size(); ++q) {
        const Vec2 x = physical_point(mesh, t, rule.points[q]);
        fsum += rule.weights[q] * data.source(x[0], x[1]);
      }
      fsum *= 2.0 * mesh.area[t];
    }
    sys.rhs[indicator_row(t)] += fsum;
  }

  return sys;
}

PressureSolution solve_monolithic_epg(const Mesh& mesh, const DofMap& dofmap,
                                      const ProblemData& data) {
  const DirichletSet bc = dirichlet_constraints(mesh, dofmap, data.dirichlet);
  const std::vector<BubbleBasis> bases =
      build_bubble_bases(mesh, dofmap.degree(), data.conductivity, Exec::serial);
  MonolithicSystem sys = assemble_monolithic_epg(mesh, dofmap, bc, data, bases);
  const std::vector<double> x = dense_solve(std::move(sys.matrix), std::move(sys.rhs));

  PressureSolution sol;
  sol.method = Method::epg;
  sol.degree = dofmap.degree();
  sol.coeff.assign(dofmap.n_dofs(), 0.0);
  for (int d = 0; d < dofmap.n_dofs(); ++d)
    sol.coeff[d] = bc.is_dirichlet[d] ? bc.value[d] : x[bc.free_index[d]];
  sol.alpha.assign(x.begin() + bc.n_free, x.end());
  sol.step1_report.method = "dense-lu";
  sol.step1_report.converged = true;
  return sol;
}

}  // namespace epg
