#pragma once

#include <vector>

#include "epg/bubble.hpp"
#include "epg/fespace.hpp"
#include "epg/linalg.hpp"
#include "epg/mesh.hpp"
#include "epg/parallel.hpp"

namespace epg {

enum class Method { cg, epg };

// Problem data for -div(K grad p) = f with p = p_D on the Dirichlet boundary
// and u.n = g_N on the Neumann boundary.
struct ProblemData {
  ScalarField source;     // f
  ScalarField dirichlet;  // p_D
  ScalarField neumann;    // g_N, outward normal flux
  std::vector<double> conductivity;  // piecewise constant per element

  // Manufactured solution, when available.
  ScalarField exact_pressure;
  VectorField exact_pressure_grad;
};

// Pressure solution p_h = p_c + sum_T alpha_T b_T. The coefficient vector
// covers the full Lagrange space (Dirichlet dofs carry their boundary
// values); alpha is empty for a plain CG solution.
struct PressureSolution {
  Method method = Method::cg;
  int degree = 1;
  std::vector<double> coeff;
  std::vector<double> alpha;
  SolveReport step1_report;
  SolveReport step2_report;
};

// Integrated face fluxes of the recovered velocity: one number per face.
// Interior values follow the stored face orientation (out of the lower
// element); boundary values are outward.
struct FaceFluxField {
  std::vector<double> interior;
  std::vector<double> boundary;
};

struct CgSystem {
  SparseMatrix matrix;       // reduced to the free dofs, SPD
  std::vector<double> rhs;   // Dirichlet contributions eliminated into it
};

// Per-element flux correction system for the bubble amplitudes:
//   (1/2) sum over shared faces (alpha_T - alpha_T') + sum over Dirichlet
//   faces alpha_T = defect_T, with defect_T the local conservation defect of
//   the first-step solution. Symmetric positive definite.
struct BubbleCorrection {
  SparseMatrix matrix;
  std::vector<double> rhs;
};

struct ResidualField {
  std::vector<double> per_element;  // boundary outflow minus integrated source
  double max_abs = 0.0;
  int argmax = -1;
};

struct ErrorNorms {
  double energy = 0.0;    // energy norm of p - p_h (with Dirichlet jump term)
  double velocity = 0.0;  // L2 norm of u - u_h
  double trace = 0.0;     // L2 norm of (u - u_h).n over interior+Dirichlet faces
  double exact_energy = 0.0;    // energy seminorm of the exact pressure
  double exact_velocity = 0.0;  // L2 norm of the exact velocity
};

// Stiffness + load of the standard continuous Galerkin step with strong
// Dirichlet data (nodal interpolation, eliminated). Throws ValidationError
// when the Dirichlet set is empty.
CgSystem assemble_cg(const Mesh& mesh, const DofMap& dofmap, const DirichletSet& bc,
                     const ProblemData& data, Exec exec = Exec::openmp);

PressureSolution solve_cg_pressure(const Mesh& mesh, const DofMap& dofmap,
                                   const ProblemData& data, double rtol,
                                   Exec exec = Exec::openmp);

BubbleCorrection assemble_bubble_correction(const Mesh& mesh, const DofMap& dofmap,
                                            const ProblemData& data,
                                            const PressureSolution& first_step,
                                            Exec exec = Exec::openmp);

// Two-step solve: continuous Galerkin pressure, then the per-element bubble
// amplitude correction that restores local conservation.
PressureSolution solve_epg(const Mesh& mesh, const DofMap& dofmap, const ProblemData& data,
                           double rtol, Exec exec = Exec::openmp);

// Elementwise velocity -K grad(p_c + alpha_T b_T) at a barycentric point.
Vec2 velocity_at(const Mesh& mesh, const DofMap& dofmap, const PressureSolution& sol,
                 const std::vector<BubbleBasis>& bases, const ProblemData& data, int element,
                 const std::array<double, 3>& lambda);

// Integrated single-valued face fluxes: averaged across interior faces,
// one-sided on Dirichlet faces, g_N on Neumann faces.
FaceFluxField recover_velocity(const Mesh& mesh, const DofMap& dofmap,
                               const PressureSolution& sol, const ProblemData& data,
                               Exec exec = Exec::openmp);

// Per-element net boundary outflow minus integrated source.
ResidualField local_conservation_residual(const Mesh& mesh, const FaceFluxField& flux,
                                          const ScalarField& source, Exec exec = Exec::openmp);

// Boundary partition by flux sign: true = inflow (integrated flux < 0).
std::vector<unsigned char> classify_inflow_outflow(const Mesh& mesh, const FaceFluxField& flux);

// Error functionals against the manufactured solution in `data`.
ErrorNorms energy_and_velocity_errors(const Mesh& mesh, const DofMap& dofmap,
                                      const PressureSolution& sol,
                                      const std::vector<BubbleBasis>& bases,
                                      const ProblemData& data, Exec exec = Exec::openmp);

// Energy norm of a discrete field given by Lagrange coefficients plus bubble
// amplitudes (volume part + Dirichlet boundary term).
double discrete_energy_norm(const Mesh& mesh, const DofMap& dofmap,
                            const std::vector<BubbleBasis>& bases, const ProblemData& data,
                            const std::vector<double>& coeff, const std::vector<double>& alpha);

// Energy seminorm of a pure bubble field and the face-jump norm of its
// amplitude vector (diagnostics for the norm-equivalence property).
double bubble_energy_seminorm(const Mesh& mesh, const std::vector<BubbleBasis>& bases,
                              const ProblemData& data, const std::vector<double>& alpha);
double bubble_jump_norm(const Mesh& mesh, const std::vector<double>& alpha);

// Coupled one-shot system over (free Lagrange dofs, bubble amplitudes),
// assembled face-by-face by quadrature. Cross-check oracle for the two-step
// algorithm; the coupling block of the Lagrange-test rows vanishes by the
// bubble orthogonality construction.
struct MonolithicSystem {
  DenseMatrix matrix;
  std::vector<double> rhs;
  int n_free = 0;  // leading unknowns; the trailing block is alpha
};
MonolithicSystem assemble_monolithic_epg(const Mesh& mesh, const DofMap& dofmap,
                                         const DirichletSet& bc, const ProblemData& data,
                                         const std::vector<BubbleBasis>& bases);
PressureSolution solve_monolithic_epg(const Mesh& mesh, const DofMap& dofmap,
                                      const ProblemData& data);

}  // namespace epg
