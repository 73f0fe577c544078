#pragma once

#include <vector>

#include "epg/darcy.hpp"
#include "epg/fespace.hpp"
#include "epg/linalg.hpp"
#include "epg/mesh.hpp"
#include "epg/parallel.hpp"

namespace epg {

enum class TimeScheme { explicit_euler, implicit_euler };

struct TransportConfig {
  double porosity = 0.2;
  double dt = 0.05;
  int steps = 100;
  double inflow_concentration = 1.0;
  double initial_concentration = 0.0;
  ScalarField source;  // empty means zero
  TimeScheme scheme = TimeScheme::implicit_euler;
  double solver_rtol = 1e-13;
};

void validate_transport_config(const TransportConfig& config);

struct ConcentrationField {
  std::vector<double> values;  // piecewise constant per element
  int step = 0;
};

struct StepDiagnostics {
  MMatrixDiagnostics mmatrix;        // implicit scheme only
  double balance_residual = 0.0;     // relative discrete mass-balance defect
  SolveReport solve;                 // implicit scheme only
};

struct TransportSeries {
  std::vector<double> time, max_c, min_c, total_mass;
  std::vector<StepDiagnostics> diagnostics;
};

// Upwind face value: the side the flux leaves. Ties (flux = 0) take the
// orientation side, i.e. the first element of the face.
inline double upwind_value(double flux, double c_left, double c_right) {
  return flux >= 0.0 ? c_left : c_right;
}
inline double upwind_boundary_value(double flux, double c_owner, double inflow_concentration) {
  return flux >= 0.0 ? c_owner : inflow_concentration;
}

// Largest stable explicit step: min over elements of phi |T| / (element
// outflow), boundary outflow included.
struct CflBound {
  double max_dt = 0.0;
  int worst_element = -1;
};
CflBound cfl_bound(const Mesh& mesh, const FaceFluxField& flux, double porosity);

// One forward-Euler upwind step. Requires dt <= 0.99 * cfl_bound(...).max_dt;
// a violation throws ValidationError naming the worst element and the bound.
std::vector<double> explicit_step(const Mesh& mesh, const FaceFluxField& flux,
                                  const TransportConfig& config,
                                  const std::vector<double>& c_prev, Exec exec = Exec::openmp);

// One backward-Euler upwind step: assembles the M-matrix system, validates
// its structure (positive diagonal, nonpositive off-diagonals, column
// dominance), and solves it.
std::vector<double> implicit_step(const Mesh& mesh, const FaceFluxField& flux,
                                  const TransportConfig& config,
                                  const std::vector<double>& c_prev,
                                  StepDiagnostics* diagnostics = nullptr,
                                  Exec exec = Exec::openmp);

// The assembled implicit system, exposed for validation and tests.
struct ImplicitSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
};
ImplicitSystem assemble_implicit(const Mesh& mesh, const FaceFluxField& flux,
                                 const TransportConfig& config,
                                 const std::vector<double>& c_prev, Exec exec = Exec::openmp);

// Runs `steps` steps of the selected scheme, recording per-step extrema,
// total mass and (implicit) solver/mass-balance diagnostics.
struct TransportResult {
  ConcentrationField final_field;
  TransportSeries series;
};
TransportResult run_transport(const Mesh& mesh, const FaceFluxField& flux,
                              const TransportConfig& config, Exec exec = Exec::openmp);

}  // namespace epg
