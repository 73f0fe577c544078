#pragma once

#include <span>
#include <vector>

#include "epg/darcy.hpp"
#include "epg/presets.hpp"

namespace epg {

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;  // max element diameter
  int dofs = 0;
  double energy = 0.0, velocity = 0.0, trace = 0.0;  // relative errors
  double rate_energy = 0.0, rate_velocity = 0.0, rate_trace = 0.0;
};

// rate(L) = log(e_{L-1}/e_L) / log(h_{L-1}/h_L); first row keeps rate 0.
void compute_rates(std::vector<ConvergenceRow>& rows);

// Solves the case at each level and tabulates relative errors and observed
// rates. Energy and velocity errors are normalized by the exact-solution
// norms; the trace error is normalized by the exact velocity norm so its
// scale factor does not change across levels.
std::vector<ConvergenceRow> convergence_study(const ExampleCase& example, int degree,
                                              Method method, std::span<const int> levels,
                                              double rtol, Exec exec = Exec::openmp);

// Side-by-side conservation residuals of both methods on one mesh.
struct ResidualReport {
  int level = 0;
  int n_elements = 0;
  ResidualField cg;
  ResidualField epg;
};
ResidualReport residual_report(const ExampleCase& example, int degree, int level, double rtol,
                               Exec exec = Exec::openmp);

}  // namespace epg
