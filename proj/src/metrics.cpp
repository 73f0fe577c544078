#include "epg/metrics.hpp"

#include <cmath>

#include "epg/core.hpp"

namespace epg {

void compute_rates(std::vector<ConvergenceRow>& rows) {
  for (size_t i = 1; i < rows.size(); ++i) {
    const double lh = std::log(rows[i - 1].h / rows[i].h);
    rows[i].rate_energy = std::log(rows[i - 1].energy / rows[i].energy) / lh;
    rows[i].rate_velocity = std::log(rows[i - 1].velocity / rows[i].velocity) / lh;
    rows[i].rate_trace = std::log(rows[i - 1].trace / rows[i].trace) / lh;
  }
}

std::vector<ConvergenceRow> convergence_study(const ExampleCase& example, int degree,
                                              Method method, std::span<const int> levels,
                                              double rtol, Exec exec) {
  if (!example.exact_pressure)
    throw ValidationError("convergence_study: the case has no exact solution");
  std::vector<ConvergenceRow> rows;
  for (int level : levels) {
    const Mesh mesh = build_structured_mesh(example.domain, level);
    const DofMap dofmap(mesh, degree);
    const ProblemData data = make_problem_data(example, mesh);
    const PressureSolution sol = method == Method::epg
                                     ? solve_epg(mesh, dofmap, data, rtol, exec)
                                     : solve_cg_pressure(mesh, dofmap, data, rtol, exec);
    const std::vector<BubbleBasis> bases =
        method == Method::epg ? build_bubble_bases(mesh, degree, data.conductivity, exec)
                              : std::vector<BubbleBasis>{};
    const ErrorNorms err = energy_and_velocity_errors(mesh, dofmap, sol, bases, data, exec);

    ConvergenceRow row;
    row.level = level;
    row.h = mesh.max_diameter();
    row.dofs = dofmap.n_dofs() + (method == Method::epg ? mesh.n_elements() : 0);
    row.energy = err.energy / err.exact_energy;
    row.velocity = err.velocity / err.exact_velocity;
    row.trace = err.trace / err.exact_velocity;
    rows.push_back(row);
  }
  compute_rates(rows);
  return rows;
}

ResidualReport residual_report(const ExampleCase& example, int degree, int level, double rtol,
                               Exec exec) {
  const Mesh mesh = build_structured_mesh(example.domain, level);
  const DofMap dofmap(mesh, degree);
  const ProblemData data = make_problem_data(example, mesh);
  const std::vector<BubbleBasis> bases = build_bubble_bases(mesh, degree, data.conductivity, exec);

  // The two methods share the first-step solution.
  PressureSolution epg_sol = solve_epg(mesh, dofmap, data, rtol, exec);
  PressureSolution cg_sol = epg_sol;
  cg_sol.method = Method::cg;
  cg_sol.alpha.clear();

  ResidualReport report;
  report.level = level;
  report.n_elements = mesh.n_elements();
  const FaceFluxField cg_flux = recover_velocity(mesh, dofmap, cg_sol, data, exec);
  const FaceFluxField epg_flux = recover_velocity(mesh, dofmap, epg_sol, data, exec);
  report.cg = local_conservation_residual(mesh, cg_flux, data.source, exec);
  report.epg = local_conservation_residual(mesh, epg_flux, data.source, exec);
  return report;
}

}  // namespace epg
