#include "epg/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "epg/core.hpp"
#include "epg/io.hpp"
#include "epg/metrics.hpp"
#include "epg/presets.hpp"

namespace epg {

namespace {

void validate_config(const RunConfig& config) {
  if (config.command != "darcy" && config.command != "transport" &&
      config.command != "convergence" && config.command != "residuals")
    throw ConfigError("unknown command '" + config.command + "'");
  const int min_degree = config.command == "convergence" ? 0 : 1;  // 0 sweeps all degrees
  if (config.degree < min_degree || config.degree > 3)
    throw ConfigError("degree must be 1, 2 or 3 (got " + std::to_string(config.degree) + ")");
  if (config.method != "cg" && config.method != "epg")
    throw ConfigError("method must be cg or epg (got '" + config.method + "')");
  if (config.scheme != "implicit" && config.scheme != "explicit")
    throw ConfigError("scheme must be implicit or explicit");
  if (config.rtol < 1e-14 || config.rtol > 1e-2)
    throw ConfigError("rtol must lie in [1e-14, 1e-2]");
  if (config.level > 12) throw ConfigError("level too large (max 12)");
  if (config.steps == 0 || config.steps < -1) throw ConfigError("steps must be positive");
  if (config.dt != -1.0 && config.dt <= 0.0) throw ConfigError("dt must be positive");
  if (config.min_level < 0 || config.max_level < config.min_level)
    throw ConfigError("invalid convergence level range");
  if (config.vtk_stride < 0) throw ConfigError("vtk-stride must be >= 0");
}

struct SolveBundle {
  Mesh mesh;
  ProblemData data;
  PressureSolution solution;
  std::vector<BubbleBasis> bases;
  DofMap dofmap;

  SolveBundle(const ExampleCase& example, int level, int degree, const std::string& method,
              double rtol)
      : mesh(build_structured_mesh(example.domain, level)),
        data(make_problem_data(example, mesh)),
        solution(),
        bases(build_bubble_bases(mesh, degree, data.conductivity)),
        dofmap(mesh, degree) {
    solution = method == "epg" ? solve_epg(mesh, dofmap, data, rtol)
                               : solve_cg_pressure(mesh, dofmap, data, rtol);
  }
};

std::vector<double> vertex_pressure(const Mesh& mesh, const PressureSolution& sol) {
  // Vertex dofs lead the numbering, so this is the nodal pressure trace.
  return {sol.coeff.begin(), sol.coeff.begin() + mesh.n_vertices()};
}

std::vector<Vec2> cell_velocity(const SolveBundle& b) {
  std::vector<Vec2> v(b.mesh.n_elements());
  for (int t = 0; t < b.mesh.n_elements(); ++t)
    v[t] = velocity_at(b.mesh, b.dofmap, b.solution, b.bases, b.data, t,
                       {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  return v;
}

std::vector<std::string> run_darcy(const RunConfig& config, const ExampleCase& example) {
  const int level = config.level >= 0 ? config.level : example.field_level;
  SolveBundle b(example, level, config.degree, config.method, config.rtol);

  const FaceFluxField flux = recover_velocity(b.mesh, b.dofmap, b.solution, b.data);
  const ResidualField residual = local_conservation_residual(b.mesh, flux, b.data.source);
  const std::vector<double> pressure = vertex_pressure(b.mesh, b.solution);
  std::vector<double> alpha = b.solution.alpha;
  if (alpha.empty()) alpha.assign(b.mesh.n_elements(), 0.0);
  const std::vector<Vec2> velocity = cell_velocity(b);

  std::vector<std::string> files;
  write_vtk(config.output_dir + "/solution.vtk", b.mesh,
            example.name + " " + config.method + " p" + std::to_string(config.degree),
            {{"pressure", &pressure}}, {{"alpha", &alpha}, {"residual", &residual.per_element}},
            {{"velocity", &velocity}});
  files.push_back("solution.vtk");

  write_mesh_file(b.mesh, config.output_dir + "/mesh.txt");
  files.push_back("mesh.txt");

  write_csv(config.output_dir + "/summary.csv",
            {"method", "degree", "level", "elements", "dofs", "max_residual", "argmax_element",
             "step1_iterations", "step1_residual"},
            {{config.method, csv_number(config.degree), csv_number(level),
              csv_number(b.mesh.n_elements()), csv_number(b.dofmap.n_dofs()),
              csv_number(residual.max_abs), csv_number(residual.argmax),
              csv_number(b.solution.step1_report.iterations),
              csv_number(b.solution.step1_report.rel_residual)}});
  files.push_back("summary.csv");

  if (config.dump_matrix) {
    const DirichletSet bc = dirichlet_constraints(b.mesh, b.dofmap, b.data.dirichlet);
    const CgSystem sys = assemble_cg(b.mesh, b.dofmap, bc, b.data);
    std::ofstream out(config.output_dir + "/step1_matrix.txt");
    sys.matrix.write_coordinate(out);
    files.push_back("step1_matrix.txt");
  }
  return files;
}

std::vector<std::string> run_transport(const RunConfig& config, const ExampleCase& example) {
  const int level = config.level >= 0 ? config.level : example.residual_level;
  SolveBundle b(example, level, config.degree, config.method, config.rtol);
  const FaceFluxField flux = recover_velocity(b.mesh, b.dofmap, b.solution, b.data);

  TransportConfig tconfig = make_transport_config(example);
  if (config.dt > 0.0) tconfig.dt = config.dt;
  if (config.steps > 0) tconfig.steps = config.steps;
  tconfig.scheme =
      config.scheme == "implicit" ? TimeScheme::implicit_euler : TimeScheme::explicit_euler;

  std::vector<std::string> files;
  std::vector<double> c(b.mesh.n_elements(), tconfig.initial_concentration);
  TransportSeries series;
  validate_transport_config(tconfig);
  for (int step = 1; step <= tconfig.steps; ++step) {
    StepDiagnostics diag;
    c = tconfig.scheme == TimeScheme::implicit_euler
            ? implicit_step(b.mesh, flux, tconfig, c, &diag)
            : explicit_step(b.mesh, flux, tconfig, c);
    series.time.push_back(step * tconfig.dt);
    series.max_c.push_back(*std::max_element(c.begin(), c.end()));
    series.min_c.push_back(*std::min_element(c.begin(), c.end()));
    double mass = 0.0;
    for (int t = 0; t < b.mesh.n_elements(); ++t)
      mass += tconfig.porosity * b.mesh.area[t] * c[t];
    series.total_mass.push_back(mass);
    if (config.vtk_stride > 0 && step % config.vtk_stride == 0) {
      const std::string name = "concentration_" + std::to_string(step) + ".vtk";
      write_vtk(config.output_dir + "/" + name, b.mesh, example.name + " concentration", {},
                {{"concentration", &c}}, {});
      files.push_back(name);
    }
  }

  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < series.time.size(); ++i)
    rows.push_back({csv_number(static_cast<int>(i + 1)), csv_number(series.time[i]),
                    csv_number(series.max_c[i]), csv_number(series.min_c[i]),
                    csv_number(series.total_mass[i])});
  write_csv(config.output_dir + "/series.csv", {"step", "time", "max_c", "min_c", "total_mass"},
            rows);
  files.push_back("series.csv");
  return files;
}

std::vector<std::string> run_convergence(const RunConfig& config, const ExampleCase& example) {
  std::vector<int> levels;
  for (int l = config.min_level; l <= config.max_level; ++l) levels.push_back(l);

  std::vector<std::vector<std::string>> rows;
  for (const std::string& method : {std::string("cg"), std::string("epg")}) {
    for (int k = 1; k <= 3; ++k) {
      if (config.degree != 0 && config.degree != k) continue;
      const auto table = convergence_study(example, k, method == "epg" ? Method::epg : Method::cg,
                                           levels, config.rtol);
      for (const auto& row : table)
        rows.push_back({method, csv_number(k), csv_number(row.level), csv_number(row.h),
                        csv_number(row.dofs), csv_number(row.energy), csv_number(row.velocity),
                        csv_number(row.trace), csv_number(row.rate_energy),
                        csv_number(row.rate_velocity), csv_number(row.rate_trace)});
    }
  }
  write_csv(config.output_dir + "/convergence.csv",
            {"method", "k", "level", "h", "dofs", "energy_err", "vel_err", "trace_err",
             "rate_energy", "rate_vel", "rate_trace"},
            rows);
  return {"convergence.csv"};
}

std::vector<std::string> run_residuals(const RunConfig& config, const ExampleCase& example) {
  const int level = config.level >= 0 ? config.level : example.residual_level;
  const ResidualReport report = residual_report(example, config.degree, level, config.rtol);
  const Mesh mesh = build_structured_mesh(example.domain, level);

  std::vector<std::string> files;
  write_vtk(config.output_dir + "/residuals.vtk", mesh, example.name + " conservation residuals",
            {}, {{"residual_cg", &report.cg.per_element}, {"residual_epg", &report.epg.per_element}},
            {});
  files.push_back("residuals.vtk");

  auto row = [&](const char* name, const ResidualField& field) {
    const Vec2 at = mesh.barycenter(field.argmax);
    return std::vector<std::string>{name, csv_number(config.degree), csv_number(level),
                                    csv_number(mesh.n_elements()), csv_number(field.max_abs),
                                    csv_number(field.argmax), csv_number(at[0]),
                                    csv_number(at[1])};
  };
  write_csv(config.output_dir + "/residuals.csv",
            {"method", "k", "level", "elements", "max_residual", "argmax_element", "argmax_x",
             "argmax_y"},
            {row("cg", report.cg), row("epg", report.epg)});
  files.push_back("residuals.csv");
  return files;
}

}  // namespace

std::vector<std::string> run(const RunConfig& config) {
  validate_config(config);
  ExampleCase example = example_case(domain_by_name(config.domain));
  std::filesystem::create_directories(config.output_dir);

  std::vector<std::string> files;
  if (config.command == "darcy")
    files = run_darcy(config, example);
  else if (config.command == "transport")
    files = run_transport(config, example);
  else if (config.command == "convergence")
    files = run_convergence(config, example);
  else
    files = run_residuals(config, example);

  write_manifest(config.output_dir, files);
  files.push_back("manifest.txt");
  return files;
}

}  // namespace epg
