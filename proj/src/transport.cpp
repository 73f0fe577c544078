#include "epg/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "epg/core.hpp"
#include "epg/quadrature.hpp"

namespace epg {

namespace {

// Integrated source per element, or empty when there is none.
std::vector<double> source_integrals(const Mesh& mesh, const ScalarField& source, Exec exec) {
  std::vector<double> out;
  if (!source) return out;
  out.assign(mesh.n_elements(), 0.0);
  const TriangleRule rule = triangle_rule(10);
  parallel_for(exec, mesh.n_elements(), [&](std::int64_t t) {
    double sum = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Vec2 x{0.0, 0.0};
      for (int v = 0; v < 3; ++v)
        x = x + rule.points[q][v] * mesh.vertices[mesh.tris[t][v]];
      sum += rule.weights[q] * source(x[0], x[1]);
    }
    out[t] = sum * 2.0 * mesh.area[t];
  });
  return out;
}

// Outward flux of element `t` through its local face `e`.
double outward_flux(const Mesh& mesh, const FaceFluxField& flux, int t, int e) {
  const auto& ref = mesh.elem_faces[t][e];
  if (!ref.interior) return flux.boundary[ref.index];
  return ref.is_left ? flux.interior[ref.index] : -flux.interior[ref.index];
}

}  // namespace

void validate_transport_config(const TransportConfig& config) {
  if (config.porosity <= 0.0) throw ValidationError("transport: porosity must be positive");
  if (config.dt <= 0.0) throw ValidationError("transport: time step must be positive");
  if (config.steps < 1) throw ValidationError("transport: need at least one step");
  if (config.inflow_concentration < 0.0 || config.inflow_concentration > 1.0)
    throw ValidationError("transport: inflow concentration must lie in [0,1]");
  if (config.initial_concentration < 0.0 || config.initial_concentration > 1.0)
    throw ValidationError("transport: initial concentration must lie in [0,1]");
}

CflBound cfl_bound(const Mesh& mesh, const FaceFluxField& flux, double porosity) {
  CflBound bound;
  bound.max_dt = std::numeric_limits<double>::infinity();
  for (int t = 0; t < mesh.n_elements(); ++t) {
    double outflow = 0.0;
    for (int e = 0; e < 3; ++e) {
      const double u = outward_flux(mesh, flux, t, e);
      if (u > 0.0) outflow += u;
    }
    if (outflow <= 0.0) continue;
    const double dt = porosity * mesh.area[t] / outflow;
    if (dt < bound.max_dt) {
      bound.max_dt = dt;
      bound.worst_element = t;
    }
  }
  return bound;
}

std::vector<double> explicit_step(const Mesh& mesh, const FaceFluxField& flux,
                                  const TransportConfig& config,
                                  const std::vector<double>& c_prev, Exec exec) {
  const CflBound bound = cfl_bound(mesh, flux, config.porosity);
  if (config.dt > 0.99 * bound.max_dt)
    throw ValidationError("explicit_step: dt " + std::to_string(config.dt) +
                          " violates the CFL bound " + std::to_string(bound.max_dt) +
                          " (with 1% margin) set by element " +
                          std::to_string(bound.worst_element));

  const std::vector<double> fsrc = source_integrals(mesh, config.source, exec);
  std::vector<double> c_next(mesh.n_elements());
  parallel_for(exec, mesh.n_elements(), [&](std::int64_t t) {
    double net = fsrc.empty() ? 0.0 : fsrc[t];
    for (int e = 0; e < 3; ++e) {
      const auto& ref = mesh.elem_faces[t][e];
      const double u = outward_flux(mesh, flux, static_cast<int>(t), e);
      double c_face;
      if (ref.interior) {
        const auto& face = mesh.interior_faces[ref.index];
        const int other = ref.is_left ? face.right : face.left;
        c_face = upwind_value(u, c_prev[t], c_prev[other]);
      } else {
        c_face = upwind_boundary_value(u, c_prev[t], config.inflow_concentration);
      }
      net -= u * c_face;
    }
    c_next[t] = c_prev[t] + config.dt / (config.porosity * mesh.area[t]) * net;
  });
  return c_next;
}

ImplicitSystem assemble_implicit(const Mesh& mesh, const FaceFluxField& flux,
                                 const TransportConfig& config,
                                 const std::vector<double>& c_prev, Exec exec) {
  const int nt = mesh.n_elements();
  const std::vector<double> fsrc = source_integrals(mesh, config.source, exec);

  // Gather form: each element row reads only its own faces, so rows can be
  // built independently; at most one off-diagonal entry per face.
  std::vector<double> diag(nt), rhs(nt);
  std::vector<std::array<double, 3>> offval(nt);
  std::vector<std::array<int, 3>> offcol(nt);
  parallel_for(exec, nt, [&](std::int64_t t) {
    const double mass = config.porosity * mesh.area[t] / config.dt;
    double d = mass;
    double b = mass * c_prev[t] + (fsrc.empty() ? 0.0 : fsrc[t]);
    for (int e = 0; e < 3; ++e) {
      const auto& ref = mesh.elem_faces[t][e];
      const double u = outward_flux(mesh, flux, static_cast<int>(t), e);
      offcol[t][e] = -1;
      if (ref.interior) {
        if (u >= 0.0) {
          d += u;  // outflow carries this element's concentration
        } else {
          const auto& face = mesh.interior_faces[ref.index];
          offcol[t][e] = ref.is_left ? face.right : face.left;
          offval[t][e] = u;  // inflow couples to the upstream neighbour
        }
      } else {
        if (u >= 0.0)
          d += u;  // boundary outflow
        else
          b += -u * config.inflow_concentration;  // boundary inflow
      }
    }
    diag[t] = d;
    rhs[t] = b;
  });

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<size_t>(nt) * 4);
  for (int t = 0; t < nt; ++t) {
    triplets.push_back({t, t, diag[t]});
    for (int e = 0; e < 3; ++e)
      if (offcol[t][e] >= 0) triplets.push_back({t, offcol[t][e], offval[t][e]});
  }

  ImplicitSystem sys;
  sys.matrix = SparseMatrix::from_triplets(nt, std::move(triplets));
  sys.rhs = std::move(rhs);
  return sys;
}

std::vector<double> implicit_step(const Mesh& mesh, const FaceFluxField& flux,
                                  const TransportConfig& config,
                                  const std::vector<double>& c_prev,
                                  StepDiagnostics* diagnostics, Exec exec) {
  const ImplicitSystem sys = assemble_implicit(mesh, flux, config, c_prev, exec);
  SolveReport report;
  std::vector<double> c = solve_mmatrix(sys.matrix, sys.rhs, config.solver_rtol, report);
  if (!report.converged)
    throw SolverError("implicit_step: transport solve did not converge (residual " +
                      std::to_string(report.rel_residual_internal) + ")");
  if (diagnostics) {
    diagnostics->mmatrix = validate_mmatrix(sys.matrix);
    diagnostics->solve = report;

    // Discrete global balance: storage change + boundary advection = source.
    double lhs = 0.0, scale = 0.0, total_src = 0.0;
    for (int t = 0; t < mesh.n_elements(); ++t) {
      const double storage = config.porosity * mesh.area[t] * (c[t] - c_prev[t]) / config.dt;
      lhs += storage;
      scale += std::abs(storage);
    }
    for (size_t e = 0; e < mesh.boundary_faces.size(); ++e) {
      const double u = flux.boundary[e];
      const double term = u >= 0.0 ? u * c[mesh.boundary_faces[e].owner]
                                   : u * config.inflow_concentration;
      lhs += term;
      scale += std::abs(term);
    }
    if (config.source) {
      const std::vector<double> fsrc = source_integrals(mesh, config.source, exec);
      for (double v : fsrc) {
        total_src += v;
        scale += std::abs(v);
      }
    }
    diagnostics->balance_residual = std::abs(lhs - total_src) / std::max(scale, 1e-30);
  }
  return c;
}

TransportResult run_transport(const Mesh& mesh, const FaceFluxField& flux,
                              const TransportConfig& config, Exec exec) {
  validate_transport_config(config);
  TransportResult result;
  result.final_field.values.assign(mesh.n_elements(), config.initial_concentration);
  result.final_field.step = 0;

  auto record = [&](const std::vector<double>& c, int step, const StepDiagnostics& diag) {
    result.series.time.push_back(step * config.dt);
    result.series.max_c.push_back(*std::max_element(c.begin(), c.end()));
    result.series.min_c.push_back(*std::min_element(c.begin(), c.end()));
    double mass = 0.0;
    for (int t = 0; t < mesh.n_elements(); ++t) mass += config.porosity * mesh.area[t] * c[t];
    result.series.total_mass.push_back(mass);
    result.series.diagnostics.push_back(diag);
  };

  for (int step = 1; step <= config.steps; ++step) {
    StepDiagnostics diag;
    std::vector<double> next;
    if (config.scheme == TimeScheme::implicit_euler)
      next = implicit_step(mesh, flux, config, result.final_field.values, &diag, exec);
    else
      next = explicit_step(mesh, flux, config, result.final_field.values, exec);
    result.final_field.values = std::move(next);
    result.final_field.step = step;
    record(result.final_field.values, step, diag);
  }
  return result;
}

}  // namespace epg
