#pragma once

#include <string>

#include "epg/darcy.hpp"
#include "epg/mesh.hpp"
#include "epg/transport.hpp"

namespace epg {

// One of the three built-in experiment setups: domain, boundary data,
// manufactured solution (unit square only), and transport parameters.
struct ExampleCase {
  std::string name;
  DomainSpec domain;
  ScalarField source;
  ScalarField dirichlet;
  ScalarField neumann;
  ScalarField exact_pressure;       // empty when no manufactured solution
  VectorField exact_pressure_grad;
  double dt = 0.05;
  int steps = 100;
  double porosity = 0.2;
  double inflow_concentration = 1.0;
  double initial_concentration = 0.0;
  int field_level = 0;     // mesh level for field snapshots
  int residual_level = 0;  // mesh level for the conservation-residual study
};

ExampleCase example_case(DomainShape shape);
ExampleCase example_case_by_name(const std::string& name);  // example1|example2|example3
DomainShape domain_by_name(const std::string& name);        // unit_square|ten_shape|l_shape

ProblemData make_problem_data(const ExampleCase& example, const Mesh& mesh);
TransportConfig make_transport_config(const ExampleCase& example);

}  // namespace epg
