#include "epg/presets.hpp"

#include <cmath>

#include "epg/core.hpp"

namespace epg {

namespace {

// Manufactured pressure on the unit square: p = (1-x) y (1-y) cos x.
double exact_p(double x, double y) { return (1.0 - x) * y * (1.0 - y) * std::cos(x); }

Vec2 exact_grad_p(double x, double y) {
  const double h = y * (1.0 - y);
  return {-(std::cos(x) + (1.0 - x) * std::sin(x)) * h, (1.0 - x) * std::cos(x) * (1.0 - 2.0 * y)};
}

// f = -lap(p).
double exact_source(double x, double y) {
  const double h = y * (1.0 - y);
  return ((1.0 - x) * std::cos(x) - 2.0 * std::sin(x)) * h + 2.0 * (1.0 - x) * std::cos(x);
}

ScalarField segment_dirichlet(const DomainSpec& spec) {
  const auto segments = spec.dirichlet_segments;
  return [segments](double x, double y) {
    for (const auto& seg : segments)
      if (seg.contains({x, y})) return seg.value;
    return 0.0;
  };
}

}  // namespace

ExampleCase example_case(DomainShape shape) {
  ExampleCase c;
  c.domain = domain_spec(shape);
  switch (shape) {
    case DomainShape::unit_square:
      c.name = "example1";
      c.source = exact_source;
      c.dirichlet = exact_p;
      c.exact_pressure = exact_p;
      c.exact_pressure_grad = exact_grad_p;
      c.dt = 0.05;
      c.field_level = 4;     // 512 elements
      c.residual_level = 7;  // 32768 elements
      break;
    case DomainShape::ten_shape:
      c.name = "example2";
      c.dirichlet = segment_dirichlet(c.domain);
      c.neumann = [](double, double) { return 0.0; };
      c.dt = 0.03;
      c.field_level = 0;     // 640 elements
      c.residual_level = 3;  // 40960 elements
      break;
    case DomainShape::l_shape:
      c.name = "example3";
      c.dirichlet = segment_dirichlet(c.domain);
      c.neumann = [](double, double) { return 0.0; };
      c.dt = 0.01;
      c.field_level = 0;     // 384 elements
      c.residual_level = 3;  // 24576 elements
      break;
  }
  return c;
}

ExampleCase example_case_by_name(const std::string& name) {
  if (name == "example1") return example_case(DomainShape::unit_square);
  if (name == "example2") return example_case(DomainShape::ten_shape);
  if (name == "example3") return example_case(DomainShape::l_shape);
  throw ConfigError("unknown preset '" + name + "' (use example1, example2 or example3)");
}

DomainShape domain_by_name(const std::string& name) {
  if (name == "unit_square") return DomainShape::unit_square;
  if (name == "ten_shape") return DomainShape::ten_shape;
  if (name == "l_shape") return DomainShape::l_shape;
  throw ConfigError("unknown domain '" + name + "' (use unit_square, ten_shape or l_shape)");
}

ProblemData make_problem_data(const ExampleCase& example, const Mesh& mesh) {
  ProblemData data;
  data.source = example.source;
  data.dirichlet = example.dirichlet;
  data.neumann = example.neumann;
  data.conductivity = conductivity_field(example.domain, mesh);
  data.exact_pressure = example.exact_pressure;
  data.exact_pressure_grad = example.exact_pressure_grad;
  return data;
}

TransportConfig make_transport_config(const ExampleCase& example) {
  TransportConfig config;
  config.porosity = example.porosity;
  config.dt = example.dt;
  config.steps = example.steps;
  config.inflow_concentration = example.inflow_concentration;
  config.initial_concentration = example.initial_concentration;
  return config;
}

}  // namespace epg
