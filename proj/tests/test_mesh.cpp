#include "epg/mesh.hpp"

#include <numeric>
#include <sstream>

#include "doctest.h"

using namespace epg;

TEST_CASE("coarsest unit square mesh: 2 triangles, 1 interior face, 4 boundary faces") {
  const Mesh mesh = build_structured_mesh(domain_spec(DomainShape::unit_square), 0);
  CHECK(mesh.n_elements() == 2);
  CHECK(mesh.interior_faces.size() == 1);
  CHECK(mesh.boundary_faces.size() == 4);
  CHECK(mesh.n_dirichlet_faces() == 4);
}

TEST_CASE("paper element counts are matched") {
  CHECK(build_structured_mesh(domain_spec(DomainShape::unit_square), 4).n_elements() == 512);
  CHECK(build_structured_mesh(domain_spec(DomainShape::ten_shape), 0).n_elements() == 640);
  CHECK(build_structured_mesh(domain_spec(DomainShape::l_shape), 0).n_elements() == 384);
  CHECK(build_structured_mesh(domain_spec(DomainShape::l_shape), 3).n_elements() == 24576);
}

TEST_CASE("uniform refinement quadruples elements and preserves area") {
  Mesh mesh = build_structured_mesh(domain_spec(DomainShape::unit_square), 0);
  const Mesh fine = uniform_refine(mesh);
  CHECK(fine.n_elements() == 8);

  Mesh ex1 = build_structured_mesh(domain_spec(DomainShape::unit_square), 4);
  CHECK(ex1.n_elements() == 512);
  for (int r = 0; r < 3; ++r) ex1 = uniform_refine(ex1);
  CHECK(ex1.n_elements() == 32768);

  const double total = std::accumulate(ex1.area.begin(), ex1.area.end(), 0.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ten-shape mesh area and region-aligned conductivity") {
  const DomainSpec spec = domain_spec(DomainShape::ten_shape);
  const Mesh mesh = build_structured_mesh(spec, 0);
  const double total = std::accumulate(mesh.area.begin(), mesh.area.end(), 0.0);
  CHECK(total == doctest::Approx(5.0).epsilon(1e-13));

  const std::vector<double> k = conductivity_field(spec, mesh);
  double low_area = 0.0;
  for (int t = 0; t < mesh.n_elements(); ++t)
    if (k[t] == 1e-2) low_area += mesh.area[t];
  CHECK(low_area == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("misaligned resolution for a conductivity block is rejected") {
  const DomainSpec spec = domain_spec(DomainShape::ten_shape);
  CHECK_THROWS_AS(build_structured_mesh_n(spec, 3), ValidationError);
  CHECK_NOTHROW(build_structured_mesh_n(spec, 4));
}

TEST_CASE("every edge appears in exactly one face record") {
  const Mesh mesh = build_structured_mesh(domain_spec(DomainShape::l_shape), 1);
  // 3 faces per element, interior faces shared by two.
  CHECK(3 * mesh.n_elements() ==
        2 * static_cast<int>(mesh.interior_faces.size()) +
            static_cast<int>(mesh.boundary_faces.size()));
  validate_mesh(mesh);  // also: closure, unit normals, positive areas
}

TEST_CASE("interior face normals point from the lower to the higher element") {
  const Mesh mesh = build_structured_mesh(domain_spec(DomainShape::unit_square), 2);
  for (const auto& f : mesh.interior_faces) {
    CHECK(f.left < f.right);
    const Vec2 d = mesh.barycenter(f.right) - mesh.barycenter(f.left);
    CHECK(dot(d, f.normal) > 0.0);
  }
}

TEST_CASE("plain-text mesh round trip") {
  const Mesh mesh = build_structured_mesh(domain_spec(DomainShape::ten_shape), 0);
  std::stringstream buffer;
  write_mesh_text(mesh, buffer);
  const Mesh copy = read_mesh_text(buffer);
  REQUIRE(copy.n_elements() == mesh.n_elements());
  REQUIRE(copy.n_vertices() == mesh.n_vertices());
  CHECK(copy.interior_faces.size() == mesh.interior_faces.size());
  CHECK(copy.n_dirichlet_faces() == mesh.n_dirichlet_faces());
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    CHECK(copy.vertices[v][0] == mesh.vertices[v][0]);
    CHECK(copy.vertices[v][1] == mesh.vertices[v][1]);
  }
}

TEST_CASE("malformed mesh files are rejected") {
  std::stringstream missing_tag("nodes 3\n0 0\n1 0\n0 1\nelements 1\n0 1 2\nboundary 3\n"
                                "0 1 D\n1 2 D\n2 0 X\n");
  CHECK_THROWS_AS(read_mesh_text(missing_tag), ConfigError);
  std::stringstream bad_count("nodes 2\n0 0\n1 0\n");
  CHECK_THROWS_AS(read_mesh_text(bad_count), ConfigError);
  std::stringstream cw_element("nodes 3\n0 0\n1 0\n0 1\nelements 1\n0 2 1\nboundary 3\n"
                               "0 1 D\n1 2 D\n2 0 D\n");
  CHECK_THROWS_AS(read_mesh_text(cw_element), ValidationError);
}
