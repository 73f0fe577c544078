#include "epg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace epg {

int Mesh::n_dirichlet_faces() const {
  int n = 0;
  for (const auto& f : boundary_faces)
    if (f.tag == BcTag::dirichlet) ++n;
  return n;
}

Vec2 Mesh::barycenter(int t) const {
  const auto& tri = tris[t];
  return {(vertices[tri[0]][0] + vertices[tri[1]][0] + vertices[tri[2]][0]) / 3.0,
          (vertices[tri[0]][1] + vertices[tri[1]][1] + vertices[tri[2]][1]) / 3.0};
}

double Mesh::max_diameter() const {
  double h = 0.0;
  for (const auto& tri : tris) {
    for (int i = 0; i < 3; ++i) {
      const Vec2 d = vertices[tri[(i + 1) % 3]] - vertices[tri[i]];
      h = std::max(h, norm(d));
    }
  }
  return h;
}

std::array<Vec2, 3> Mesh::barycentric_gradients(int t) const {
  const auto& tri = tris[t];
  const Vec2 v0 = vertices[tri[0]], v1 = vertices[tri[1]], v2 = vertices[tri[2]];
  const double inv2a = 1.0 / (2.0 * area[t]);
  return {Vec2{(v1[1] - v2[1]) * inv2a, (v2[0] - v1[0]) * inv2a},
          Vec2{(v2[1] - v0[1]) * inv2a, (v0[0] - v2[0]) * inv2a},
          Vec2{(v0[1] - v1[1]) * inv2a, (v1[0] - v0[0]) * inv2a}};
}

Mesh finish_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> tris,
                 const std::vector<std::array<int, 2>>& boundary_edges,
                 const std::vector<BcTag>& boundary_tags) {
  Mesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.tris = std::move(tris);

  mesh.area.resize(mesh.tris.size());
  for (size_t t = 0; t < mesh.tris.size(); ++t) {
    const auto& tri = mesh.tris[t];
    const Vec2 v0 = mesh.vertices[tri[0]];
    const double a = 0.5 * cross(mesh.vertices[tri[1]] - v0, mesh.vertices[tri[2]] - v0);
    if (a <= 0.0)
      throw ValidationError("finish_mesh: element " + std::to_string(t) +
                            " has non-positive area (vertices must be CCW)");
    mesh.area[t] = a;
  }

  // Edge map keyed by sorted vertex pair.
  struct EdgeUse {
    int elem, local;
  };
  std::map<std::pair<int, int>, std::vector<EdgeUse>> edges;
  for (size_t t = 0; t < mesh.tris.size(); ++t) {
    for (int e = 0; e < 3; ++e) {
      const int a = mesh.tris[t][(e + 1) % 3];
      const int b = mesh.tris[t][(e + 2) % 3];
      edges[{std::min(a, b), std::max(a, b)}].push_back({static_cast<int>(t), e});
    }
  }

  std::map<std::pair<int, int>, BcTag> tag_map;
  for (size_t i = 0; i < boundary_edges.size(); ++i) {
    const auto& be = boundary_edges[i];
    tag_map[{std::min(be[0], be[1]), std::max(be[0], be[1])}] = boundary_tags[i];
  }

  mesh.elem_faces.resize(mesh.tris.size());
  auto edge_vec = [&](int elem, int local) {
    const int a = mesh.tris[elem][(local + 1) % 3];
    const int b = mesh.tris[elem][(local + 2) % 3];
    return std::pair<int, int>(a, b);
  };

  for (const auto& [key, uses] : edges) {
    if (uses.size() == 1) {
      const auto it = tag_map.find(key);
      if (it == tag_map.end())
        throw ValidationError("finish_mesh: boundary edge (" + std::to_string(key.first) + "," +
                              std::to_string(key.second) + ") has no boundary tag");
      Mesh::BoundaryFace f;
      f.owner = uses[0].elem;
      f.owner_local = uses[0].local;
      auto [a, b] = edge_vec(f.owner, f.owner_local);
      f.a = a;
      f.b = b;
      const Vec2 d = mesh.vertices[b] - mesh.vertices[a];
      f.length = norm(d);
      f.normal = {d[1] / f.length, -d[0] / f.length};
      f.tag = it->second;
      mesh.elem_faces[f.owner][f.owner_local] = {false, static_cast<int>(mesh.boundary_faces.size()), true};
      mesh.boundary_faces.push_back(f);
    } else if (uses.size() == 2) {
      if (tag_map.count(key))
        throw ValidationError("finish_mesh: interior edge listed as boundary");
      Mesh::InteriorFace f;
      EdgeUse lo = uses[0], hi = uses[1];
      if (lo.elem > hi.elem) std::swap(lo, hi);
      f.left = lo.elem;
      f.right = hi.elem;
      f.left_local = lo.local;
      f.right_local = hi.local;
      auto [a, b] = edge_vec(f.left, f.left_local);
      f.a = a;
      f.b = b;
      const Vec2 d = mesh.vertices[b] - mesh.vertices[a];
      f.length = norm(d);
      f.normal = {d[1] / f.length, -d[0] / f.length};
      const int idx = static_cast<int>(mesh.interior_faces.size());
      mesh.elem_faces[f.left][f.left_local] = {true, idx, true};
      mesh.elem_faces[f.right][f.right_local] = {true, idx, false};
      mesh.interior_faces.push_back(f);
    } else {
      throw ValidationError("finish_mesh: edge shared by more than two elements");
    }
  }

  validate_mesh(mesh);
  return mesh;
}

void validate_mesh(const Mesh& mesh) {
  for (size_t t = 0; t < mesh.tris.size(); ++t) {
    if (mesh.area[t] <= 0.0) throw ValidationError("validate_mesh: non-positive area");
    // Polygon closure: sum of |e| * n_out over the element boundary vanishes.
    Vec2 sum{0, 0};
    double perimeter = 0.0;
    for (int e = 0; e < 3; ++e) {
      const auto& ref = mesh.elem_faces[t][e];
      if (ref.index < 0) throw ValidationError("validate_mesh: missing face record");
      Vec2 n;
      double len;
      if (ref.interior) {
        const auto& f = mesh.interior_faces[ref.index];
        n = f.normal;
        len = f.length;
        if (!ref.is_left) n = -1.0 * n;
      } else {
        const auto& f = mesh.boundary_faces[ref.index];
        n = f.normal;
        len = f.length;
      }
      if (std::abs(norm(n) - 1.0) > 1e-12)
        throw ValidationError("validate_mesh: non-unit face normal");
      sum = sum + len * n;
      perimeter += len;
    }
    if (norm(sum) > 1e-12 * perimeter)
      throw ValidationError("validate_mesh: polygon closure violated on element " +
                            std::to_string(t));
  }
}

DomainSpec domain_spec(DomainShape shape) {
  DomainSpec spec;
  spec.shape = shape;
  switch (shape) {
    case DomainShape::unit_square:
      spec.cells = {{0, 0}};
      spec.all_dirichlet = true;
      spec.base_resolution = 1;
      break;
    case DomainShape::ten_shape:
      // Five unit squares in a plus arrangement centered at (3/2, 3/2),
      // low-conductivity block in the middle of the central square.
      spec.cells = {{1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 2}};
      spec.k_regions = {{1.25, 1.25, 1.75, 1.75, 1e-2}};
      spec.dirichlet_segments = {
          {0, 0.0, 1.0, 2.0, 1.0},  // inlet  x=0, 1<y<2, p=1
          {0, 3.0, 1.0, 2.0, 0.0},  // outlet x=3
          {1, 0.0, 1.0, 2.0, 0.0},  // outlet y=0
          {1, 3.0, 1.0, 2.0, 0.0},  // outlet y=3
      };
      spec.base_resolution = 8;
      break;
    case DomainShape::l_shape:
      // [0,2]^2 minus the top-right unit square, two low-conductivity blocks
      // in the left column.
      spec.cells = {{0, 0}, {0, 1}, {1, 0}};
      spec.k_regions = {{0.25, 0.25, 0.75, 0.75, 1e-2}, {0.25, 1.25, 0.75, 1.75, 1e-2}};
      spec.dirichlet_segments = {
          {0, 0.0, 1.0, 2.0, 1.0},  // inlet  x=0, 1<y<2, p=1
          {0, 2.0, 0.0, 1.0, 0.0},  // outlet x=2, 0<y<1
      };
      spec.base_resolution = 8;
      break;
  }
  return spec;
}

Mesh build_structured_mesh_n(const DomainSpec& spec, int n) {
  if (n < 1) throw ValidationError("build_structured_mesh: resolution must be positive");
  // Conductivity-region edges must land on grid lines.
  const double h = 1.0 / n;
  for (const auto& r : spec.k_regions) {
    for (double c : {r.xmin, r.ymin, r.xmax, r.ymax}) {
      const double ratio = c / h;
      if (std::abs(ratio - std::round(ratio)) > 1e-9)
        throw ValidationError(
            "build_structured_mesh: resolution misaligns a conductivity region boundary");
    }
  }

  // Global lattice over the bounding box of the active cells.
  int cx_max = 0, cy_max = 0;
  for (const auto& c : spec.cells) {
    cx_max = std::max(cx_max, c[0] + 1);
    cy_max = std::max(cy_max, c[1] + 1);
  }
  const int nx = cx_max * n, ny = cy_max * n;
  std::vector<int> vid(static_cast<size_t>(nx + 1) * (ny + 1), -1);
  auto lat = [nx](int i, int j) { return static_cast<size_t>(j) * (nx + 1) + i; };

  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> tris;
  auto get_vertex = [&](int i, int j) {
    int& id = vid[lat(i, j)];
    if (id < 0) {
      id = static_cast<int>(vertices.size());
      vertices.push_back({h * i, h * j});
    }
    return id;
  };

  for (const auto& c : spec.cells) {
    for (int j = c[1] * n; j < (c[1] + 1) * n; ++j) {
      for (int i = c[0] * n; i < (c[0] + 1) * n; ++i) {
        const int v00 = get_vertex(i, j);
        const int v10 = get_vertex(i + 1, j);
        const int v01 = get_vertex(i, j + 1);
        const int v11 = get_vertex(i + 1, j + 1);
        tris.push_back({v00, v10, v11});
        tris.push_back({v00, v11, v01});
      }
    }
  }

  // Boundary edges: edges used by exactly one triangle.
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& tri : tris)
    for (int e = 0; e < 3; ++e) {
      const int a = tri[(e + 1) % 3], b = tri[(e + 2) % 3];
      edge_count[{std::min(a, b), std::max(a, b)}]++;
    }
  std::vector<std::array<int, 2>> bedges;
  std::vector<BcTag> btags;
  for (const auto& [key, count] : edge_count) {
    if (count != 1) continue;
    bedges.push_back({key.first, key.second});
    const Vec2 mid = 0.5 * (vertices[key.first] + vertices[key.second]);
    BcTag tag = BcTag::neumann;
    if (spec.all_dirichlet) {
      tag = BcTag::dirichlet;
    } else {
      for (const auto& seg : spec.dirichlet_segments)
        if (seg.contains(mid)) {
          tag = BcTag::dirichlet;
          break;
        }
    }
    btags.push_back(tag);
  }

  return finish_mesh(std::move(vertices), std::move(tris), bedges, btags);
}

Mesh build_structured_mesh(const DomainSpec& spec, int level) {
  if (level < 0) throw ValidationError("build_structured_mesh: level must be >= 0");
  return build_structured_mesh_n(spec, spec.base_resolution << level);
}

Mesh uniform_refine(const Mesh& mesh) {
  std::vector<Vec2> vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid_vertex = [&](int a, int b) {
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int id = static_cast<int>(vertices.size());
    vertices.push_back(0.5 * (mesh.vertices[key.first] + mesh.vertices[key.second]));
    midpoint.emplace(key, id);
    return id;
  };

  std::vector<std::array<int, 3>> tris;
  tris.reserve(mesh.tris.size() * 4);
  for (const auto& tri : mesh.tris) {
    const int m01 = mid_vertex(tri[0], tri[1]);
    const int m12 = mid_vertex(tri[1], tri[2]);
    const int m20 = mid_vertex(tri[2], tri[0]);
    tris.push_back({tri[0], m01, m20});
    tris.push_back({m01, tri[1], m12});
    tris.push_back({m20, m12, tri[2]});
    tris.push_back({m01, m12, m20});
  }

  std::vector<std::array<int, 2>> bedges;
  std::vector<BcTag> btags;
  for (const auto& f : mesh.boundary_faces) {
    const int m = mid_vertex(f.a, f.b);
    bedges.push_back({f.a, m});
    bedges.push_back({m, f.b});
    btags.push_back(f.tag);
    btags.push_back(f.tag);
  }

  return finish_mesh(std::move(vertices), std::move(tris), bedges, btags);
}

std::vector<double> conductivity_field(const DomainSpec& spec, const Mesh& mesh) {
  std::vector<double> k(mesh.tris.size(), spec.base_conductivity);
  for (size_t t = 0; t < mesh.tris.size(); ++t) {
    const Vec2 bc = mesh.barycenter(static_cast<int>(t));
    for (const auto& r : spec.k_regions) {
      if (bc[0] > r.xmin - kGeomTol && bc[0] < r.xmax + kGeomTol && bc[1] > r.ymin - kGeomTol &&
          bc[1] < r.ymax + kGeomTol) {
        // Whole element must sit inside the region.
        for (int v = 0; v < 3; ++v) {
          const Vec2 p = mesh.vertices[mesh.tris[t][v]];
          if (p[0] < r.xmin - kGeomTol || p[0] > r.xmax + kGeomTol || p[1] < r.ymin - kGeomTol ||
              p[1] > r.ymax + kGeomTol)
            throw ValidationError("conductivity_field: element straddles a region boundary");
        }
        k[t] = r.value;
        break;
      }
    }
  }
  return k;
}

void write_mesh_text(const Mesh& mesh, std::ostream& out) {
  char buf[80];
  out << "nodes " << mesh.vertices.size() << "\n";
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", v[0], v[1]);
    out << buf;
  }
  out << "elements " << mesh.tris.size() << "\n";
  for (const auto& t : mesh.tris) out << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "boundary " << mesh.boundary_faces.size() << "\n";
  for (const auto& f : mesh.boundary_faces)
    out << f.a << " " << f.b << " " << (f.tag == BcTag::dirichlet ? "D" : "N") << "\n";
}

Mesh read_mesh_text(std::istream& in) {
  auto expect_keyword = [&](const char* kw) {
    std::string word;
    if (!(in >> word) || word != kw)
      throw ConfigError(std::string("mesh format: expected '") + kw + "', got '" + word + "'");
    long count = -1;
    if (!(in >> count) || count < 0)
      throw ConfigError(std::string("mesh format: bad count after '") + kw + "'");
    return count;
  };

  const long nv = expect_keyword("nodes");
  std::vector<Vec2> vertices(nv);
  for (long i = 0; i < nv; ++i)
    if (!(in >> vertices[i][0] >> vertices[i][1]))
      throw ConfigError("mesh format: bad node line " + std::to_string(i));

  const long nt = expect_keyword("elements");
  std::vector<std::array<int, 3>> tris(nt);
  for (long i = 0; i < nt; ++i) {
    if (!(in >> tris[i][0] >> tris[i][1] >> tris[i][2]))
      throw ConfigError("mesh format: bad element line " + std::to_string(i));
    for (int v : tris[i])
      if (v < 0 || v >= nv) throw ConfigError("mesh format: vertex index out of range");
  }

  const long nb = expect_keyword("boundary");
  std::vector<std::array<int, 2>> bedges(nb);
  std::vector<BcTag> btags(nb);
  for (long i = 0; i < nb; ++i) {
    std::string tag;
    if (!(in >> bedges[i][0] >> bedges[i][1] >> tag))
      throw ConfigError("mesh format: bad boundary line " + std::to_string(i));
    if (tag == "D")
      btags[i] = BcTag::dirichlet;
    else if (tag == "N")
      btags[i] = BcTag::neumann;
    else
      throw ConfigError("mesh format: boundary tag must be D or N, got '" + tag + "'");
  }

  return finish_mesh(std::move(vertices), std::move(tris), bedges, btags);
}

void write_mesh_file(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open mesh file for writing: " + path);
  write_mesh_text(mesh, out);
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mesh file: " + path);
  return read_mesh_text(in);
}

}  // namespace epg
