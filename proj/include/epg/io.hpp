#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "epg/core.hpp"
#include "epg/mesh.hpp"

namespace epg {

struct NamedScalars {
  std::string name;
  const std::vector<double>* values;
};
struct NamedVectors {
  std::string name;
  const std::vector<Vec2>* values;
};

// Legacy ASCII VTK unstructured grid (triangles), point and cell data.
void write_vtk(const std::string& path, const Mesh& mesh, const std::string& title,
               const std::vector<NamedScalars>& point_scalars,
               const std::vector<NamedScalars>& cell_scalars,
               const std::vector<NamedVectors>& cell_vectors);

// RFC-4180-style CSV with dot decimals; numbers printed with %.17g so that
// identical runs produce identical bytes.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
std::string csv_number(double value);
std::string csv_number(int value);

// FNV-1a content hash, for the artifact manifest.
std::uint64_t fnv1a_file(const std::string& path);
void write_manifest(const std::string& directory, const std::vector<std::string>& filenames);

}  // namespace epg
