#include "epg/io.hpp"

#include <cstdio>
#include <fstream>

namespace epg {

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

void write_vtk(const std::string& path, const Mesh& mesh, const std::string& title,
               const std::vector<NamedScalars>& point_scalars,
               const std::vector<NamedScalars>& cell_scalars,
               const std::vector<NamedVectors>& cell_vectors) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open VTK file for writing: " + path);
  out << "# vtk DataFile Version 2.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const auto& v : mesh.vertices) out << fmt(v[0]) << " " << fmt(v[1]) << " 0\n";
  out << "CELLS " << mesh.n_elements() << " " << 4 * mesh.n_elements() << "\n";
  for (const auto& t : mesh.tris) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "CELL_TYPES " << mesh.n_elements() << "\n";
  for (int t = 0; t < mesh.n_elements(); ++t) out << "5\n";

  if (!point_scalars.empty()) {
    out << "POINT_DATA " << mesh.n_vertices() << "\n";
    for (const auto& field : point_scalars) {
      out << "SCALARS " << field.name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : *field.values) out << fmt(v) << "\n";
    }
  }
  if (!cell_scalars.empty() || !cell_vectors.empty()) {
    out << "CELL_DATA " << mesh.n_elements() << "\n";
    for (const auto& field : cell_scalars) {
      out << "SCALARS " << field.name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : *field.values) out << fmt(v) << "\n";
    }
    for (const auto& field : cell_vectors) {
      out << "VECTORS " << field.name << " double\n";
      for (const auto& v : *field.values) out << fmt(v[0]) << " " << fmt(v[1]) << " 0\n";
    }
  }
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open CSV file for writing: " + path);
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

std::string csv_number(double value) { return fmt(value); }
std::string csv_number(int value) { return std::to_string(value); }

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot hash missing file: " + path);
  std::uint64_t hash = 14695981039346656037ull;
  char chunk[4096];
  while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(chunk[i]);
      hash *= 1099511628211ull;
    }
  }
  return hash;
}

void write_manifest(const std::string& directory, const std::vector<std::string>& filenames) {
  std::ofstream out(directory + "/manifest.txt");
  if (!out) throw ConfigError("cannot open manifest for writing in " + directory);
  char buf[32];
  for (const auto& name : filenames) {
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a_file(directory + "/" + name)));
    out << buf << "  " << name << "\n";
  }
}

}  // namespace epg
