#pragma once

#include <string>
#include <vector>

#include "epg/mesh.hpp"

namespace epg {

// Configuration of one CLI run. Defaults marked "preset" are filled from the
// selected domain's experiment parameters when left negative.
struct RunConfig {
  std::string command;           // darcy | transport | convergence | residuals
  std::string domain = "unit_square";
  int degree = 1;                // k
  std::string method = "epg";    // cg | epg
  int level = -1;                // preset default per command
  double dt = -1.0;              // preset
  int steps = -1;                // preset
  std::string scheme = "implicit";  // implicit | explicit
  std::string output_dir = "out";
  double rtol = 1e-12;
  int vtk_stride = 0;            // transport snapshots every N steps; 0 = none
  int min_level = 1, max_level = 6;  // convergence sweep
  bool dump_matrix = false;      // darcy: coordinate-format dump of the step-1 system
};

// Executes the run and writes all artifacts plus a manifest into the output
// directory. Throws ConfigError / SolverError / ValidationError.
// Returns the list of artifact filenames (relative to the output directory).
std::vector<std::string> run(const RunConfig& config);

}  // namespace epg
