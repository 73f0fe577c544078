// Command-line driver for the EPG Darcy/transport solvers.
//
// Exit codes: 0 ok, 2 configuration error, 3 solver failure,
// 4 validation/invariant failure.

#include <cstdio>
#include <exception>

#include "CLI11.hpp"
#include "epg/core.hpp"
#include "epg/runner.hpp"

namespace {

void add_common_flags(CLI::App* cmd, epg::RunConfig& config) {
  cmd->add_option("--domain", config.domain, "unit_square | ten_shape | l_shape");
  cmd->add_option("--preset", [&config](const std::vector<std::string>& values) {
        // example1/2/3 select the matching domain; dt/steps defaults follow.
        const std::string& name = values.front();
        if (name == "example1")
          config.domain = "unit_square";
        else if (name == "example2")
          config.domain = "ten_shape";
        else if (name == "example3")
          config.domain = "l_shape";
        else
          throw CLI::ValidationError("--preset", "use example1, example2 or example3");
        return true;
      },
      "example1 | example2 | example3 (shorthand for --domain with paper parameters)");
  cmd->add_option("--k", config.degree, "polynomial degree (1, 2 or 3)");
  cmd->add_option("--method", config.method, "cg | epg");
  cmd->add_option("--level", config.level, "mesh refinement level");
  cmd->add_option("--out", config.output_dir, "output directory");
  cmd->add_option("--rtol", config.rtol, "linear solver relative tolerance");
  cmd->set_config("--config", "", "key=value config file (flags override it)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Enriched Petrov-Galerkin Darcy flow and upwind transport"};
  app.require_subcommand(1);

  epg::RunConfig config;

  CLI::App* darcy = app.add_subcommand("darcy", "solve the pressure and recover the velocity");
  add_common_flags(darcy, config);
  darcy->add_flag("--dump-matrix", config.dump_matrix,
                  "write the step-1 system in coordinate format");

  CLI::App* transport = app.add_subcommand("transport", "advect a concentration field");
  add_common_flags(transport, config);
  transport->add_option("--dt", config.dt, "time step size");
  transport->add_option("--steps", config.steps, "number of time steps");
  transport->add_option("--scheme", config.scheme, "implicit | explicit");
  transport->add_option("--vtk-stride", config.vtk_stride,
                        "write a concentration snapshot every N steps (0 = none)");

  CLI::App* convergence = app.add_subcommand("convergence", "refinement study with rates");
  add_common_flags(convergence, config);
  convergence->add_option("--levels", config.max_level, "finest level of the sweep");
  convergence->add_option("--min-level", config.min_level, "coarsest level of the sweep");

  CLI::App* residuals =
      app.add_subcommand("residuals", "local conservation residuals of both methods");
  add_common_flags(residuals, config);

  // `convergence` sweeps all degrees unless --k narrows it.
  convergence->parse_complete_callback([&] {
    if (convergence->count("--k") == 0) config.degree = 0;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (darcy->parsed()) config.command = "darcy";
  if (transport->parsed()) config.command = "transport";
  if (convergence->parsed()) config.command = "convergence";
  if (residuals->parsed()) config.command = "residuals";

  try {
    const auto files = epg::run(config);
    std::printf("wrote %zu artifacts to %s\n", files.size(), config.output_dir.c_str());
    return 0;
  } catch (const epg::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const epg::SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 3;
  } catch (const epg::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
