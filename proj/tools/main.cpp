#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stir/errors.hpp"
#include "stir/runspec.hpp"

namespace {

// Registers the flags shared by every subcommand.  Flags override values from
// --config; CLI11's final values land directly in the spec.
void add_common(CLI::App* cmd, stir::RunSpec& spec, std::string& config_path) {
  cmd->add_option("--config", config_path, "key=value file with defaults for any flag");
  cmd->add_option("-N,--half-width", spec.half_width, "lattice half-width N (sites -N..N)");
  cmd->add_option("--model", spec.model, "density|current");
  cmd->add_option("-j,--intensity", spec.boundary_intensity, "boundary intensity j");
  cmd->add_option("--rho-plus", [&spec](const CLI::results_t& r) {
    spec.rho_plus = std::stod(r[0]); return true;
  }, "right reservoir density");
  cmd->add_option("--rho-minus", [&spec](const CLI::results_t& r) {
    spec.rho_minus = std::stod(r[0]); return true;
  }, "left reservoir density");
  cmd->add_option("--seed", spec.seed, "master RNG seed");
  cmd->add_option("--replicas", spec.replicas, "Monte Carlo replicas");
  cmd->add_option("--horizon", spec.horizon, "process-time horizon");
  cmd->add_option("--burn-in", spec.burn_in, "stationary burn-in (default 10 N^2)");
  cmd->add_option("--sample-horizon", spec.sample_horizon, "stationary averaging span");
  cmd->add_option("--bin-width", spec.bin_width, "rate-table bin width");
  cmd->add_option("--grid-step", spec.grid_step, "survival-curve grid step");
  cmd->add_option("--fit-lo", spec.fit_lo, "fit window start (default 5 N^2)");
  cmd->add_option("--fit-hi", spec.fit_hi, "fit window end (default 40 N^2)");
  cmd->add_option("--fk-step", spec.fk_step, "integrator step for fk");
  cmd->add_option("--floor-target", spec.floor_target, "boundary occupation target");
  cmd->add_option("--initial", spec.initial, "initial configuration string");
  cmd->add_flag("--coupled", spec.coupled_oracle, "oracle: use the coupled chain");
  cmd->add_option("--scaling-sizes", spec.scaling_sizes, "lattice sizes for scaling");
  cmd->add_option("--threads", spec.threads, "worker threads (0 = all cores)");
  cmd->add_option("--out", spec.out_dir, "output directory");
  cmd->add_option("--format", spec.format, "output format (csv)");
  cmd->add_option("--sigma", spec.thresholds.sigma, "agreement band in std errors");
  cmd->add_option("--ks-level", spec.thresholds.ks_level, "KS test level");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-driven stirring particle system simulator and analysis toolkit"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"simulate", "event-resolved single-copy trajectory"},
      {"survival", "tagged-discrepancy survival curve, fit, and TV bound"},
      {"scaling", "decay-rate scaling table across lattice sizes"},
      {"stationary", "stationary occupation profile"},
      {"auxwalk", "conditional rate table of the auxiliary walk"},
      {"compare", "extinction-law comparison: tagged walk vs auxiliary walk"},
      {"oracle", "exact generator, stationary vector, TV decay, spectral gap"},
      {"fk", "deterministic killed-walk survival"},
      {"floor", "boundary occupation-time floor estimate"},
  };

  stir::RunSpec spec;
  std::string config_path;
  for (const Sub& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, spec, config_path);
    cmd->callback([&spec, &config_path, name = std::string(s.name)] {
      spec.command = name;
    });
  }

  // Pre-scan for --config so file values act as defaults under the flags.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        spec = stir::load_config(argv[i + 1]);
      } catch (const stir::Error& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
      }
    }
  }

  CLI11_PARSE(app, argc, argv);

  try {
    return stir::run(spec);
  } catch (const stir::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
