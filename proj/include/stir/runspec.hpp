#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stir/params.hpp"
#include "stir/thresholds.hpp"

namespace stir {

// A fully described experiment: one subcommand plus everything needed to
// reproduce its outputs byte for byte.  Unset numeric fields (< 0) receive
// documented defaults in validate().
struct RunSpec {
  std::string command;  // simulate|survival|scaling|stationary|auxwalk|oracle|compare|fk|floor
  std::string model = "current";  // density|current
  int half_width = 0;
  double boundary_intensity = -1.0;
  std::optional<double> rho_plus;
  std::optional<double> rho_minus;

  std::uint64_t seed = 1;
  long replicas = -1;
  double horizon = -1.0;        // default 40 N^2
  double burn_in = -1.0;        // default 10 N^2
  double sample_horizon = -1.0; // default 10 N^2
  double bin_width = -1.0;      // default max(1, N^2/50)
  double grid_step = -1.0;      // default N^2/50
  double fit_lo = -1.0;         // default 5 N^2
  double fit_hi = -1.0;         // default 40 N^2
  double fk_step = -1.0;        // default 0.005
  double floor_target = 1.0;
  std::vector<int> scaling_sizes;  // default {4, 8, 16}
  std::string initial;          // initial configuration string, optional
  bool coupled_oracle = false;
  int threads = 0;              // 0 = hardware concurrency
  std::string out_dir = ".";
  std::string format = "csv";
  Thresholds thresholds;

  ModelParams params() const;
};

// Fills defaults and aggregates every violation into one ValidationError.
RunSpec validate(RunSpec spec);

// Flat key=value config file mirroring the CLI flags; '#' starts a comment.
RunSpec load_config(const std::filesystem::path& path);

// The manifest doubles as a config file, so a run can be replayed from it.
std::string manifest_text(const RunSpec& spec, double wall_seconds,
                          const std::vector<std::string>& outputs);

// Applies one key=value pair (shared by config loading and manifest replay).
void apply_key_value(RunSpec& spec, const std::string& key, const std::string& value);

// Executes the validated spec, writing its CSVs and manifest under out_dir.
// Returns the process exit status (0 = success).
int run(const RunSpec& spec);

}  // namespace stir
