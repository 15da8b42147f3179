#include "stir/runspec.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "stir/csv.hpp"
#include "stir/errors.hpp"

namespace stir {

ModelParams RunSpec::params() const {
  ModelParams p;
  p.half_width = half_width;
  if (model == "density") {
    p.kind = ModelKind::DensityReservoir;
    p.rho_plus = rho_plus.value_or(1.0);
    p.rho_minus = rho_minus.value_or(0.0);
  } else {
    p.kind = ModelKind::CurrentReservoir;
    p.boundary_intensity = boundary_intensity > 0 ? boundary_intensity : 1.0;
  }
  return p;
}

RunSpec validate(RunSpec spec) {
  std::vector<std::string> errors;
  static const std::set<std::string> commands = {
      "simulate", "survival", "scaling", "stationary", "auxwalk",
      "oracle",   "compare",  "fk",      "floor"};
  if (!commands.count(spec.command))
    errors.push_back("unknown command '" + spec.command + "'");
  if (spec.model != "density" && spec.model != "current")
    errors.push_back("model must be 'density' or 'current'");

  if (spec.half_width < 1) errors.push_back("N must be a positive integer");

  if (spec.model == "current") {
    if (spec.rho_plus || spec.rho_minus)
      errors.push_back("rho_plus/rho_minus are density-model parameters");
    if (spec.boundary_intensity <= 0 && spec.boundary_intensity != -1.0)
      errors.push_back("j must be > 0");
    if (spec.boundary_intensity == -1.0) spec.boundary_intensity = 1.0;
  } else {
    const double rp = spec.rho_plus.value_or(1.0);
    const double rm = spec.rho_minus.value_or(0.0);
    if (rp < rm) errors.push_back("need rho_plus >= rho_minus");
    if (rp > 1.0 || rm < 0.0) errors.push_back("need rho values in [0, 1]");
    spec.rho_plus = rp;
    spec.rho_minus = rm;
  }

  const double n2 = static_cast<double>(spec.half_width) * spec.half_width;
  if (spec.horizon < 0) spec.horizon = spec.command == "floor" ? n2 : 40.0 * n2;
  if (spec.burn_in < 0) spec.burn_in = 10.0 * n2;
  if (spec.sample_horizon < 0) spec.sample_horizon = 10.0 * n2;
  if (spec.bin_width <= 0) spec.bin_width = std::max(1.0, n2 / 50.0);
  if (spec.grid_step <= 0) spec.grid_step = n2 / 50.0;
  if (spec.fit_lo < 0) spec.fit_lo = 5.0 * n2;
  if (spec.fit_hi < 0) spec.fit_hi = 40.0 * n2;
  if (spec.fk_step <= 0) spec.fk_step = 0.005;
  if (spec.replicas < 0) spec.replicas = 10000;
  if (spec.scaling_sizes.empty()) spec.scaling_sizes = {4, 8, 16};
  for (std::size_t i = 1; i < spec.scaling_sizes.size(); ++i)
    if (spec.scaling_sizes[i] <= spec.scaling_sizes[i - 1])
      errors.push_back("scaling sizes must be strictly ascending");

  if (!spec.initial.empty() && spec.half_width >= 1 &&
      spec.initial.size() != static_cast<std::size_t>(2 * spec.half_width + 1))
    errors.push_back("initial configuration length must be 2N+1");

  if (!errors.empty()) {
    std::string joined;
    for (const auto& e : errors) {
      if (!joined.empty()) joined += "; ";
      joined += e;
    }
    throw ValidationError(joined);
  }
  return spec;
}

void apply_key_value(RunSpec& spec, const std::string& key, const std::string& value) {
  auto as_double = [&] { return std::stod(value); };
  auto as_long = [&] { return std::stol(value); };
  if (key == "command") spec.command = value;
  else if (key == "model") spec.model = value;
  else if (key == "n") spec.half_width = static_cast<int>(as_long());
  else if (key == "j") spec.boundary_intensity = as_double();
  else if (key == "rho_plus") spec.rho_plus = as_double();
  else if (key == "rho_minus") spec.rho_minus = as_double();
  else if (key == "seed") spec.seed = std::stoull(value);
  else if (key == "replicas") spec.replicas = as_long();
  else if (key == "horizon") spec.horizon = as_double();
  else if (key == "burn_in") spec.burn_in = as_double();
  else if (key == "sample_horizon") spec.sample_horizon = as_double();
  else if (key == "bin_width") spec.bin_width = as_double();
  else if (key == "grid_step") spec.grid_step = as_double();
  else if (key == "fit_lo") spec.fit_lo = as_double();
  else if (key == "fit_hi") spec.fit_hi = as_double();
  else if (key == "fk_step") spec.fk_step = as_double();
  else if (key == "floor_target") spec.floor_target = as_double();
  else if (key == "initial") spec.initial = value;
  else if (key == "coupled") spec.coupled_oracle = value == "1" || value == "true";
  else if (key == "threads") spec.threads = static_cast<int>(as_long());
  else if (key == "out") spec.out_dir = value;
  else if (key == "format") spec.format = value;
  else if (key == "scaling_sizes") {
    spec.scaling_sizes.clear();
    std::stringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ' '))
      if (!tok.empty()) spec.scaling_sizes.push_back(std::stoi(tok));
  } else if (key == "sigma") spec.thresholds.sigma = as_double();
  else if (key == "ks_level") spec.thresholds.ks_level = as_double();
  else if (key == "floor_min") spec.thresholds.floor_min = as_double();
  else if (key == "fit_r2_min") spec.thresholds.fit_r2_min = as_double();
  else if (key == "profile_r2_min") spec.thresholds.profile_r2_min = as_double();
  else if (key == "flatness_max") spec.thresholds.scaling_flatness_max = as_double();
  else if (key == "version" || key == "wall_seconds" || key == "outputs") {
    // manifest bookkeeping keys, ignored on replay
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

RunSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  RunSpec spec;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r')) line.pop_back();
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("malformed config line: " + line);
    apply_key_value(spec, line.substr(0, eq), line.substr(eq + 1));
  }
  return spec;
}

std::string manifest_text(const RunSpec& spec, double wall_seconds,
                          const std::vector<std::string>& outputs) {
  std::ostringstream out;
  auto kv = [&](const std::string& k, const std::string& v) { out << k << '=' << v << '\n'; };
  kv("command", spec.command);
  kv("model", spec.model);
  kv("n", std::to_string(spec.half_width));
  if (spec.model == "current") kv("j", fmt_double(spec.boundary_intensity));
  if (spec.rho_plus) kv("rho_plus", fmt_double(*spec.rho_plus));
  if (spec.rho_minus) kv("rho_minus", fmt_double(*spec.rho_minus));
  kv("seed", std::to_string(spec.seed));
  kv("replicas", std::to_string(spec.replicas));
  kv("horizon", fmt_double(spec.horizon));
  kv("burn_in", fmt_double(spec.burn_in));
  kv("sample_horizon", fmt_double(spec.sample_horizon));
  kv("bin_width", fmt_double(spec.bin_width));
  kv("grid_step", fmt_double(spec.grid_step));
  kv("fit_lo", fmt_double(spec.fit_lo));
  kv("fit_hi", fmt_double(spec.fit_hi));
  kv("fk_step", fmt_double(spec.fk_step));
  kv("floor_target", fmt_double(spec.floor_target));
  if (!spec.initial.empty()) kv("initial", spec.initial);
  if (spec.coupled_oracle) kv("coupled", "1");
  if (spec.command == "scaling") {
    std::string sizes;
    for (int n : spec.scaling_sizes) {
      if (!sizes.empty()) sizes += ' ';
      sizes += std::to_string(n);
    }
    kv("scaling_sizes", sizes);
  }
  kv("version", "stirsim 1.0");
  kv("wall_seconds", fmt_double(wall_seconds));
  std::string files;
  for (const auto& f : outputs) {
    if (!files.empty()) files += ' ';
    files += f;
  }
  kv("outputs", files);
  return out.str();
}

}  // namespace stir
