#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "stir/auxwalk.hpp"
#include "stir/csv.hpp"
#include "stir/dynamics.hpp"
#include "stir/errors.hpp"
#include "stir/feynman_kac.hpp"
#include "stir/fitting.hpp"
#include "stir/harris.hpp"
#include "stir/master_equation.hpp"
#include "stir/runspec.hpp"

namespace stir {

namespace {

namespace fs = std::filesystem;

struct Emitter {
  fs::path dir;
  std::vector<std::string> written;

  void csv(const std::string& name, const CsvFile& file) {
    file.write(dir / name);
    written.push_back(name);
  }
  void text(const std::string& name, const std::string& body) {
    write_text_atomic(dir / name, body);
    written.push_back(name);
  }
};

Configuration initial_single(const RunSpec& spec) {
  if (!spec.initial.empty()) return Configuration::from_string(spec.initial);
  return Configuration::all_empty(spec.half_width);
}

void emit_survival(const RunSpec& spec, const SurvivalCurve& curve, Emitter& em) {
  CsvFile csv({"t", "p_hat", "stderr", "n_alive", "n_replicas"});
  for (std::size_t i = 0; i < curve.grid.size(); ++i)
    csv.row(curve.grid[i], curve.p_hat[i], curve.std_err[i],
            static_cast<long>(std::llround(curve.p_hat[i] * curve.n_replicas)),
            curve.n_replicas);
  em.csv("survival.csv", csv);

  CsvFile fit_csv({"N", "b_hat", "b_lo", "b_hi", "c_hat", "window_lo", "window_hi",
                   "n_replicas", "r2"});
  try {
    FitOptions fopt;
    fopt.seed = spec.seed ^ 0xF17ull;
    const RateFit fit = fit_exponential_rate(curve, spec.fit_lo, spec.fit_hi, fopt);
    fit_csv.row(spec.half_width, fit.decay_rate, fit.ci_lo, fit.ci_hi, fit.prefactor,
                fit.window_lo, fit.window_hi, curve.n_replicas, fit.r2);
  } catch (const Error& e) {
    std::cerr << "fit skipped: " << e.what() << "\n";
  }
  em.csv("fit.csv", fit_csv);
}

void run_simulate(const RunSpec& spec, Emitter& em) {
  if (spec.coupled_oracle) {
    // coupled graphical run with labelled discrepancies, sampled on the grid
    std::vector<double> grid;
    for (double t = 0.0; t <= spec.horizon + 1e-12; t += spec.grid_step)
      grid.push_back(t);
    Rng rng = Rng::from(spec.seed, /*stream=*/9, 0);
    const auto snaps = evolve_coupled(CoupledConfiguration::all_diff(spec.half_width),
                                      spec.horizon, spec.params(), rng, grid);
    CsvFile csv({"t", "configuration", "live_labels"});
    for (const auto& s : snaps) {
      std::string labels;
      for (int l : s.live_labels) {
        if (!labels.empty()) labels += ' ';
        labels += std::to_string(l);
      }
      csv.row(s.time, s.config.str(), labels);
    }
    em.csv("snapshots.csv", csv);
    return;
  }
  const Trajectory traj = evolve(initial_single(spec), spec.horizon, spec.params(), spec.seed);
  CsvFile csv({"time", "configuration"});
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    csv.row(traj.times[i], traj.states[i].str());
  em.csv("trajectory.csv", csv);
}

void run_survival(const RunSpec& spec, Emitter& em) {
  SurvivalOptions opt;
  opt.grid_step = spec.grid_step;
  opt.threads = spec.threads;
  const SurvivalCurve curve =
      survival_samples(spec.params(), TaggedStart::uniform_over_sites(), spec.horizon,
                       spec.replicas, spec.seed, opt);
  emit_survival(spec, curve, em);

  const TvBoundCurve bound = tv_bound(curve, spec.half_width);
  CsvFile csv({"t", "tv_upper_bound", "stderr"});
  for (std::size_t i = 0; i < bound.grid.size(); ++i)
    csv.row(bound.grid[i], bound.bound[i], bound.std_err[i]);
  em.csv("tv_bound.csv", csv);
}

void run_scaling(const RunSpec& spec, Emitter& em) {
  ScalingOptions opt;
  opt.threads = spec.threads;
  opt.window_lo_factor = spec.fit_lo / (static_cast<double>(spec.half_width) * spec.half_width);
  opt.window_hi_factor = spec.fit_hi / (static_cast<double>(spec.half_width) * spec.half_width);
  opt.horizon_factor = spec.horizon / (static_cast<double>(spec.half_width) * spec.half_width);
  const ScalingTable table =
      scaling_table(spec.params(), spec.scaling_sizes, spec.replicas, spec.seed, opt);
  CsvFile csv({"N", "b_hat", "b_hat_times_N2", "b_lo", "b_hi", "r2", "n_replicas"});
  for (const auto& row : table.rows)
    csv.row(row.half_width, row.decay_rate, row.normalized, row.ci_lo, row.ci_hi,
            row.r2, row.replicas);
  em.csv("scaling.csv", csv);
  em.text("flatness.txt", fmt_double(table.flatness) + "\n");
}

void run_stationary(const RunSpec& spec, Emitter& em) {
  ProfileOptions opt;
  opt.threads = spec.threads;
  opt.burn_in = spec.burn_in;
  opt.sample_horizon = spec.sample_horizon;
  if (!spec.initial.empty()) opt.initial = Configuration::from_string(spec.initial);
  const ProfileEstimate est =
      estimate_stationary_profile(spec.params(), spec.replicas, spec.seed, opt);
  CsvFile csv({"site", "mean", "stderr", "n_samples"});
  for (int x = -spec.half_width; x <= spec.half_width; ++x)
    csv.row(x, est.mean[x + spec.half_width], est.std_err[x + spec.half_width],
            est.n_replicas);
  em.csv("profile.csv", csv);
}

void emit_rate_table(const RateTable& t, Emitter& em) {
  CsvFile csv({"bin_start", "bin_end", "site", "rate_kind", "value", "support"});
  for (std::size_t b = 0; b < t.num_bins(); ++b) {
    for (int row = 0; row < 4; ++row) {
      csv.row(t.bin_edges[b], t.bin_edges[b + 1], t.site_of_row(row), "d",
              t.missing(row, b) ? std::nan("") : t.death[row][b], t.support[row][b]);
      if (row == 0 || row == 2)
        csv.row(t.bin_edges[b], t.bin_edges[b + 1], t.site_of_row(row), "a",
                t.missing(row, b) ? std::nan("") : t.extra[row / 2][b], t.support[row][b]);
    }
  }
  em.csv("rates.csv", csv);
}

void run_auxwalk(const RunSpec& spec, Emitter& em) {
  const ModelParams p = spec.params();
  const auto edges = default_bin_edges(p, spec.horizon, spec.bin_width);
  EstimateOptions opt;
  opt.threads = spec.threads;
  const RateEstimate est =
      estimate_rates(p, TaggedStart::uniform_over_sites(),
                     CoupledConfiguration::all_diff(p.half_width), edges, spec.replicas,
                     spec.seed, opt);
  emit_rate_table(est.table, em);
  if (!est.table.warnings.empty()) {
    std::string w;
    for (const auto& s : est.table.warnings) w += s + "\n";
    em.text("warnings.txt", w);
  }
}

void run_compare(const RunSpec& spec, Emitter& em) {
  CompareOptions opt;
  opt.bin_width = spec.bin_width;
  opt.threads = spec.threads;
  opt.ks_level = spec.thresholds.ks_level;
  opt.grid_step = spec.grid_step;
  const ExtinctionComparison cmp = compare_extinction(
      spec.params(), TaggedStart::uniform_over_sites(), spec.horizon, spec.replicas,
      spec.seed, opt);

  CsvFile csv({"t", "tagged_p", "tagged_err", "aux_p", "aux_err"});
  for (std::size_t i = 0; i < cmp.tagged.grid.size(); ++i)
    csv.row(cmp.tagged.grid[i], cmp.tagged.p_hat[i], cmp.tagged.std_err[i],
            cmp.aux.p_hat[i], cmp.aux.std_err[i]);
  em.csv("extinction_curves.csv", csv);
  emit_rate_table(cmp.rates, em);

  std::string report;
  report += "ks_statistic=" + fmt_double(cmp.ks.statistic) + "\n";
  report += "ks_critical=" + fmt_double(cmp.ks.critical) + "\n";
  report += "ks_level=" + fmt_double(cmp.ks.level) + "\n";
  report += "ks_p_value=" + fmt_double(cmp.ks.p_value) + "\n";
  report += std::string("agreement=") + (cmp.agree ? "yes" : "no") + "\n";
  report += "horizon_effective=" + fmt_double(cmp.horizon_effective) + "\n";
  report += "bin_refinement_gap=" + fmt_double(cmp.refinement_gap) + "\n";
  em.text("comparison.txt", report);
}

void run_oracle(const RunSpec& spec, Emitter& em) {
  const ModelParams p = spec.params();
  const MasterEquation me = spec.coupled_oracle ? MasterEquation::coupled(p)
                                                : MasterEquation::single(p);
  // Documented plain-text format: "rows cols" header, then row-major entries.
  std::string gen;
  gen += std::to_string(me.dim()) + " " + std::to_string(me.dim()) + "\n";
  for (std::size_t i = 0; i < me.dim(); ++i) {
    for (std::size_t j = 0; j < me.dim(); ++j) {
      if (j) gen += ' ';
      gen += fmt_double(me.generator()(i, j));
    }
    gen += '\n';
  }
  em.text("generator.txt", gen);

  const auto& mu = me.stationary();
  CsvFile stat({"index", "configuration", "probability"});
  for (std::size_t i = 0; i < me.dim(); ++i)
    stat.row(static_cast<long>(i),
             spec.coupled_oracle ? me.coupled_config_of(i).str()
                                 : me.single_config_of(i).str(),
             mu[i]);
  em.csv("stationary.csv", stat);

  std::vector<double> grid;
  for (double t = 0.0; t <= spec.horizon + 1e-12; t += spec.grid_step)
    grid.push_back(t);
  std::vector<double> p0;
  if (spec.coupled_oracle) {
    p0 = me.point_mass(CoupledConfiguration::all_diff(p.half_width));
  } else {
    p0 = me.point_mass(initial_single(spec));
  }
  const auto tv = me.tv_decay(p0, grid);
  CsvFile decay({"t", "tv"});
  for (std::size_t i = 0; i < grid.size(); ++i) decay.row(grid[i], tv[i]);
  em.csv("tv_decay.csv", decay);

  em.text("gap.txt", fmt_double(me.spectral_gap()) + "\n");
}

void run_fk(const RunSpec& spec, Emitter& em) {
  const auto potential = default_boundary_potential(spec.half_width);
  const KilledWalkSolution sol =
      feynman_kac_solve(spec.half_width, spec.horizon, spec.fk_step, potential);
  CsvFile csv({"t", "site", "survival"});
  // Long form on the reporting grid, not every integrator step.
  for (double t = 0.0; t <= spec.horizon + 1e-12; t += spec.grid_step)
    for (int x = -spec.half_width; x <= spec.half_width; ++x)
      csv.row(t, x, sol.at(x, t));
  em.csv("fk.csv", csv);
}

void run_floor(const RunSpec& spec, Emitter& em) {
  const FloorEstimate est = hitting_floor_check(spec.half_width, spec.replicas, spec.seed,
                                                spec.horizon, spec.floor_target,
                                                spec.threads);
  CsvFile csv({"site", "estimate", "stderr", "n_replicas"});
  for (int x = -spec.half_width; x <= spec.half_width; ++x)
    csv.row(x, est.per_site[x + spec.half_width], est.std_err[x + spec.half_width],
            est.replicas_per_site);
  em.csv("floor.csv", csv);
  std::string summary;
  summary += "min_estimate=" + fmt_double(est.min_value) + "\n";
  summary += "argmin_site=" + std::to_string(est.argmin_site) + "\n";
  summary += std::string("passes_floor=") +
             (est.min_value > spec.thresholds.floor_min ? "yes" : "no") + "\n";
  em.text("floor_summary.txt", summary);
}

}  // namespace

int run(const RunSpec& spec_in) {
  const RunSpec spec = validate(spec_in);
  const auto t0 = std::chrono::steady_clock::now();
  Emitter em;
  em.dir = spec.out_dir;
  fs::create_directories(em.dir);

  if (spec.command == "simulate") run_simulate(spec, em);
  else if (spec.command == "survival") run_survival(spec, em);
  else if (spec.command == "scaling") run_scaling(spec, em);
  else if (spec.command == "stationary") run_stationary(spec, em);
  else if (spec.command == "auxwalk") run_auxwalk(spec, em);
  else if (spec.command == "compare") run_compare(spec, em);
  else if (spec.command == "oracle") run_oracle(spec, em);
  else if (spec.command == "fk") run_fk(spec, em);
  else if (spec.command == "floor") run_floor(spec, em);
  else throw ValidationError("unknown command " + spec.command);

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text_atomic(em.dir / "manifest.txt", manifest_text(spec, wall, em.written));
  std::cout << spec.command << ": wrote";
  for (const auto& f : em.written) std::cout << ' ' << f;
  std::cout << " and manifest.txt to " << em.dir.string() << "\n";
  return 0;
}

}  // namespace stir
