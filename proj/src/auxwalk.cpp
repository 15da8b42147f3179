#include "stir/auxwalk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stir/errors.hpp"
#include "stir/parallel.hpp"

namespace stir {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int RateTable::site_of_row(int row) const {
  switch (row) {
    case 0: return half_width;
    case 1: return half_width - 1;
    case 2: return -half_width;
    default: return -half_width + 1;
  }
}

int RateTable::bin_of(double t) const {
  const auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), t);
  const long k = static_cast<long>(it - bin_edges.begin()) - 1;
  return static_cast<int>(std::clamp<long>(k, 0, static_cast<long>(num_bins()) - 1));
}

bool RateTable::missing(int row, std::size_t bin) const {
  return std::isnan(death[row][bin]);
}

double RateTable::death_rate_at(int z, std::size_t bin) const {
  double total = 0.0;
  for (int row = 0; row < 4; ++row) {
    if (site_of_row(row) != z) continue;
    const double d = death[row][bin];
    if (std::isnan(d))
      throw MissingRates("death rate at z=" + std::to_string(z) + ", bin " +
                         std::to_string(bin) + " has no support");
    total += d;
  }
  return total;
}

double RateTable::extra_rate_at(int z, std::size_t bin) const {
  int row = -1;
  if (z == half_width) row = 0;
  else if (z == -half_width) row = 1;
  else return 0.0;
  const double a = extra[row][bin];
  if (std::isnan(a))
    throw MissingRates("extra rate at z=" + std::to_string(z) + ", bin " +
                       std::to_string(bin) + " has no support");
  return a;
}

double RateTable::first_missing_time() const {
  for (std::size_t b = 0; b < num_bins(); ++b)
    for (int row = 0; row < 4; ++row)
      if (missing(row, b)) return bin_edges[b];
  return kInf;
}

std::vector<double> default_bin_edges(const ModelParams& p, double horizon,
                                      double width) {
  const double n2 = static_cast<double>(p.half_width) * p.half_width;
  const double w = width > 0 ? width : std::max(1.0, n2 / 50.0);
  std::vector<double> edges;
  for (double t = 0.0; t < horizon; t += w) edges.push_back(t);
  edges.push_back(horizon);
  return edges;
}

namespace {

struct Accumulator {
  // counts[row][bin], death indicator sums, lower-bound indicator sums
  std::array<std::vector<long>, 4> count;
  std::array<std::vector<long>, 4> dead;
  std::array<std::vector<long>, 2> bound;

  explicit Accumulator(std::size_t bins) {
    for (auto& v : count) v.assign(bins, 0);
    for (auto& v : dead) v.assign(bins, 0);
    for (auto& v : bound) v.assign(bins, 0);
  }

  void merge(const Accumulator& o) {
    for (int r = 0; r < 4; ++r)
      for (std::size_t b = 0; b < count[r].size(); ++b) {
        count[r][b] += o.count[r][b];
        dead[r][b] += o.dead[r][b];
      }
    for (int r = 0; r < 2; ++r)
      for (std::size_t b = 0; b < bound[r].size(); ++b) bound[r][b] += o.bound[r][b];
  }
};

// Death / lower-bound indicators for a walker at the row's site.
struct Indicators {
  int dead_ind = 0;
  int bound_ind = -1;  // -1: not applicable
};

Indicators environment_indicators(const CoupledConfiguration& c, int row) {
  const int n = c.half_width();
  Indicators ind;
  switch (row) {
    case 0:  // walker at +N: dies unless the inner pair is agreeing-empty
      ind.dead_ind = c.at(n - 1) != SiteState::Empty;
      ind.bound_ind = c.at(n - 1) == SiteState::Full;
      break;
    case 1:  // walker at +(N-1): dies behind an agreeing-full edge
      ind.dead_ind = c.at(n) == SiteState::Full;
      break;
    case 2:  // walker at -N (mirror of row 0)
      ind.dead_ind = c.at(-n + 1) != SiteState::Full;
      ind.bound_ind = c.at(-n + 1) == SiteState::Empty;
      break;
    default:  // walker at -(N-1)
      ind.dead_ind = c.at(-n) == SiteState::Empty;
      break;
  }
  return ind;
}

RateTable finalize_table(const ModelParams& p, std::span<const double> edges,
                         const Accumulator& acc, long floor) {
  RateTable t;
  t.half_width = p.half_width;
  t.clock_rate = p.boundary_clock_rate();
  t.support_floor = floor;
  t.bin_edges.assign(edges.begin(), edges.end());
  const std::size_t bins = t.num_bins();
  for (int r = 0; r < 4; ++r) {
    t.death[r].assign(bins, kInf);
    t.support[r].assign(bins, 0);
  }
  for (int r = 0; r < 2; ++r) {
    t.extra[r].assign(bins, kInf);
    t.death_lower_bound[r].assign(bins, kInf);
  }
  for (std::size_t b = 0; b < bins; ++b) {
    for (int r = 0; r < 4; ++r) {
      const long n = acc.count[r][b];
      t.support[r][b] = n;
      if (n < floor) {
        t.death[r][b] = std::numeric_limits<double>::quiet_NaN();
        if (r == 0 || r == 2) {
          t.extra[r / 2][b] = std::numeric_limits<double>::quiet_NaN();
          t.death_lower_bound[r / 2][b] = std::numeric_limits<double>::quiet_NaN();
        }
        t.warnings.push_back("insufficient support: row " + std::to_string(r) +
                             " bin " + std::to_string(b) + " has " +
                             std::to_string(n) + " < " + std::to_string(floor));
        continue;
      }
      const double frac = static_cast<double>(acc.dead[r][b]) / static_cast<double>(n);
      t.death[r][b] = t.clock_rate * frac;
      if (r == 0 || r == 2) {
        // a + d = j/(2N) exactly: complementary indicators.
        t.extra[r / 2][b] = t.clock_rate * (1.0 - frac);
        t.death_lower_bound[r / 2][b] =
            t.clock_rate * (static_cast<double>(acc.bound[r / 2][b]) / static_cast<double>(n));
      }
    }
  }
  return t;
}

std::vector<double> bin_midpoints(std::span<const double> edges) {
  std::vector<double> mids;
  mids.reserve(edges.size() - 1);
  for (std::size_t k = 0; k + 1 < edges.size(); ++k)
    mids.push_back(0.5 * (edges[k] + edges[k + 1]));
  return mids;
}

std::vector<double> refine_edges(std::span<const double> edges) {
  std::vector<double> out;
  out.reserve(2 * edges.size());
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    out.push_back(edges[k]);
    out.push_back(0.5 * (edges[k] + edges[k + 1]));
  }
  out.push_back(edges.back());
  return out;
}

}  // namespace

RateEstimate estimate_rates(const ModelParams& p, TaggedStart z0,
                            const CoupledConfiguration& eta_star,
                            std::span<const double> bin_edges, long replicas,
                            std::uint64_t seed, const EstimateOptions& opt) {
  p.validate();
  if (p.kind != ModelKind::CurrentReservoir)
    throw WrongModel("auxiliary-walk rates are defined for the current-reservoir model");
  if (bin_edges.size() < 2 || bin_edges.front() != 0.0)
    throw ValidationError("bin edges must start at 0 and contain one bin");
  if (!z0.uniform && eta_star.at(z0.site) != SiteState::Diff)
    throw ValidationError("fixed tagged start must sit on a discrepancy");

  const double horizon = bin_edges.back();
  const std::vector<double> coarse(bin_edges.begin(), bin_edges.end());
  const std::vector<double> fine = refine_edges(bin_edges);

  // Snapshot grid: coarse midpoints, plus fine midpoints when refining.
  struct GridPoint {
    double t;
    int coarse_bin;  // -1 if none
    int fine_bin;
  };
  std::vector<GridPoint> grid;
  {
    const auto cm = bin_midpoints(coarse);
    for (std::size_t k = 0; k < cm.size(); ++k)
      grid.push_back({cm[k], static_cast<int>(k), -1});
    if (opt.with_refined) {
      const auto fm = bin_midpoints(fine);
      for (std::size_t k = 0; k < fm.size(); ++k)
        grid.push_back({fm[k], -1, static_cast<int>(k)});
    }
    std::sort(grid.begin(), grid.end(),
              [](const GridPoint& a, const GridPoint& b) { return a.t < b.t; });
  }

  std::vector<int> diff_sites;
  for (int x = -p.half_width; x <= p.half_width; ++x)
    if (eta_star.at(x) == SiteState::Diff) diff_sites.push_back(x);
  if (diff_sites.empty())
    throw ValidationError("initial coupled configuration has no discrepancy");

  const int threads = opt.threads > 0 ? opt.threads : default_threads();
  const std::size_t coarse_bins = coarse.size() - 1;
  const std::size_t fine_bins = fine.size() - 1;
  std::vector<Accumulator> acc_coarse(threads, Accumulator(coarse_bins));
  std::vector<Accumulator> acc_fine(threads, Accumulator(opt.with_refined ? fine_bins : 0));
  std::vector<double> deaths(replicas, kInf);
  const long chunk = (replicas + threads - 1) / threads;

  parallel_replicas(threads, threads, [&](long tid) {
    const long lo = tid * chunk, hi = std::min<long>(replicas, lo + chunk);
    for (long r = lo; r < hi; ++r) {
      Rng rng = Rng::from(seed, opt.stream, static_cast<std::uint64_t>(r));
      CoupledConfiguration c = eta_star;
      TaggedDiscrepancy z;
      z.site = z0.uniform
                   ? diff_sites[rng.below(diff_sites.size())]
                   : z0.site;
      CoupledSampler sampler(p);
      std::size_t next = 0;
      auto record = [&](const GridPoint& g) {
        for (int row = 0; row < 4; ++row) {
          int site = row == 0 ? p.half_width
                     : row == 1 ? p.half_width - 1
                     : row == 2 ? -p.half_width
                                : -p.half_width + 1;
          if (z.site != site) continue;
          const Indicators ind = environment_indicators(c, row);
          if (g.coarse_bin >= 0) {
            auto& a = acc_coarse[tid];
            ++a.count[row][g.coarse_bin];
            a.dead[row][g.coarse_bin] += ind.dead_ind;
            if (ind.bound_ind >= 0) a.bound[row / 2][g.coarse_bin] += ind.bound_ind;
          } else {
            auto& a = acc_fine[tid];
            ++a.count[row][g.fine_bin];
            a.dead[row][g.fine_bin] += ind.dead_ind;
            if (ind.bound_ind >= 0) a.bound[row / 2][g.fine_bin] += ind.bound_ind;
          }
          if (opt.recorder && g.coarse_bin >= 0)
            opt.recorder(r, g.coarse_bin, row, ind.dead_ind);
        }
      };
      auto flush = [&](double t, bool strict) {
        while (next < grid.size() && (strict ? grid[next].t < t : grid[next].t <= t)) {
          record(grid[next]);
          ++next;
        }
      };
      sampler.run(
          c, horizon, rng, [&](double t) { flush(t, true); return true; },
          [&](double t, const CoupledClock&, const MarkEffect& eff) {
            z.apply(eff);
            if (!z.alive) {
              deaths[r] = t;
              return false;  // conditioning only sees live walkers
            }
            return true;
          });
      if (z.alive) flush(horizon, false);
    }
  });

  Accumulator total_coarse(coarse_bins);
  for (const auto& a : acc_coarse) total_coarse.merge(a);
  RateEstimate est;
  est.table = finalize_table(p, coarse, total_coarse, opt.support_floor);
  if (opt.with_refined) {
    Accumulator total_fine(fine_bins);
    for (const auto& a : acc_fine) total_fine.merge(a);
    est.refined = finalize_table(p, fine, total_fine, opt.support_floor);
  }
  est.tagged_death_times = std::move(deaths);
  return est;
}

double evolve_aux(const RateTable& table, int z0, double horizon, Rng& rng) {
  const int n = table.half_width;
  if (z0 < -n || z0 > n) throw ValidationError("aux walk start off the lattice");
  if (table.num_bins() == 0 || table.bin_edges.back() < horizon)
    throw MissingRates("rate table does not cover the horizon");

  int z = z0;
  double t = 0.0;
  std::size_t bin = 0;
  while (t < horizon) {
    while (bin + 1 < table.num_bins() && t >= table.bin_edges[bin + 1]) ++bin;
    const double bin_end = std::min(horizon, table.bin_edges[bin + 1]);
    const double left = z > -n ? 0.5 : 0.0;
    const double right = z < n ? 0.5 : 0.0;
    const double extra = table.extra_rate_at(z, bin);
    const double death = table.death_rate_at(z, bin);
    const double total = left + right + extra + death;
    const double dt = rng.exponential(total);
    if (t + dt >= bin_end) {
      t = bin_end;  // memoryless: resample in the next bin
      continue;
    }
    t += dt;
    const double u = rng.uniform() * total;
    if (u < death) return t;
    if (u < death + extra) z += z > 0 ? -1 : 1;  // extra inward jump at an edge
    else if (u < death + extra + left) z -= 1;
    else z += 1;
  }
  return kInf;
}

ExtinctionComparison compare_extinction(const ModelParams& p, TaggedStart z0,
                                        double horizon, long replicas,
                                        std::uint64_t seed, const CompareOptions& opt) {
  p.validate();
  if (horizon <= 0.0) {
    // degenerate horizon: nothing can die, both laws are the unit survival
    ExtinctionComparison cmp;
    cmp.tagged = survival_from_deaths(std::vector<double>(replicas, kInf), 0.0, 1.0);
    cmp.aux = cmp.tagged;
    cmp.ks = ks_two_sample(cmp.tagged.death_times, cmp.aux.death_times, opt.ks_level,
                           0, seed);
    cmp.agree = true;
    return cmp;
  }
  const double n2 = static_cast<double>(p.half_width) * p.half_width;
  const double grid_step = opt.grid_step > 0 ? opt.grid_step : n2 / 50.0;
  const auto edges = default_bin_edges(p, horizon, opt.bin_width);

  EstimateOptions eopt;
  eopt.support_floor = opt.support_floor;
  eopt.threads = opt.threads;
  eopt.with_refined = true;
  RateEstimate est = estimate_rates(p, z0, CoupledConfiguration::all_diff(p.half_width),
                                    edges, replicas, seed, eopt);

  // The comparison runs on the supported prefix of the table: unsupported late
  // bins are never substituted by zero, both samples are censored there.
  const double missing_at = std::min(est.table.first_missing_time(),
                                     est.refined.first_missing_time());
  if (missing_at <= 0.0)
    throw MissingRates("no bin of the rate table has support");
  ExtinctionComparison cmp;
  cmp.horizon_effective = std::min(horizon, missing_at);
  cmp.rates = est.table;

  std::vector<double> tagged = est.tagged_death_times;
  for (double& d : tagged)
    if (d > cmp.horizon_effective) d = kInf;

  const long aux_n = opt.aux_replicas > 0 ? opt.aux_replicas : replicas;
  std::vector<double> aux(aux_n), aux_fine(aux_n);
  std::vector<int> diff_sites;
  for (int x = -p.half_width; x <= p.half_width; ++x) diff_sites.push_back(x);
  parallel_replicas(aux_n, opt.threads, [&](long r) {
    Rng rng = Rng::from(seed, /*stream=*/6, static_cast<std::uint64_t>(r));
    const int start = z0.uniform ? diff_sites[rng.below(diff_sites.size())] : z0.site;
    aux[r] = evolve_aux(est.table, start, cmp.horizon_effective, rng);
    Rng rng2 = Rng::from(seed, /*stream=*/16, static_cast<std::uint64_t>(r));
    const int start2 = z0.uniform ? diff_sites[rng2.below(diff_sites.size())] : z0.site;
    aux_fine[r] = evolve_aux(est.refined, start2, cmp.horizon_effective, rng2);
  });

  cmp.tagged = survival_from_deaths(tagged, cmp.horizon_effective, grid_step);
  cmp.aux = survival_from_deaths(aux, cmp.horizon_effective, grid_step);
  const SurvivalCurve aux_fine_curve =
      survival_from_deaths(aux_fine, cmp.horizon_effective, grid_step);
  for (std::size_t i = 0; i < cmp.aux.grid.size(); ++i)
    cmp.refinement_gap = std::max(
        cmp.refinement_gap, std::abs(cmp.aux.p_hat[i] - aux_fine_curve.p_hat[i]));

  cmp.ks = ks_two_sample(tagged, aux, opt.ks_level, opt.permutations, seed ^ 0xA5A5ull);
  cmp.agree = !cmp.ks.rejected;
  return cmp;
}

}  // namespace stir
