#include "stir/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stir/errors.hpp"
#include "stir/harris.hpp"

namespace stir {

namespace {

struct LogPoints {
  std::vector<double> t, logp, w;
  long last_death_points = 0;  // window points past the last death
};

LogPoints collect_window(const SurvivalCurve& curve, double lo, double hi) {
  LogPoints pts;
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    const double t = curve.grid[i];
    if (t < lo || t > hi) continue;
    const double p = curve.p_hat[i];
    if (p <= 0.0) {
      ++pts.last_death_points;
      continue;
    }
    if (p >= 1.0) continue;  // log variance degenerates at p = 1
    pts.t.push_back(t);
    pts.logp.push_back(std::log(p));
    // Delta method: Var[log p_hat] = (1-p)/(p R).
    pts.w.push_back(p * static_cast<double>(curve.n_replicas) / (1.0 - p));
  }
  return pts;
}

RateFit fit_points(const LogPoints& pts) {
  const WlsFit wls = weighted_least_squares(pts.t, pts.logp, pts.w);
  RateFit fit;
  fit.decay_rate = -wls.slope;
  fit.prefactor = std::exp(wls.intercept);
  fit.r2 = wls.r2;
  fit.n_points = wls.n;
  return fit;
}

}  // namespace

RateFit fit_exponential_rate(const SurvivalCurve& curve, double window_lo,
                             double window_hi, const FitOptions& opt) {
  LogPoints pts = collect_window(curve, window_lo, window_hi);
  if (pts.t.empty() && pts.last_death_points > 0)
    throw AllZeroTail("fit window lies past the extinction of every replica");
  if (pts.t.size() < 5)
    throw WindowTooSparse("only " + std::to_string(pts.t.size()) +
                          " usable points in the fit window");

  RateFit fit = fit_points(pts);
  fit.window_lo = window_lo;
  fit.window_hi = window_hi;
  fit.ci_lo = fit.ci_hi = fit.decay_rate;

  if (opt.bootstrap > 0 && !curve.death_times.empty()) {
    // Resample replicas, rebuild the curve on the same grid, refit.
    const auto& deaths = curve.death_times;
    const std::size_t n = deaths.size();
    const double horizon = curve.grid.back();
    const double dt = curve.grid.size() > 1 ? curve.grid[1] - curve.grid[0] : 1.0;
    Rng rng(opt.seed);
    std::vector<double> resampled(n);
    std::vector<double> rates;
    rates.reserve(opt.bootstrap);
    for (int b = 0; b < opt.bootstrap; ++b) {
      for (std::size_t i = 0; i < n; ++i) resampled[i] = deaths[rng.below(n)];
      SurvivalCurve boot = survival_from_deaths(resampled, horizon, dt);
      LogPoints bp = collect_window(boot, window_lo, window_hi);
      if (bp.t.size() < 2) continue;
      rates.push_back(fit_points(bp).decay_rate);
    }
    if (rates.size() >= 20) {
      std::sort(rates.begin(), rates.end());
      fit.ci_lo = rates[static_cast<std::size_t>(0.025 * (rates.size() - 1))];
      fit.ci_hi = rates[static_cast<std::size_t>(0.975 * (rates.size() - 1))];
    }
  }
  return fit;
}

ScalingTable scaling_table(const ModelParams& base, const std::vector<int>& n_list,
                           long replicas, std::uint64_t seed,
                           const ScalingOptions& opt) {
  ScalingTable table;
  double norm_min = std::numeric_limits<double>::infinity(), norm_max = 0.0;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    ModelParams p = base;
    p.half_width = n_list[i];
    p.validate();
    const double n2 = static_cast<double>(p.half_width) * p.half_width;

    SurvivalOptions sopt;
    sopt.threads = opt.threads;
    sopt.stream = 20 + i;
    SurvivalCurve curve = survival_samples(p, TaggedStart::uniform_over_sites(),
                                           opt.horizon_factor * n2, replicas, seed, sopt);
    FitOptions fopt = opt.fit;
    fopt.seed = seed ^ (0x5c17u + i);
    RateFit fit = fit_exponential_rate(curve, opt.window_lo_factor * n2,
                                       opt.window_hi_factor * n2, fopt);
    ScalingRow row;
    row.half_width = p.half_width;
    row.decay_rate = fit.decay_rate;
    row.normalized = fit.decay_rate * n2;
    row.ci_lo = fit.ci_lo;
    row.ci_hi = fit.ci_hi;
    row.r2 = fit.r2;
    row.replicas = replicas;
    table.rows.push_back(row);
    norm_min = std::min(norm_min, row.normalized);
    norm_max = std::max(norm_max, row.normalized);
  }
  table.flatness = norm_min > 0 ? norm_max / norm_min : 0.0;
  return table;
}

TvBoundCurve tv_bound(const SurvivalCurve& curve, int half_width) {
  const double m = 2.0 * half_width + 1.0;
  TvBoundCurve out;
  out.grid = curve.grid;
  out.bound.reserve(curve.grid.size());
  out.std_err.reserve(curve.grid.size());
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    out.bound.push_back(m * curve.p_hat[i]);
    out.std_err.push_back(m * curve.std_err[i]);
  }
  return out;
}

}  // namespace stir
