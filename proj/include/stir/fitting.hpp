#pragma once

#include <cstdint>
#include <vector>

#include "stir/params.hpp"
#include "stir/stats.hpp"

namespace stir {

struct RateFit {
  double decay_rate = 0.0;   // fitted exponential rate (slope magnitude)
  double prefactor = 0.0;    // exp(intercept)
  double window_lo = 0.0;
  double window_hi = 0.0;
  double ci_lo = 0.0;        // bootstrap 95% interval for decay_rate
  double ci_hi = 0.0;
  double r2 = 0.0;           // weighted R^2 of the log-linear fit
  long n_points = 0;
};

struct FitOptions {
  int bootstrap = 200;        // replica bootstrap resamples (0 disables)
  std::uint64_t seed = 1;
};

// Weighted least squares of log p_hat against t on the window, weights from
// delta-method variances Var[log p] = (1-p)/(p R).  Points with p_hat = 0 (or
// exactly 1) carry no usable log value and are skipped.  Throws AllZeroTail
// when every window point is past the last death, WindowTooSparse when fewer
// than 5 usable points remain.  The confidence interval resamples the raw
// per-replica death times when the curve carries them.
RateFit fit_exponential_rate(const SurvivalCurve& curve, double window_lo,
                             double window_hi, const FitOptions& opt = {});

struct ScalingRow {
  int half_width = 0;
  double decay_rate = 0.0;
  double normalized = 0.0;   // decay_rate * N^2
  double ci_lo = 0.0, ci_hi = 0.0;
  double r2 = 0.0;
  long replicas = 0;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  double flatness = 0.0;  // max/min of the normalized column
};

struct ScalingOptions {
  double horizon_factor = 40.0;   // horizon = factor * N^2
  double window_lo_factor = 5.0;  // fit window in units of N^2
  double window_hi_factor = 40.0;
  int threads = 0;
  FitOptions fit;
};

// Tagged-discrepancy survival, fit, and normalised rate per lattice size.
ScalingTable scaling_table(const ModelParams& base, const std::vector<int>& n_list,
                           long replicas, std::uint64_t seed,
                           const ScalingOptions& opt = {});

// Pointwise coupling bound (2N+1) * p_hat on the total-variation distance,
// with propagated errors.  An upper bound, not an estimate.
struct TvBoundCurve {
  std::vector<double> grid;
  std::vector<double> bound;
  std::vector<double> std_err;
};

TvBoundCurve tv_bound(const SurvivalCurve& curve, int half_width);

}  // namespace stir
