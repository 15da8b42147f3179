#pragma once

namespace stir {

// All statistical acceptance thresholds in one place so every check is
// auditable and overridable from the CLI.
struct Thresholds {
  double sigma = 3.0;                // Monte Carlo agreement band (std errors)
  double gap_rel_tol = 0.10;         // fitted decay rate vs exact spectral gap
  double scaling_flatness_max = 2.0; // max/min of decay_rate * N^2
  double fit_r2_min = 0.98;          // log-linear survival fits
  double profile_r2_min = 0.99;      // stationary profile linearity
  double ks_level = 0.01;            // extinction-law KS test level
  double floor_min = 0.01;           // boundary-occupation tail probability
};

}  // namespace stir
