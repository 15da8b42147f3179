#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stir/rng.hpp"

namespace stir {

// Empirical survival estimate P[tagged discrepancy alive at t] on a time grid.
// death_times holds the raw per-replica extinction times (infinity = alive at
// the horizon) so fits can bootstrap over replicas; mean_diff_count, when
// recorded, is the average total discrepancy count on the same grid.
struct SurvivalCurve {
  std::vector<double> grid;
  std::vector<double> p_hat;
  std::vector<double> std_err;
  long n_replicas = 0;
  std::vector<double> death_times;
  std::vector<double> mean_diff_count;
};

// Builds the curve from raw extinction times on a uniform grid (step dt,
// inclusive of 0 and horizon).
SurvivalCurve survival_from_deaths(std::vector<double> death_times, double horizon,
                                   double dt);

double binomial_std_err(double p, long n);

struct MeanErr {
  double mean = 0.0;
  double std_err = 0.0;
  long n = 0;
};

MeanErr mean_and_error(std::span<const double> xs);

// Per-(time, site) occupation frequencies with binomial errors.
struct MarginalTable {
  std::vector<double> times;
  std::vector<std::vector<double>> value;    // [time][site]
  std::vector<std::vector<double>> std_err;  // [time][site]
  long n_replicas = 0;
};

struct WlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;
  long n = 0;
};

// Weighted least squares of y against x with weights w (1/variance).
WlsFit weighted_least_squares(std::span<const double> x, std::span<const double> y,
                              std::span<const double> w);

// Ordinary least squares R^2 of y against x.
double linear_r2(std::span<const double> x, std::span<const double> y);

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;     // asymptotic two-sample critical value at `level`
  double level = 0.01;
  double p_value = 1.0;      // permutation p-value
  bool rejected = false;
};

// Two-sample Kolmogorov-Smirnov test.  Values of +infinity encode samples
// censored at a common horizon; the statistic is the sup over finite times.
// The p-value comes from `permutations` random relabelings of the pooled
// sample (0 skips it and keeps the asymptotic critical value only).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       double level, int permutations, std::uint64_t seed);

}  // namespace stir
