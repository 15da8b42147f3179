#include "stir/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace stir {

SurvivalCurve survival_from_deaths(std::vector<double> death_times, double horizon,
                                   double dt) {
  SurvivalCurve curve;
  curve.n_replicas = static_cast<long>(death_times.size());
  curve.death_times = death_times;
  std::sort(death_times.begin(), death_times.end());
  const long n = curve.n_replicas;
  for (double t = 0.0; t <= horizon + 0.5 * dt; t += dt) {
    const double tt = std::min(t, horizon);
    // alive at t  <=>  death time strictly greater than t
    const long dead =
        std::upper_bound(death_times.begin(), death_times.end(), tt) - death_times.begin();
    const double p = static_cast<double>(n - dead) / n;
    curve.grid.push_back(tt);
    curve.p_hat.push_back(p);
    curve.std_err.push_back(binomial_std_err(p, n));
    if (tt >= horizon) break;
  }
  return curve;
}

double binomial_std_err(double p, long n) {
  if (n <= 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

MeanErr mean_and_error(std::span<const double> xs) {
  MeanErr m;
  m.n = static_cast<long>(xs.size());
  if (m.n == 0) return m;
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / m.n;
  if (m.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.std_err = std::sqrt(ss / (m.n - 1.0) / m.n);
  }
  return m;
}

WlsFit weighted_least_squares(std::span<const double> x, std::span<const double> y,
                              std::span<const double> w) {
  WlsFit fit;
  fit.n = static_cast<long>(x.size());
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
    swxx += w[i] * x[i] * x[i];
    swxy += w[i] * x[i] * y[i];
  }
  const double det = sw * swxx - swx * swx;
  if (det <= 0 || sw <= 0) return fit;
  fit.slope = (sw * swxy - swx * swy) / det;
  fit.intercept = (swxx * swy - swx * swxy) / det;
  fit.slope_se = std::sqrt(sw / det);
  const double ybar = swy / sw;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double fitted = fit.intercept + fit.slope * x[i];
    ss_res += w[i] * (y[i] - fitted) * (y[i] - fitted);
    ss_tot += w[i] * (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
  return fit;
}

double linear_r2(std::span<const double> x, std::span<const double> y) {
  std::vector<double> w(x.size(), 1.0);
  return weighted_least_squares(x, y, w).r2;
}

namespace {

// sup_t |S_a(t) - S_b(t)| over finite values of the pooled sorted sample.
double ks_statistic_sorted(std::span<const double> a, std::span<const double> b) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    double t;
    if (i < a.size() && (j >= b.size() || a[i] <= b[j])) t = a[i];
    else t = b[j];
    if (!std::isfinite(t)) break;
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       double level, int permutations, std::uint64_t seed) {
  KsResult res;
  res.level = level;
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  res.statistic = ks_statistic_sorted(sa, sb);

  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  // c(alpha) = sqrt(-ln(alpha/2)/2), e.g. 1.628 at the 1% level.
  const double c_alpha = std::sqrt(-0.5 * std::log(level / 2.0));
  res.critical = c_alpha * std::sqrt((na + nb) / (na * nb));
  res.rejected = res.statistic > res.critical;

  if (permutations > 0) {
    // Random relabelings of the pooled, pre-sorted sample: walk the pooled
    // order once per permutation, assigning each element to sample a with the
    // hypergeometric leftover probability.  O(n) per permutation, no sorting.
    std::vector<double> pooled(sa.size() + sb.size());
    std::merge(sa.begin(), sa.end(), sb.begin(), sb.end(), pooled.begin());
    Rng rng(seed);
    int exceed = 0;
    for (int p = 0; p < permutations; ++p) {
      long rem_a = static_cast<long>(sa.size());
      long rem = static_cast<long>(pooled.size());
      double ca = 0, cb = 0, d = 0;
      for (std::size_t k = 0; k < pooled.size(); ++k, --rem) {
        const bool to_a = rng.below(static_cast<std::uint64_t>(rem)) <
                          static_cast<std::uint64_t>(rem_a);
        if (to_a) {
          ca += 1.0;
          --rem_a;
        } else {
          cb += 1.0;
        }
        if (!std::isfinite(pooled[k])) break;
        if (k + 1 < pooled.size() && pooled[k + 1] == pooled[k]) continue;
        d = std::max(d, std::abs(ca / na - cb / nb));
      }
      if (d >= res.statistic) ++exceed;
    }
    res.p_value = (exceed + 1.0) / (permutations + 1.0);
  }
  return res;
}

}  // namespace stir
