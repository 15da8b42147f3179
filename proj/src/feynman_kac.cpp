#include "stir/feynman_kac.hpp"

#include <algorithm>
#include <cmath>

#include "stir/errors.hpp"
#include "stir/linalg.hpp"
#include "stir/parallel.hpp"
#include "stir/rng.hpp"

namespace stir {

double KilledWalkSolution::at(int x, double t) const {
  const int i = x + half_width;
  if (t <= 0.0) return values.front()[i];
  const double pos = t / step;
  const std::size_t k = static_cast<std::size_t>(pos);
  if (k + 1 >= times.size()) return values.back()[i];
  const double frac = pos - static_cast<double>(k);
  return (1.0 - frac) * values[k][i] + frac * values[k + 1][i];
}

std::vector<double> default_boundary_potential(int half_width) {
  std::vector<double> v(2 * half_width + 1, 0.0);
  v.front() = 1.0;
  v.back() = 1.0;
  return v;
}

namespace {

// (L_rw - V) u
void apply_operator(std::span<const double> u, std::span<const double> potential,
                    std::span<double> out) {
  const std::size_t n = u.size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = -potential[i] * u[i];
    if (i > 0) s += 0.5 * (u[i - 1] - u[i]);
    if (i + 1 < n) s += 0.5 * (u[i + 1] - u[i]);
    out[i] = s;
  }
}

}  // namespace

KilledWalkSolution feynman_kac_solve(int half_width, double horizon, double step,
                                     std::span<const double> potential) {
  const std::size_t sites = 2 * half_width + 1;
  if (potential.size() != sites) throw ValidationError("potential size != 2N+1");
  if (step <= 0.0 || horizon < 0.0) throw ValidationError("need step > 0, horizon >= 0");

  KilledWalkSolution sol;
  sol.half_width = half_width;
  sol.step = step;
  std::vector<double> u(sites, 1.0);
  std::vector<double> k1(sites), k2(sites), k3(sites), k4(sites), tmp(sites);

  const long steps = static_cast<long>(std::ceil(horizon / step - 1e-12));
  sol.times.push_back(0.0);
  sol.values.push_back(u);
  for (long s = 1; s <= steps; ++s) {
    apply_operator(u, potential, k1);
    for (std::size_t i = 0; i < sites; ++i) tmp[i] = u[i] + 0.5 * step * k1[i];
    apply_operator(tmp, potential, k2);
    for (std::size_t i = 0; i < sites; ++i) tmp[i] = u[i] + 0.5 * step * k2[i];
    apply_operator(tmp, potential, k3);
    for (std::size_t i = 0; i < sites; ++i) tmp[i] = u[i] + step * k3[i];
    apply_operator(tmp, potential, k4);
    for (std::size_t i = 0; i < sites; ++i)
      u[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    sol.times.push_back(s * step);
    sol.values.push_back(u);
  }
  return sol;
}

FloorEstimate hitting_floor_check(int half_width, long replicas_per_site,
                                  std::uint64_t seed, double horizon, double target,
                                  int threads) {
  const int sites = 2 * half_width + 1;
  if (horizon < 0.0) horizon = static_cast<double>(half_width) * half_width;

  std::vector<long> hits(sites, 0);
  parallel_replicas(sites, threads, [&](long site_idx) {
    const int x0 = static_cast<int>(site_idx) - half_width;
    long h = 0;
    for (long r = 0; r < replicas_per_site; ++r) {
      Rng rng = Rng::from(seed, /*stream=*/100 + site_idx, static_cast<std::uint64_t>(r));
      int x = x0;
      double t = 0.0, boundary_time = 0.0;
      while (t < horizon) {
        const bool at_edge = std::abs(x) == half_width;
        const double rate = at_edge ? 0.5 : 1.0;  // inward only at the edges
        double dwell = rng.exponential(rate);
        if (t + dwell > horizon) dwell = horizon - t;
        if (at_edge) {
          boundary_time += dwell;
          if (boundary_time >= target) {
            ++h;
            break;
          }
        }
        t += dwell;
        if (t >= horizon) break;
        if (x == half_width) x -= 1;
        else if (x == -half_width) x += 1;
        else x += rng.bernoulli(0.5) ? 1 : -1;
      }
    }
    hits[site_idx] = h;
  });

  FloorEstimate est;
  est.replicas_per_site = replicas_per_site;
  est.per_site.resize(sites);
  est.std_err.resize(sites);
  est.min_value = 2.0;
  for (int i = 0; i < sites; ++i) {
    const double p = static_cast<double>(hits[i]) / replicas_per_site;
    est.per_site[i] = p;
    est.std_err[i] = std::sqrt(std::max(0.0, p * (1.0 - p)) / replicas_per_site);
    if (p < est.min_value) {
      est.min_value = p;
      est.argmin_site = i - half_width;
    }
  }
  return est;
}

std::vector<double> boundary_time_tail_exact(int half_width, double horizon,
                                             double target, double dt) {
  const int sites = 2 * half_width + 1;
  const long slices = static_cast<long>(std::ceil(target / dt - 1e-12));
  const long steps = static_cast<long>(std::llround(horizon / dt));

  // One exact jump propagator per dt; V = 0 here, the killing dimension is the
  // accumulated-time transport.
  Matrix l_rw(sites, sites);
  for (int i = 0; i < sites; ++i) {
    if (i > 0) {
      l_rw(i, i - 1) += 0.5;
      l_rw(i, i) -= 0.5;
    }
    if (i + 1 < sites) {
      l_rw(i, i + 1) += 0.5;
      l_rw(i, i) -= 0.5;
    }
  }
  Matrix scaled = l_rw;
  scaled *= dt;
  const Matrix prop = expm(scaled);  // row-stochastic: column j receives from i

  std::vector<double> out(sites, 0.0);
  for (int start = 0; start < sites; ++start) {
    // mass[m][x], m = accumulated boundary time slice; slice `slices` absorbs.
    std::vector<std::vector<double>> mass(slices, std::vector<double>(sites, 0.0));
    mass[0][start] = 1.0;
    double absorbed = 0.0;
    long hi_m = 0;  // highest occupied slice; grows by at most one per step
    for (long s = 0; s < steps; ++s) {
      for (long m = 0; m <= hi_m; ++m) mass[m] = vec_mat(mass[m], prop);
      // Transport at the edges: one slice per step (dt of boundary residence).
      for (long m = hi_m; m >= 0; --m) {
        for (int x : {0, sites - 1}) {
          const double v = mass[m][x];
          if (v == 0.0) continue;
          mass[m][x] = 0.0;
          if (m + 1 == slices) absorbed += v;
          else mass[m + 1][x] += v;
        }
      }
      hi_m = std::min(hi_m + 1, slices - 1);
    }
    out[start] = absorbed;
  }
  return out;
}

}  // namespace stir
