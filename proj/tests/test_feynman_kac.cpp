#include <doctest.h>

#include <cmath>

#include "stir/feynman_kac.hpp"
#include "stir/harris.hpp"
#include "stir/linalg.hpp"

using namespace stir;

TEST_SUITE_BEGIN("feynman_kac");

TEST_CASE("survival starts at one and decreases at every site") {
  const auto sol = feynman_kac_solve(3, 10.0, 0.01, default_boundary_potential(3));
  for (int x = -3; x <= 3; ++x) CHECK(sol.at(x, 0.0) == 1.0);
  for (int x = -3; x <= 3; ++x) {
    double prev = 1.0;
    for (double t : {0.5, 1.0, 2.0, 5.0, 10.0}) {
      const double v = sol.at(x, t);
      CHECK(v < prev);
      CHECK(v > 0.0);
      prev = v;
    }
  }
}

TEST_CASE("long-time decay rate is site independent") {
  const auto sol = feynman_kac_solve(2, 60.0, 0.01, default_boundary_potential(2));
  std::vector<double> rates;
  for (int x = -2; x <= 2; ++x)
    rates.push_back(std::log(sol.at(x, 40.0) / sol.at(x, 60.0)) / 20.0);
  for (double r : rates) CHECK(r == doctest::Approx(rates[0]).epsilon(1e-4));
}

TEST_CASE("integrator agrees with the matrix-exponential route") {
  // Independent route: v(t) = exp((L_rw - V) t) 1.
  const int n = 3;
  const int sites = 2 * n + 1;
  const auto potential = default_boundary_potential(n);
  Matrix a(sites, sites);
  for (int i = 0; i < sites; ++i) {
    if (i > 0) { a(i, i - 1) += 0.5; a(i, i) -= 0.5; }
    if (i + 1 < sites) { a(i, i + 1) += 0.5; a(i, i) -= 0.5; }
    a(i, i) -= potential[i];
  }
  const double t = 7.3;
  Matrix at = a;
  at *= t;
  const Matrix e = expm(at);
  std::vector<double> ones(sites, 1.0);
  const auto exact = mat_vec(e, ones);

  const auto sol = feynman_kac_solve(n, 8.0, 0.002, potential);
  for (int i = 0; i < sites; ++i)
    CHECK(sol.at(i - n, t) == doctest::Approx(exact[i]).epsilon(1e-7));
}

TEST_CASE("coupled density discrepancy occupation solves the killed-walk identity") {
  // Small version of the exact identity check: the per-site discrepancy
  // probability of the coupled density process from the all-discrepancy start
  // equals the killed-walk survival started at that site.
  const int n = 3;
  const ModelParams p = ModelParams::density(n, 0.9, 0.1);
  const std::vector<double> times = {2.0, 6.0};
  const long reps = 20000;
  const MarginalTable mc = coupled_diff_marginals(p, times, reps, 927);
  const auto sol = feynman_kac_solve(n, 7.0, 0.003, default_boundary_potential(n));
  for (std::size_t k = 0; k < times.size(); ++k)
    for (int x = -n; x <= n; ++x)
      CHECK(std::abs(mc.value[k][x + n] - sol.at(x, times[k])) <
            3.5 * std::max(mc.std_err[k][x + n], 1e-12));
}

TEST_CASE("boundary occupation floor: positive everywhere, largest at the edge") {
  const FloorEstimate est = hitting_floor_check(4, 2000, 55);
  for (double v : est.per_site) CHECK(v > 0.0);
  const int sites = static_cast<int>(est.per_site.size());
  const double edge = est.per_site[sites - 1];
  for (int i = 1; i + 1 < sites; ++i) CHECK(edge >= est.per_site[i]);
  CHECK(est.min_value > 0.0);
}

TEST_CASE("floor estimate matches the augmented exact solve at N=2") {
  const int n = 2;
  const double horizon = 4.0;  // N^2
  const auto exact = boundary_time_tail_exact(n, horizon, 1.0, 5e-4);
  const auto finer = boundary_time_tail_exact(n, horizon, 1.0, 2.5e-4);
  double disc = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i)
    disc = std::max(disc, std::abs(exact[i] - finer[i]));
  CHECK(disc < 2e-3);  // splitting error under control

  const FloorEstimate est = hitting_floor_check(n, 20000, 808, horizon);
  for (int i = 0; i < 2 * n + 1; ++i)
    CHECK(std::abs(est.per_site[i] - finer[i]) <
          3.5 * std::max(est.std_err[i], 1e-12) + 2e-3);
}

TEST_SUITE_END();
