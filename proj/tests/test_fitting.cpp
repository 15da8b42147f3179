#include <doctest.h>

#include <cmath>

#include "stir/feynman_kac.hpp"
#include "stir/fitting.hpp"
#include "stir/harris.hpp"
#include "stir/linalg.hpp"
#include "stir/master_equation.hpp"

using namespace stir;

namespace {

SurvivalCurve synthetic_curve(double prefactor, double rate, double horizon, double dt,
                              long replicas) {
  SurvivalCurve c;
  c.n_replicas = replicas;
  for (double t = 0.0; t <= horizon + 1e-9; t += dt) {
    c.grid.push_back(t);
    const double p = std::min(1.0, prefactor * std::exp(-rate * t));
    c.p_hat.push_back(p);
    c.std_err.push_back(binomial_std_err(p, replicas));
  }
  return c;
}

}  // namespace

TEST_SUITE_BEGIN("fitting");

TEST_CASE("exact exponential input recovers the rate to six significant digits") {
  const auto curve = synthetic_curve(1.0, 0.02, 400.0, 1.0, 100000);
  FitOptions opt;
  opt.bootstrap = 0;
  const RateFit fit = fit_exponential_rate(curve, 10.0, 350.0, opt);
  CHECK(fit.decay_rate == doctest::Approx(0.02).epsilon(1e-6));
  CHECK(fit.r2 > 0.999999);
}

TEST_CASE("prefactor does not bias the slope") {
  const auto curve = synthetic_curve(0.5, 0.02, 400.0, 1.0, 100000);
  FitOptions opt;
  opt.bootstrap = 0;
  const RateFit fit = fit_exponential_rate(curve, 10.0, 350.0, opt);
  CHECK(fit.decay_rate == doctest::Approx(0.02).epsilon(1e-6));
  CHECK(fit.prefactor == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("window errors") {
  auto curve = synthetic_curve(1.0, 0.05, 100.0, 1.0, 1000);
  // kill the tail entirely
  for (std::size_t i = 0; i < curve.grid.size(); ++i)
    if (curve.grid[i] > 50.0) curve.p_hat[i] = 0.0;
  CHECK_THROWS_AS(fit_exponential_rate(curve, 60.0, 90.0, {}), AllZeroTail);
  CHECK_THROWS_AS(fit_exponential_rate(curve, 48.0, 50.5, {}), WindowTooSparse);
}

TEST_CASE("current-model survival rate at N=1 matches the coupled spectral gap") {
  const ModelParams p = ModelParams::current(1, 1.0);
  SurvivalOptions sopt;
  sopt.grid_step = 0.1;
  const SurvivalCurve curve =
      survival_samples(p, TaggedStart::uniform_over_sites(), 30.0, 60000, 2049, sopt);
  FitOptions fopt;
  fopt.seed = 5;
  const RateFit fit = fit_exponential_rate(curve, 5.0, 30.0, fopt);
  const double gap = MasterEquation::coupled(p).spectral_gap();
  CHECK(std::abs(fit.decay_rate - gap) / gap < 0.10);
}

TEST_CASE("density-model survival rate at N=1 matches the killed-walk gap") {
  const ModelParams p = ModelParams::density(1, 0.9, 0.1);
  SurvivalOptions sopt;
  sopt.grid_step = 0.1;
  const SurvivalCurve curve =
      survival_samples(p, TaggedStart::uniform_over_sites(), 25.0, 60000, 4096, sopt);
  FitOptions fopt;
  fopt.seed = 6;
  fopt.bootstrap = 400;
  const RateFit fit = fit_exponential_rate(curve, 4.0, 22.0, fopt);
  // killed walk on 3 sites: gap = smallest eigenvalue of V - L_rw
  Matrix a(3, 3);
  const auto v = default_boundary_potential(1);
  for (int i = 0; i < 3; ++i) {
    if (i > 0) { a(i, i - 1) -= 0.5; a(i, i) += 0.5; }
    if (i < 2) { a(i, i + 1) -= 0.5; a(i, i) += 0.5; }
    a(i, i) += v[i];
  }
  double gap = 1e18;
  for (const auto& l : eigenvalues(a)) gap = std::min(gap, l.real());
  CHECK(fit.ci_lo <= gap);
  CHECK(gap <= fit.ci_hi);
  CHECK(std::abs(fit.decay_rate - gap) / gap < 0.10);
}

TEST_CASE("tv bound scales the curve by the site count") {
  const auto curve = synthetic_curve(1.0, 0.1, 10.0, 1.0, 500);
  const TvBoundCurve bound = tv_bound(curve, 3);
  CHECK(bound.bound[0] == doctest::Approx(7.0));
  for (std::size_t i = 0; i < bound.grid.size(); ++i) {
    CHECK(bound.bound[i] == doctest::Approx(7.0 * curve.p_hat[i]));
    CHECK(bound.std_err[i] == doctest::Approx(7.0 * curve.std_err[i]));
  }
}

TEST_CASE("single-size scaling table is trivially flat") {
  const ModelParams base = ModelParams::current(2, 1.0);
  ScalingOptions opt;
  opt.horizon_factor = 30.0;
  opt.window_lo_factor = 2.0;
  opt.window_hi_factor = 25.0;
  opt.fit.bootstrap = 50;
  const ScalingTable table = scaling_table(base, {2}, 20000, 11, opt);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.flatness == doctest::Approx(1.0));
  CHECK(table.rows[0].normalized == doctest::Approx(table.rows[0].decay_rate * 4.0));
  CHECK(table.rows[0].r2 > 0.9);
}

TEST_SUITE_END();
