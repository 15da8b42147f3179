#include <doctest.h>

#include <cmath>

#include "stir/dynamics.hpp"
#include "stir/harris.hpp"
#include "stir/master_equation.hpp"

using namespace stir;

namespace {

CoupledClock find_clock(const ModelParams& p, CoupledClock::Kind kind, Side side,
                        int site, int value = 0) {
  for (const auto& c : coupled_clock_alphabet(p))
    if (c.kind == kind && c.side == side && c.site == site &&
        (kind != CoupledClock::Kind::SetBoundary || c.value == value))
      return c;
  REQUIRE(false);
  return {};
}

}  // namespace

TEST_SUITE_BEGIN("harris");

TEST_CASE("clock alphabet intensities") {
  const ModelParams p = ModelParams::current(2, 1.0);
  const auto alphabet = coupled_clock_alphabet(p);
  int stir = 0, boundary = 0;
  for (const auto& c : alphabet) {
    if (c.kind == CoupledClock::Kind::Stir) {
      ++stir;
      CHECK(c.rate == 0.5);
    } else {
      ++boundary;
      CHECK(c.rate == doctest::Approx(0.25));  // epsilon j / 2 = j/(2N)
    }
  }
  CHECK(stir == 4);
  CHECK(boundary == 10);

  const ModelParams pd = ModelParams::density(2, 0.8, 0.3);
  double plus_total = 0.0;
  for (const auto& c : coupled_clock_alphabet(pd))
    if (c.kind == CoupledClock::Kind::SetBoundary && c.side == Side::Plus)
      plus_total += c.rate;
  CHECK(plus_total == doctest::Approx(1.0));
}

TEST_CASE("boundary mark rules on the right window") {
  const ModelParams p = ModelParams::current(2, 1.0);
  // move: discrepancy at the edge relocates inward over an agreeing-empty pair
  CoupledConfiguration c = CoupledConfiguration::from_string("1100x");
  auto eff = apply_mark(c, find_clock(p, CoupledClock::Kind::MoveDiscrepancy, Side::Plus, 2));
  CHECK(c.str() == "110x1");
  CHECK(eff.kind == MarkEffect::Kind::Moved);
  CHECK(eff.a == 2);
  CHECK(eff.b == 1);

  // kill at the edge requires the inner pair not agreeing-empty
  c = CoupledConfiguration::from_string("1101x");
  eff = apply_mark(c, find_clock(p, CoupledClock::Kind::KillDiscrepancy, Side::Plus, 2));
  CHECK(c.str() == "11011");
  CHECK(eff.kind == MarkEffect::Kind::Killed);

  c = CoupledConfiguration::from_string("1100x");
  eff = apply_mark(c, find_clock(p, CoupledClock::Kind::KillDiscrepancy, Side::Plus, 2));
  CHECK(c.str() == "1100x");  // guard fails, mark wasted
  CHECK(eff.kind == MarkEffect::Kind::None);

  // kill one site inward requires an agreeing-full edge
  c = CoupledConfiguration::from_string("110x1");
  eff = apply_mark(c, find_clock(p, CoupledClock::Kind::KillDiscrepancy, Side::Plus, 1));
  CHECK(c.str() == "11011");
  CHECK(eff.kind == MarkEffect::Kind::Killed);
  c = CoupledConfiguration::from_string("110x0");
  eff = apply_mark(c, find_clock(p, CoupledClock::Kind::KillDiscrepancy, Side::Plus, 1));
  CHECK(eff.kind == MarkEffect::Kind::None);

  // joint updates never touch discrepancies
  c = CoupledConfiguration::from_string("11000");
  eff = apply_mark(c, find_clock(p, CoupledClock::Kind::JointUpdate, Side::Plus, 2));
  CHECK(c.str() == "11001");
  CHECK(eff.kind == MarkEffect::Kind::ConfigOnly);
  c = CoupledConfiguration::from_string("11001");
  eff = apply_mark(c, find_clock(p, CoupledClock::Kind::JointUpdate, Side::Plus, 1));
  CHECK(c.str() == "11011");
  c = CoupledConfiguration::from_string("11000");
  eff = apply_mark(c, find_clock(p, CoupledClock::Kind::JointUpdate, Side::Plus, 1));
  CHECK(eff.kind == MarkEffect::Kind::None);
}

TEST_CASE("boundary mark rules mirror on the left window") {
  const ModelParams p = ModelParams::current(2, 1.0);
  CoupledConfiguration c = CoupledConfiguration::from_string("x1100");
  auto eff = apply_mark(c, find_clock(p, CoupledClock::Kind::MoveDiscrepancy, Side::Minus, -2));
  CHECK(c.str() == "0x100");
  CHECK(eff.kind == MarkEffect::Kind::Moved);

  c = CoupledConfiguration::from_string("x0100");
  eff = apply_mark(c, find_clock(p, CoupledClock::Kind::KillDiscrepancy, Side::Minus, -2));
  CHECK(c.str() == "00100");
  c = CoupledConfiguration::from_string("0x100");
  eff = apply_mark(c, find_clock(p, CoupledClock::Kind::KillDiscrepancy, Side::Minus, -1));
  CHECK(c.str() == "00100");
  c = CoupledConfiguration::from_string("1x100");
  eff = apply_mark(c, find_clock(p, CoupledClock::Kind::KillDiscrepancy, Side::Minus, -1));
  CHECK(eff.kind == MarkEffect::Kind::None);

  c = CoupledConfiguration::from_string("10000");
  eff = apply_mark(c, find_clock(p, CoupledClock::Kind::JointUpdate, Side::Minus, -2));
  CHECK(c.str() == "00000");
  c = CoupledConfiguration::from_string("01000");
  eff = apply_mark(c, find_clock(p, CoupledClock::Kind::JointUpdate, Side::Minus, -1));
  CHECK(c.str() == "00000");
}

TEST_CASE("density set marks kill boundary discrepancies at unit total rate") {
  const ModelParams p = ModelParams::density(1, 0.75, 0.25);
  CoupledConfiguration c = CoupledConfiguration::from_string("xxx");
  auto eff = apply_mark(c, find_clock(p, CoupledClock::Kind::SetBoundary, Side::Plus, 1, 1));
  CHECK(c.str() == "xx1");
  CHECK(eff.kind == MarkEffect::Kind::Killed);
  eff = apply_mark(c, find_clock(p, CoupledClock::Kind::SetBoundary, Side::Minus, -1, 0));
  CHECK(c.str() == "0x1");
  CHECK(eff.kind == MarkEffect::Kind::Killed);
  // agreeing site: state may change but no discrepancy is involved
  eff = apply_mark(c, find_clock(p, CoupledClock::Kind::SetBoundary, Side::Minus, -1, 1));
  CHECK(c.str() == "1x1");
  CHECK(eff.kind == MarkEffect::Kind::ConfigOnly);
  eff = apply_mark(c, find_clock(p, CoupledClock::Kind::SetBoundary, Side::Minus, -1, 1));
  CHECK(eff.kind == MarkEffect::Kind::None);
}

TEST_CASE("mark streams are sorted independent Poisson clocks") {
  const ModelParams p = ModelParams::current(2, 1.0);
  Rng rng(31);
  CHECK(sample_marks(p, 0.0, rng).marks.empty());

  const double horizon = 5.0;
  const auto alphabet = coupled_clock_alphabet(p);
  const int draws = 10000;
  double stir_total = 0.0, boundary_total = 0.0;
  for (int d = 0; d < draws; ++d) {
    const MarkStream stream = sample_marks(p, horizon, rng);
    double last = -1.0;
    for (const auto& m : stream.marks) {
      CHECK(m.time >= last);
      last = m.time;
      CHECK(m.time < horizon);
      if (alphabet[m.clock].kind == CoupledClock::Kind::Stir) stir_total += 1.0;
      else boundary_total += 1.0;
    }
    CHECK(stream.tie_count == 0);
  }
  // stirring: 2N bonds at rate 1/2 -> mean T*N per draw
  const double stir_mean = stir_total / draws;
  const double stir_expect = horizon * 2.0;  // N = 2
  CHECK(std::abs(stir_mean - stir_expect) <
        3.0 * std::sqrt(stir_expect / draws));
  // each boundary clock: mean T*j/(2N); ten clocks
  const double bdry_mean = boundary_total / draws;
  const double bdry_expect = horizon * 10.0 * 0.25;
  CHECK(std::abs(bdry_mean - bdry_expect) <
        3.0 * std::sqrt(bdry_expect / draws));
}

TEST_CASE("coupled evolution keeps labels consistent and counts monotone") {
  Rng seeder(8);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 1 + static_cast<int>(seeder.below(3));
    const bool density = seeder.bernoulli(0.5);
    const ModelParams p = density
                              ? ModelParams::density(n, 0.6 + 0.3 * seeder.uniform(),
                                                     0.3 * seeder.uniform())
                              : ModelParams::current(n, 0.5 + 2.0 * seeder.uniform());
    Rng rng(1000 + rep);
    const std::vector<double> samples = {0.5, 1.5, 4.0, 9.0};
    const auto snaps = evolve_coupled(CoupledConfiguration::all_diff(n), 9.0, p, rng,
                                      samples, /*validate=*/true);
    REQUIRE(snaps.size() == samples.size());
    int prev = 2 * n + 1;
    for (const auto& s : snaps) {
      CHECK(s.labels.consistent_with(s.config));
      const int d = s.config.diff_count();
      CHECK(d <= prev);
      prev = d;
      CHECK(static_cast<int>(s.live_labels.size()) == d);
      const auto [upper, lower] = s.config.decompose();
      for (int x = -n; x <= n; ++x) CHECK(upper.at(x) >= lower.at(x));
    }
  }
}

TEST_CASE("time zero snapshot has every site disagreeing and all labels alive") {
  const ModelParams p = ModelParams::current(2, 1.0);
  Rng rng(5);
  const std::vector<double> samples = {0.0};
  const auto snaps =
      evolve_coupled(CoupledConfiguration::all_diff(2), 3.0, p, rng, samples);
  REQUIRE(snaps.size() == 1);
  CHECK(snaps[0].config.str() == "xxxxx");
  CHECK(snaps[0].live_labels.size() == 5);
}

TEST_CASE("silent boundary clocks freeze the discrepancy count") {
  const ModelParams p = ModelParams::current(2, 1e-30);
  Rng rng(17);
  const std::vector<double> samples = {2.0, 10.0, 30.0};
  const auto snaps =
      evolve_coupled(CoupledConfiguration::all_diff(2), 30.0, p, rng, samples);
  for (const auto& s : snaps) CHECK(s.config.diff_count() == 5);
}

TEST_CASE("copy marginals match the exact law at N=1") {
  const ModelParams p = ModelParams::current(1, 1.0);
  const std::vector<double> times = {1.0, 5.0, 25.0};
  const long reps = 20000;
  const MarginalTable mc = coupled_copy_marginals(p, 1, times, reps, 314);
  const MasterEquation me = MasterEquation::single(p);
  // copy 1 of the all-discrepancy start is the all-ones configuration
  const auto exact = me.evolve_distribution(me.point_mass(Configuration::all_full(1)), times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto marg = me.site_marginals(exact[k]);
    for (int i = 0; i < p.num_sites(); ++i)
      CHECK(std::abs(mc.value[k][i] - marg[i]) <
            3.5 * std::max(mc.std_err[k][i], 1e-12));
  }
}

TEST_CASE("copy marginals match single-copy Monte Carlo at N=3") {
  const ModelParams p = ModelParams::current(3, 1.0);
  const std::vector<double> times = {2.0, 8.0};
  const long reps = 15000;
  const MarginalTable coupled = coupled_copy_marginals(p, 2, times, reps, 2718);
  const MarginalEstimate single =
      estimate_time_marginals(Configuration::all_empty(3), times, p, reps, 161803);
  for (std::size_t k = 0; k < times.size(); ++k)
    for (int i = 0; i < p.num_sites(); ++i) {
      const double se = std::sqrt(coupled.std_err[k][i] * coupled.std_err[k][i] +
                                  single.std_err[k][i] * single.std_err[k][i]);
      CHECK(std::abs(coupled.value[k][i] - single.p_occupied[k][i]) <
            3.5 * std::max(se, 1e-12));
    }
}

TEST_CASE("survival curve starts at one, decreases, and is exchangeable") {
  const ModelParams p = ModelParams::current(2, 1.0);
  SurvivalOptions opt;
  opt.record_counts = true;
  opt.grid_step = 1.0;
  const long reps = 20000;
  const SurvivalCurve curve =
      survival_samples(p, TaggedStart::uniform_over_sites(), 40.0, reps, 77, opt);
  CHECK(curve.p_hat[0] == 1.0);
  for (std::size_t i = 1; i < curve.p_hat.size(); ++i)
    CHECK(curve.p_hat[i] <= curve.p_hat[i - 1]);
  REQUIRE(curve.mean_diff_count.size() == curve.grid.size());
  // mean discrepancy count / (2N+1) estimates the same survival probability
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    const double via_count = curve.mean_diff_count[i] / 5.0;
    const double se = std::max(curve.std_err[i], 1e-4);
    CHECK(std::abs(via_count - curve.p_hat[i]) < 4.0 * se);
  }
}

TEST_CASE("fixed tagged start dies only at the boundary windows") {
  const ModelParams p = ModelParams::current(2, 2.0);
  SurvivalOptions opt;
  opt.grid_step = 1.0;
  const SurvivalCurve curve =
      survival_samples(p, TaggedStart::fixed(0), 20.0, 5000, 13, opt);
  CHECK(curve.p_hat[0] == 1.0);
  CHECK(curve.p_hat.back() < 1.0);
}

TEST_CASE("density coupling kills boundary discrepancies at unit hazard") {
  // Accumulated boundary residence vs deaths while at +-N: hazard = 1.
  const ModelParams p = ModelParams::density(2, 0.8, 0.2);
  Rng rng(404);
  double boundary_time = 0.0;
  long boundary_deaths = 0;
  const long reps = 4000;
  for (long r = 0; r < reps; ++r) {
    CoupledConfiguration c = CoupledConfiguration::all_diff(2);
    TaggedDiscrepancy z;
    z.site = rng.uniform_site(2);
    CoupledSampler sampler(p);
    double last = 0.0;
    sampler.run(
        c, 60.0, rng,
        [&](double t) {
          if (z.alive && std::abs(z.site) == 2) boundary_time += t - last;
          last = t;
          return true;
        },
        [&](double t, const CoupledClock&, const MarkEffect& eff) {
          (void)t;
          const bool was_boundary = z.alive && std::abs(z.site) == 2;
          z.apply(eff);
          if (!z.alive) {
            if (was_boundary) ++boundary_deaths;
            return false;
          }
          return true;
        });
  }
  const double hazard = boundary_deaths / boundary_time;
  const double se = std::sqrt(static_cast<double>(boundary_deaths)) / boundary_time;
  CHECK(std::abs(hazard - 1.0) < 3.5 * se);
}

TEST_SUITE_END();
