#include <doctest.h>

#include <cmath>

#include "stir/events.hpp"
#include "stir/harris.hpp"
#include "stir/master_equation.hpp"
#include "stir/rng.hpp"

using namespace stir;

TEST_SUITE_BEGIN("master_equation");

TEST_CASE("generator rows sum to zero with nonnegative off-diagonals") {
  for (const ModelParams& p :
       {ModelParams::density(2, 0.7, 0.2), ModelParams::current(2, 1.3)}) {
    for (bool coupled : {false, true}) {
      const MasterEquation me =
          coupled ? MasterEquation::coupled(p) : MasterEquation::single(p);
      for (std::size_t i = 0; i < me.dim(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < me.dim(); ++j) {
          row += me.generator()(i, j);
          if (i != j) CHECK(me.generator()(i, j) >= 0.0);
        }
        CHECK(row == doctest::Approx(0.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("state space guard") {
  CHECK_THROWS_AS(MasterEquation::single(ModelParams::current(8, 1.0)),
                  StateSpaceTooLarge);
  CHECK_THROWS_AS(MasterEquation::coupled(ModelParams::current(5, 1.0)),
                  StateSpaceTooLarge);
}

TEST_CASE("index round trips") {
  const ModelParams p = ModelParams::current(2, 1.0);
  const MasterEquation single = MasterEquation::single(p);
  for (std::size_t i = 0; i < single.dim(); ++i)
    CHECK(single.index_of(single.single_config_of(i)) == i);
  const MasterEquation coupled = MasterEquation::coupled(ModelParams::current(1, 1.0));
  for (std::size_t i = 0; i < coupled.dim(); ++i)
    CHECK(coupled.index_of(coupled.coupled_config_of(i)) == i);
}

TEST_CASE("equal reservoir densities make the product Bernoulli measure stationary") {
  const double rho = 0.35;
  const ModelParams p = ModelParams::density(2, rho, rho);
  const MasterEquation me = MasterEquation::single(p);
  // direct check: the product weights annihilate the adjoint
  std::vector<double> prod(me.dim());
  for (std::size_t s = 0; s < me.dim(); ++s) {
    const Configuration c = me.single_config_of(s);
    double w = 1.0;
    for (int x = -2; x <= 2; ++x) w *= c.at(x) ? rho : 1.0 - rho;
    prod[s] = w;
  }
  const auto residual = vec_mat(prod, me.generator());
  for (double r : residual) CHECK(std::abs(r) < 1e-12);
  // and the solver recovers the same vector
  const auto& mu = me.stationary();
  for (std::size_t s = 0; s < me.dim(); ++s)
    CHECK(mu[s] == doctest::Approx(prod[s]).epsilon(1e-8));
}

TEST_CASE("current model stationary vector has the reflect-flip symmetry") {
  const ModelParams p = ModelParams::current(1, 1.7);
  const MasterEquation me = MasterEquation::single(p);
  const auto& mu = me.stationary();
  for (std::size_t s = 0; s < me.dim(); ++s) {
    const std::size_t t = me.index_of(reflect_flip(me.single_config_of(s)));
    CHECK(mu[s] == doctest::Approx(mu[t]).epsilon(1e-9));
  }
  // generator conjugated by the reflect-flip permutation is itself
  for (std::size_t s = 0; s < me.dim(); ++s) {
    const std::size_t rs = me.index_of(reflect_flip(me.single_config_of(s)));
    for (std::size_t t = 0; t < me.dim(); ++t) {
      const std::size_t rt = me.index_of(reflect_flip(me.single_config_of(t)));
      CHECK(me.generator()(s, t) == doctest::Approx(me.generator()(rs, rt)));
    }
  }
}

TEST_CASE("sampled simulator transitions appear in the matrix with matching rates") {
  Rng rng(99);
  for (const ModelParams& p :
       {ModelParams::density(2, 0.8, 0.3), ModelParams::current(2, 0.9)}) {
    const MasterEquation me = MasterEquation::single(p);
    const auto alphabet = transition_alphabet(p);
    for (int rep = 0; rep < 40; ++rep) {
      Configuration c(p.half_width, 0);
      for (int x = -p.half_width; x <= p.half_width; ++x) c.set(x, rng.bernoulli(0.5));
      const std::size_t row = me.index_of(c);
      // rate(c -> c') accumulated over the alphabet must equal the matrix entry
      std::vector<double> expected(me.dim(), 0.0);
      for (const auto& ev : alphabet) {
        Configuration next = c;
        if (apply_event(next, ev.kind, p)) expected[me.index_of(next)] += ev.rate;
      }
      for (std::size_t col = 0; col < me.dim(); ++col) {
        if (col == row) continue;
        CHECK(me.generator()(row, col) == doctest::Approx(expected[col]));
      }
    }
  }
}

TEST_CASE("coupled generator marginals reproduce the single-copy generator") {
  // For functions of one copy the coupled chain must act exactly as the
  // single-copy generator: evolve a coupled point mass and compare copy
  // marginals with the single-copy evolution of the matching start.
  for (const ModelParams& p :
       {ModelParams::current(1, 1.2), ModelParams::density(1, 0.8, 0.15)}) {
    const MasterEquation mc = MasterEquation::coupled(p);
    const MasterEquation ms = MasterEquation::single(p);
    const CoupledConfiguration start = CoupledConfiguration::all_diff(p.half_width);
    const auto [eta1, eta2] = start.decompose();
    const std::vector<double> times = {0.3, 1.0, 4.0, 17.0};
    const auto coupled_dist = mc.evolve_distribution(mc.point_mass(start), times);
    const auto up_dist = ms.evolve_distribution(ms.point_mass(eta1), times);
    const auto low_dist = ms.evolve_distribution(ms.point_mass(eta2), times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const auto m1 = mc.copy_site_marginals(coupled_dist[k], 1);
      const auto m2 = mc.copy_site_marginals(coupled_dist[k], 2);
      const auto s1 = ms.site_marginals(up_dist[k]);
      const auto s2 = ms.site_marginals(low_dist[k]);
      for (int i = 0; i < p.num_sites(); ++i) {
        CHECK(m1[i] == doctest::Approx(s1[i]).epsilon(1e-9));
        CHECK(m2[i] == doctest::Approx(s2[i]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("tv decay is monotone down to zero and the gap is positive") {
  const ModelParams p = ModelParams::current(1, 1.0);
  const MasterEquation me = MasterEquation::single(p);
  const std::vector<double> grid = {0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
  const auto tv = me.tv_decay(me.point_mass(Configuration::all_empty(1)), grid);
  for (std::size_t i = 1; i < tv.size(); ++i) CHECK(tv[i] <= tv[i - 1] + 1e-12);
  CHECK(tv.back() < 1e-3);
  const double gap = me.spectral_gap();
  CHECK(gap > 0.0);
  // long-time TV decay rate matches the spectral gap
  const double rate = std::log(tv[4] / tv[6]) / (grid[6] - grid[4]);
  CHECK(rate == doctest::Approx(gap).epsilon(0.05));
}

TEST_SUITE_END();
