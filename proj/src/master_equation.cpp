#include "stir/master_equation.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "stir/errors.hpp"
#include "stir/events.hpp"
#include "stir/harris.hpp"

namespace stir {

namespace {

std::size_t pow_check(std::size_t base, int exp, std::size_t guard) {
  std::size_t v = 1;
  for (int i = 0; i < exp; ++i) {
    v *= base;
    if (v > guard)
      throw StateSpaceTooLarge("state space " + std::to_string(base) + "^" +
                               std::to_string(exp) + " exceeds guard " +
                               std::to_string(guard));
  }
  return v;
}

int digit_of(SiteState s) {
  switch (s) {
    case SiteState::Empty: return 0;
    case SiteState::Full: return 1;
    default: return 2;
  }
}

SiteState state_of(int digit) {
  switch (digit) {
    case 0: return SiteState::Empty;
    case 1: return SiteState::Full;
    default: return SiteState::Diff;
  }
}

}  // namespace

MasterEquation MasterEquation::single(const ModelParams& p, std::size_t guard) {
  p.validate();
  MasterEquation me;
  me.params_ = p;
  me.coupled_ = false;
  me.dim_ = pow_check(2, p.num_sites(), guard);
  me.gen_ = Matrix(me.dim_, me.dim_);

  const auto alphabet = transition_alphabet(p);
  for (std::size_t s = 0; s < me.dim_; ++s) {
    const Configuration c = me.single_config_of(s);
    for (const auto& ev : alphabet) {
      Configuration next = c;
      if (!apply_event(next, ev.kind, p)) continue;
      const std::size_t t = me.index_of(next);
      me.gen_(s, t) += ev.rate;
      me.gen_(s, s) -= ev.rate;
    }
  }
  return me;
}

MasterEquation MasterEquation::coupled(const ModelParams& p, std::size_t guard) {
  p.validate();
  MasterEquation me;
  me.params_ = p;
  me.coupled_ = true;
  me.dim_ = pow_check(3, p.num_sites(), guard);
  me.gen_ = Matrix(me.dim_, me.dim_);

  const auto alphabet = coupled_clock_alphabet(p);
  for (std::size_t s = 0; s < me.dim_; ++s) {
    const CoupledConfiguration c = me.coupled_config_of(s);
    for (const auto& clock : alphabet) {
      if (clock.rate <= 0.0) continue;
      CoupledConfiguration next = c;
      (void)apply_mark(next, clock);
      if (next == c) continue;
      const std::size_t t = me.index_of(next);
      me.gen_(s, t) += clock.rate;
      me.gen_(s, s) -= clock.rate;
    }
  }
  return me;
}

std::size_t MasterEquation::index_of(const Configuration& c) const {
  std::size_t idx = 0;
  const auto& cells = c.cells();
  for (std::size_t i = cells.size(); i-- > 0;) idx = idx * 2 + cells[i];
  return idx;
}

std::size_t MasterEquation::index_of(const CoupledConfiguration& c) const {
  std::size_t idx = 0;
  const auto& cells = c.cells();
  for (std::size_t i = cells.size(); i-- > 0;) idx = idx * 3 + digit_of(cells[i]);
  return idx;
}

Configuration MasterEquation::single_config_of(std::size_t idx) const {
  Configuration c(params_.half_width, 0);
  for (int x = -params_.half_width; x <= params_.half_width; ++x) {
    c.set(x, static_cast<int>(idx % 2));
    idx /= 2;
  }
  return c;
}

CoupledConfiguration MasterEquation::coupled_config_of(std::size_t idx) const {
  CoupledConfiguration c(params_.half_width, SiteState::Empty);
  for (int x = -params_.half_width; x <= params_.half_width; ++x) {
    c.set(x, state_of(static_cast<int>(idx % 3)));
    idx /= 3;
  }
  return c;
}

std::vector<double> MasterEquation::point_mass(std::size_t idx) const {
  std::vector<double> p(dim_, 0.0);
  p[idx] = 1.0;
  return p;
}

std::vector<double> MasterEquation::point_mass(const Configuration& c) const {
  return point_mass(index_of(c));
}

std::vector<double> MasterEquation::point_mass(const CoupledConfiguration& c) const {
  return point_mass(index_of(c));
}

const std::vector<double>& MasterEquation::stationary() const {
  if (!stationary_.empty()) return stationary_;
  // mu G = 0 with sum(mu) = 1: transpose, overwrite the last equation by the
  // normalisation row.
  Matrix a = gen_.transpose();
  const std::size_t n = dim_;
  for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = 1.0;
  std::vector<double> rhs(n, 0.0);
  rhs[n - 1] = 1.0;
  std::vector<double> mu = solve_linear(std::move(a), std::move(rhs));

  const std::vector<double> residual = vec_mat(mu, gen_);
  double rmax = 0.0, mmin = 0.0;
  for (double r : residual) rmax = std::max(rmax, std::abs(r));
  for (double m : mu) mmin = std::min(mmin, m);
  if (rmax > 1e-10 || mmin < -1e-9)
    throw Error("stationary solve failed: ||mu G||_inf = " + std::to_string(rmax));
  stationary_ = std::move(mu);
  return stationary_;
}

std::vector<std::vector<double>> MasterEquation::evolve_distribution(
    const std::vector<double>& p0, std::span<const double> times) const {
  std::vector<std::vector<double>> out;
  out.reserve(times.size());
  // Uniform grids dominate: cache the one-step propagator and reuse it while
  // the step stays the same up to roundoff.
  Matrix step;
  double step_dt = -1.0;
  std::vector<double> p = p0;
  double t = 0.0;
  for (double target : times) {
    const double dt = target - t;
    if (dt > 1e-14) {
      if (std::abs(dt - step_dt) > 1e-12 * std::max(dt, step_dt)) {
        Matrix g = gen_;
        g *= dt;
        step = expm(g);
        step_dt = dt;
      }
      p = vec_mat(p, step);
      t = target;
    }
    out.push_back(p);
  }
  return out;
}

std::vector<double> MasterEquation::tv_decay(const std::vector<double>& p0,
                                             std::span<const double> times) const {
  const std::vector<double>& mu = stationary();
  std::vector<double> out;
  out.reserve(times.size());
  for (const auto& pt : evolve_distribution(p0, times)) {
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) s += std::abs(pt[i] - mu[i]);
    out.push_back(s);
  }
  return out;
}

double MasterEquation::spectral_gap() const {
  const auto eig = eigenvalues(gen_);
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& l : eig) {
    const double decay = -l.real();
    if (decay > 1e-9 && decay < gap) gap = decay;
  }
  return gap;
}

std::vector<double> MasterEquation::site_marginals(const std::vector<double>& dist) const {
  const int sites = params_.num_sites();
  std::vector<double> m(sites, 0.0);
  for (std::size_t s = 0; s < dim_; ++s) {
    if (dist[s] == 0.0) continue;
    std::size_t idx = s;
    for (int i = 0; i < sites; ++i) {
      if (idx % 2) m[i] += dist[s];
      idx /= 2;
    }
  }
  return m;
}

std::vector<double> MasterEquation::copy_site_marginals(const std::vector<double>& dist,
                                                        int copy) const {
  const int sites = params_.num_sites();
  std::vector<double> m(sites, 0.0);
  for (std::size_t s = 0; s < dim_; ++s) {
    if (dist[s] == 0.0) continue;
    std::size_t idx = s;
    for (int i = 0; i < sites; ++i) {
      const int digit = static_cast<int>(idx % 3);
      const bool occupied = digit == 1 || (digit == 2 && copy == 1);
      if (occupied) m[i] += dist[s];
      idx /= 3;
    }
  }
  return m;
}

std::vector<double> MasterEquation::diff_site_marginals(const std::vector<double>& dist) const {
  const int sites = params_.num_sites();
  std::vector<double> m(sites, 0.0);
  for (std::size_t s = 0; s < dim_; ++s) {
    if (dist[s] == 0.0) continue;
    std::size_t idx = s;
    for (int i = 0; i < sites; ++i) {
      if (idx % 3 == 2) m[i] += dist[s];
      idx /= 3;
    }
  }
  return m;
}

}  // namespace stir
