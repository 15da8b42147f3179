#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace stir {

// Deterministic solution of dv/dt = (L_rw - V) v with v(x, 0) = 1, where L_rw
// is the rate-1/2-per-direction walk on [-N, N] with outward jumps suppressed
// and V a per-site killing rate.  v(x, t) is the survival probability of the
// killed walk started at x.
struct KilledWalkSolution {
  int half_width = 0;
  double step = 0.0;
  std::vector<double> times;                // 0, step, 2*step, ...
  std::vector<std::vector<double>> values;  // [time][site]

  // Value at (site x, time t); linear interpolation between grid steps.
  double at(int x, double t) const;
};

// Killing rate 1 at the two edge sites, 0 inside.
std::vector<double> default_boundary_potential(int half_width);

// Fourth-order Runge-Kutta in the time step.
KilledWalkSolution feynman_kac_solve(int half_width, double horizon, double step,
                                     std::span<const double> potential);

struct FloorEstimate {
  std::vector<double> per_site;  // P[time at the edges over [0, N^2] >= target]
  std::vector<double> std_err;
  double min_value = 0.0;
  int argmin_site = 0;
  long replicas_per_site = 0;
};

// Monte Carlo estimate of inf_x P_x[boundary occupation time over [0, horizon]
// reaches `target`].  horizon < 0 selects the default N^2.
FloorEstimate hitting_floor_check(int half_width, long replicas_per_site,
                                  std::uint64_t seed, double horizon = -1.0,
                                  double target = 1.0, int threads = 0);

// Exact small-N oracle for the same tail probability: the walk state is
// augmented with the accumulated boundary time, discretised on a dt grid, and
// evolved by operator splitting (jump part exact per step, unit-speed
// transport in the accumulated time at the edge sites).  Returns one value per
// starting site.
std::vector<double> boundary_time_tail_exact(int half_width, double horizon,
                                             double target, double dt);

}  // namespace stir
