#include "stir/dynamics.hpp"

#include <cmath>

#include "stir/parallel.hpp"

namespace stir {

Trajectory evolve(const Configuration& c0, double horizon, const ModelParams& p,
                  std::uint64_t seed) {
  p.validate();
  Trajectory out;
  out.seed = seed;
  out.times.push_back(0.0);
  out.states.push_back(c0);
  if (horizon <= 0.0) return out;
  Configuration c = c0;
  Rng rng = Rng::from(seed, /*stream=*/0, /*index=*/0);
  SingleSampler sampler(p);
  sampler.run(c, 0.0, horizon, rng, [&](double t, const EventKind&, bool changed) {
    if (changed) {
      out.times.push_back(t);
      out.states.push_back(c);
    }
    return true;
  });
  return out;
}

std::vector<Configuration> evolve_sampled(const Configuration& c0,
                                          std::span<const double> sample_times,
                                          const ModelParams& p, Rng& rng) {
  SingleSampler sampler(p);
  Configuration c = c0;
  std::vector<Configuration> out;
  out.reserve(sample_times.size());
  double t = 0.0;
  for (double target : sample_times) {
    if (target > t) t = sampler.run(c, t, target, rng, [](double, const EventKind&, bool) {
      return true;
    });
    out.push_back(c);
  }
  return out;
}

ProfileEstimate estimate_stationary_profile(const ModelParams& p, long replicas,
                                            std::uint64_t seed,
                                            const ProfileOptions& opt) {
  p.validate();
  const int sites = p.num_sites();
  const double n2 = static_cast<double>(p.half_width) * p.half_width;
  const double burn = opt.burn_in >= 0 ? opt.burn_in : 10.0 * n2;
  const double span = opt.sample_horizon > 0 ? opt.sample_horizon : 10.0 * n2;
  Configuration init = opt.initial.num_sites() == sites ? opt.initial
                                                        : Configuration::all_empty(p.half_width);

  // Per-replica time averages; reduced sequentially afterwards so the result
  // does not depend on thread scheduling.
  std::vector<std::vector<double>> averages(replicas, std::vector<double>(sites, 0.0));

  parallel_replicas(replicas, opt.threads, [&](long r) {
    Rng rng = Rng::from(seed, /*stream=*/1, static_cast<std::uint64_t>(r));
    SingleSampler sampler(p);
    Configuration c = init;
    sampler.run(c, 0.0, burn, rng, [](double, const EventKind&, bool) { return true; });

    std::vector<double>& acc = averages[r];
    double last = burn;
    // Settle before each event applies: the dwell interval belongs to the
    // state that occupied it.
    auto settle = [&](double t) {
      const double dt = t - last;
      if (dt > 0) {
        const auto& cells = c.cells();
        for (int i = 0; i < sites; ++i)
          if (cells[i]) acc[i] += dt;
        last = t;
      }
    };
    sampler.run(c, burn, burn + span, rng,
                [&](double t) { settle(t); return true; },
                [](double, const EventKind&, bool) { return true; });
    settle(burn + span);
    for (double& a : acc) a /= span;
  });

  ProfileEstimate est;
  est.n_replicas = replicas;
  est.mean.assign(sites, 0.0);
  est.std_err.assign(sites, 0.0);
  for (const auto& a : averages)
    for (int i = 0; i < sites; ++i) est.mean[i] += a[i];
  for (int i = 0; i < sites; ++i) est.mean[i] /= replicas;
  if (replicas > 1) {
    for (const auto& a : averages)
      for (int i = 0; i < sites; ++i) {
        const double d = a[i] - est.mean[i];
        est.std_err[i] += d * d;
      }
    for (int i = 0; i < sites; ++i)
      est.std_err[i] = std::sqrt(est.std_err[i] / (replicas - 1.0) / replicas);
  }
  return est;
}

MarginalEstimate estimate_time_marginals(const Configuration& c0,
                                         std::span<const double> times,
                                         const ModelParams& p, long replicas,
                                         std::uint64_t seed, int threads) {
  p.validate();
  const int sites = p.num_sites();
  const std::size_t nt = times.size();
  if (threads <= 0) threads = default_threads();

  // Integer counts per thread, merged in thread order: exact and
  // scheduling-independent.
  std::vector<std::vector<long>> counts(threads, std::vector<long>(nt * sites, 0));
  const long chunk = (replicas + threads - 1) / threads;

  parallel_replicas(threads, threads, [&](long tid) {
    const long lo = tid * chunk, hi = std::min<long>(replicas, lo + chunk);
    std::vector<long>& acc = counts[tid];
    for (long r = lo; r < hi; ++r) {
      Rng rng = Rng::from(seed, /*stream=*/2, static_cast<std::uint64_t>(r));
      auto snaps = evolve_sampled(c0, times, p, rng);
      for (std::size_t k = 0; k < nt; ++k) {
        const auto& cells = snaps[k].cells();
        for (int i = 0; i < sites; ++i)
          if (cells[i]) ++acc[k * sites + i];
      }
    }
  });

  MarginalEstimate est;
  est.n_replicas = replicas;
  est.times.assign(times.begin(), times.end());
  est.p_occupied.assign(nt, std::vector<double>(sites, 0.0));
  est.std_err.assign(nt, std::vector<double>(sites, 0.0));
  for (std::size_t k = 0; k < nt; ++k)
    for (int i = 0; i < sites; ++i) {
      long total = 0;
      for (int t = 0; t < threads; ++t) total += counts[t][k * sites + i];
      const double ph = static_cast<double>(total) / replicas;
      est.p_occupied[k][i] = ph;
      est.std_err[k][i] = std::sqrt(ph * (1.0 - ph) / replicas);
    }
  return est;
}

}  // namespace stir
