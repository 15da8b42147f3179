#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "stir/events.hpp"
#include "stir/rng.hpp"

namespace stir {

struct Trajectory {
  std::vector<double> times;            // strictly increasing, starts at 0
  std::vector<Configuration> states;    // state at each time
  std::uint64_t seed = 0;
};

// Event-driven simulation of the single-copy process.  The clock alphabet has
// state-independent rates, so the next firing is an exponential at the total
// rate and the clock is picked by cumulative-rate search; guarded clocks whose
// guard fails leave the state unchanged.
class SingleSampler {
 public:
  explicit SingleSampler(const ModelParams& p)
      : params_(p), alphabet_(transition_alphabet(p)) {
    cumulative_.reserve(alphabet_.size());
    double acc = 0.0;
    for (const auto& e : alphabet_) {
      acc += e.rate;
      cumulative_.push_back(acc);
    }
    total_ = acc;
  }

  double total_rate() const { return total_; }
  const std::vector<RatedEvent>& alphabet() const { return alphabet_; }
  const ModelParams& params() const { return params_; }

  // Advances c from time t0 to `horizon`.  pre(t) runs before each firing is
  // applied (the state still covers [previous event, t)); post(t, event,
  // changed) runs after.  Either returning false stops the run early.
  template <typename Pre, typename Post>
  double run(Configuration& c, double t0, double horizon, Rng& rng, Pre&& pre,
             Post&& post) const {
    double t = t0;
    while (true) {
      t += rng.exponential(total_);
      if (t >= horizon) return horizon;
      if (!pre(t)) return t;
      const double u = rng.uniform() * total_;
      const std::size_t k =
          std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin();
      const EventKind& ev = alphabet_[std::min(k, alphabet_.size() - 1)].kind;
      const bool changed = apply_event(c, ev, params_);
      if (!post(t, ev, changed)) return t;
    }
  }

  template <typename Hook>
  double run(Configuration& c, double t0, double horizon, Rng& rng, Hook&& hook) const {
    return run(c, t0, horizon, rng, [](double) { return true; },
               static_cast<Hook&&>(hook));
  }

 private:
  ModelParams params_;
  std::vector<RatedEvent> alphabet_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

// Full event-resolved trajectory up to `horizon` (state-changing events only).
Trajectory evolve(const Configuration& c0, double horizon, const ModelParams& p,
                  std::uint64_t seed);

// State snapshots at the given ascending times.
std::vector<Configuration> evolve_sampled(const Configuration& c0,
                                          std::span<const double> sample_times,
                                          const ModelParams& p, Rng& rng);

struct ProfileEstimate {
  std::vector<double> mean;      // per site, -N first
  std::vector<double> std_err;   // replica spread / sqrt(R)
  long n_replicas = 0;
};

struct ProfileOptions {
  Configuration initial;     // default: all empty
  int threads = 0;
  double burn_in = -1.0;     // default 10 N^2
  double sample_horizon = -1.0;  // default 10 N^2
};

// Time-and-replica averaged occupation per site after burn-in.  Standard
// errors come from the spread of per-replica time averages.
ProfileEstimate estimate_stationary_profile(const ModelParams& p, long replicas,
                                            std::uint64_t seed,
                                            const ProfileOptions& opt = {});

// Per-site occupation frequencies at fixed times over many replicas, with the
// per-(site, time) counts accumulated exactly.  Used by the oracle-agreement
// checks.
struct MarginalEstimate {
  std::vector<double> times;
  std::vector<std::vector<double>> p_occupied;  // [time][site]
  std::vector<std::vector<double>> std_err;
  long n_replicas = 0;
};

MarginalEstimate estimate_time_marginals(const Configuration& c0,
                                         std::span<const double> times,
                                         const ModelParams& p, long replicas,
                                         std::uint64_t seed, int threads = 0);

}  // namespace stir
