#include "stir/harris.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stir/parallel.hpp"

namespace stir {

std::vector<CoupledClock> coupled_clock_alphabet(const ModelParams& p) {
  std::vector<CoupledClock> out;
  const int n = p.half_width;
  for (int x = -n; x < n; ++x)
    out.push_back({CoupledClock::Kind::Stir, Side::Plus, x, 0, 0.5});
  if (p.kind == ModelKind::CurrentReservoir) {
    const double r = p.boundary_clock_rate();
    for (Side s : {Side::Plus, Side::Minus}) {
      const int e = p.edge_site(s), in = p.inner_site(s);
      out.push_back({CoupledClock::Kind::MoveDiscrepancy, s, e, 0, r});
      out.push_back({CoupledClock::Kind::KillDiscrepancy, s, e, 0, r});
      out.push_back({CoupledClock::Kind::KillDiscrepancy, s, in, 0, r});
      out.push_back({CoupledClock::Kind::JointUpdate, s, e, 0, r});
      out.push_back({CoupledClock::Kind::JointUpdate, s, in, 0, r});
    }
  } else {
    for (Side s : {Side::Plus, Side::Minus}) {
      const int e = p.edge_site(s);
      out.push_back({CoupledClock::Kind::SetBoundary, s, e, 1, p.rho(s)});
      out.push_back({CoupledClock::Kind::SetBoundary, s, e, 0, 1.0 - p.rho(s)});
    }
  }
  return out;
}

MarkEffect apply_mark(CoupledConfiguration& c, const CoupledClock& k) {
  using K = CoupledClock::Kind;
  using E = MarkEffect::Kind;
  switch (k.kind) {
    case K::Stir: {
      const int x = k.site;
      const SiteState a = c.at(x), b = c.at(x + 1);
      if (a != b) {
        c.set(x, b);
        c.set(x + 1, a);
      }
      // Labels trade places even when the states agree: two adjacent
      // discrepancies exchange their labels at a stirring mark.
      return {E::Swapped, x, x + 1};
    }
    case K::MoveDiscrepancy: {
      // Right side: the edge discrepancy and an agreeing-empty inner site turn
      // into (agreeing-full edge, inner discrepancy): both copies gained a
      // particle in the window and the disagreement moved inward.  The left
      // side mirrors with full/empty exchanged.
      const int e = k.site;  // edge site
      const int in = e - sign_of(k.side);
      const SiteState pair_state =
          k.side == Side::Plus ? SiteState::Empty : SiteState::Full;
      const SiteState agreed =
          k.side == Side::Plus ? SiteState::Full : SiteState::Empty;
      if (c.at(e) != SiteState::Diff || c.at(in) != pair_state) return {};
      c.set(e, agreed);
      c.set(in, SiteState::Diff);
      return {E::Moved, e, in};
    }
    case K::KillDiscrepancy: {
      const int s = k.site;
      if (c.at(s) != SiteState::Diff) return {};
      const int n = c.half_width();
      const SiteState agreed =
          k.side == Side::Plus ? SiteState::Full : SiteState::Empty;
      if (k.side == Side::Plus) {
        if (s == n) {
          // Absorbed unless the inner site is an agreeing-empty pair (that
          // situation is the move clock's job).
          if (c.at(n - 1) == SiteState::Empty) return {};
        } else {
          if (c.at(n) != SiteState::Full) return {};
        }
      } else {
        if (s == -n) {
          if (c.at(-n + 1) == SiteState::Full) return {};
        } else {
          if (c.at(-n) != SiteState::Empty) return {};
        }
      }
      c.set(s, agreed);
      return {E::Killed, s, 0};
    }
    case K::JointUpdate: {
      const int s = k.site;
      const int n = c.half_width();
      if (k.side == Side::Plus) {
        // Both copies add a particle: edge site whenever the pair is empty, the
        // inner site only behind an agreeing-full edge.
        if (c.at(s) != SiteState::Empty) return {};
        if (s == n - 1 && c.at(n) != SiteState::Full) return {};
        c.set(s, SiteState::Full);
      } else {
        if (c.at(s) != SiteState::Full) return {};
        if (s == -n + 1 && c.at(-n) != SiteState::Empty) return {};
        c.set(s, SiteState::Empty);
      }
      return {E::ConfigOnly, s, 0};
    }
    case K::SetBoundary: {
      const int s = k.site;
      const SiteState target = k.value ? SiteState::Full : SiteState::Empty;
      const SiteState old = c.at(s);
      if (old == target) return {};
      c.set(s, target);
      return old == SiteState::Diff ? MarkEffect{E::Killed, s, 0}
                                    : MarkEffect{E::ConfigOnly, s, 0};
    }
  }
  return {};
}

MarkStream sample_marks(const ModelParams& p, double horizon, Rng& rng) {
  MarkStream stream;
  stream.horizon = horizon;
  if (horizon <= 0.0) return stream;
  CoupledSampler sampler(p, horizon);
  sampler.sample_window(0.0, horizon, rng, stream.marks);
  for (std::size_t i = 1; i < stream.marks.size(); ++i)
    if (stream.marks[i].time == stream.marks[i - 1].time) ++stream.tie_count;
  return stream;
}

CoupledSampler::CoupledSampler(const ModelParams& p, double window)
    : params_(p), alphabet_(coupled_clock_alphabet(p)) {
  p.validate();
  const double n2 = static_cast<double>(p.half_width) * p.half_width;
  window_ = window > 0 ? window : std::max(1.0, n2);
}

void CoupledSampler::sample_window(double t0, double t1, Rng& rng,
                                   std::vector<Mark>& out) const {
  out.clear();
  for (std::uint32_t k = 0; k < alphabet_.size(); ++k) {
    const double rate = alphabet_[k].rate;
    if (rate <= 0.0) continue;
    double t = t0;
    while (true) {
      t += rng.exponential(rate);
      if (t >= t1) break;
      out.push_back({t, k});
    }
  }
  std::sort(out.begin(), out.end(), [](const Mark& a, const Mark& b) {
    return a.time != b.time ? a.time < b.time : a.clock < b.clock;
  });
}

DiscrepancyLabels DiscrepancyLabels::uniform_permutation(int half_width, Rng& rng) {
  DiscrepancyLabels l;
  const int sites = 2 * half_width + 1;
  l.half_width_ = half_width;
  l.live_ = sites;
  l.position_.assign(sites + 1, kDead);
  l.label_at_.assign(sites, 0);
  // Fisher-Yates over sites; label i sits at the i-th slot of the shuffle.
  std::vector<int> site_of(sites);
  std::iota(site_of.begin(), site_of.end(), 0);
  for (int i = sites - 1; i > 0; --i)
    std::swap(site_of[i], site_of[rng.below(i + 1)]);
  for (int label = 1; label <= sites; ++label) {
    const int s = site_of[label - 1];
    l.position_[label] = s - half_width;
    l.label_at_[s] = label;
  }
  return l;
}

DiscrepancyLabels DiscrepancyLabels::over_discrepancies(const CoupledConfiguration& c,
                                                        Rng& rng) {
  DiscrepancyLabels l;
  const int n = c.half_width();
  l.half_width_ = n;
  l.label_at_.assign(c.num_sites(), 0);
  std::vector<int> diff_sites;
  for (int x = -n; x <= n; ++x)
    if (c.at(x) == SiteState::Diff) diff_sites.push_back(x);
  for (int i = static_cast<int>(diff_sites.size()) - 1; i > 0; --i)
    std::swap(diff_sites[i], diff_sites[rng.below(i + 1)]);
  l.live_ = static_cast<int>(diff_sites.size());
  l.position_.assign(l.live_ + 1, kDead);
  for (int label = 1; label <= l.live_; ++label) {
    l.position_[label] = diff_sites[label - 1];
    l.label_at_[diff_sites[label - 1] + n] = label;
  }
  return l;
}

std::vector<int> DiscrepancyLabels::live_labels() const {
  std::vector<int> out;
  for (int label = 1; label < static_cast<int>(position_.size()); ++label)
    if (position_[label] != kDead) out.push_back(label);
  return out;
}

void DiscrepancyLabels::apply(const MarkEffect& e) {
  switch (e.kind) {
    case MarkEffect::Kind::Swapped: {
      int& la = label_at_[e.a + half_width_];
      int& lb = label_at_[e.b + half_width_];
      std::swap(la, lb);
      if (la) position_[la] = e.a;
      if (lb) position_[lb] = e.b;
      break;
    }
    case MarkEffect::Kind::Moved: {
      int& from = label_at_[e.a + half_width_];
      int& to = label_at_[e.b + half_width_];
      if (to != 0)
        throw Error("label bookkeeping: move target already labelled");
      to = from;
      from = 0;
      if (to) position_[to] = e.b;
      break;
    }
    case MarkEffect::Kind::Killed: {
      int& l = label_at_[e.a + half_width_];
      if (l) {
        position_[l] = kDead;
        --live_;
        l = 0;
      }
      break;
    }
    default:
      break;
  }
}

bool DiscrepancyLabels::consistent_with(const CoupledConfiguration& c) const {
  if (c.half_width() != half_width_) return false;
  int live_seen = 0;
  for (int x = -half_width_; x <= half_width_; ++x) {
    const int l = label_at(x);
    const bool diff = c.at(x) == SiteState::Diff;
    if (diff != (l != 0)) return false;
    if (l != 0) {
      if (position_[l] != x) return false;
      ++live_seen;
    }
  }
  return live_seen == live_;
}

std::vector<CoupledSnapshot> evolve_coupled(const CoupledConfiguration& c0,
                                            double horizon, const ModelParams& p,
                                            Rng& rng,
                                            std::span<const double> sample_times,
                                            bool validate) {
  const int sites = c0.num_sites();
  const bool full_start = c0.diff_count() == sites;
  DiscrepancyLabels labels = full_start
                                 ? DiscrepancyLabels::uniform_permutation(c0.half_width(), rng)
                                 : DiscrepancyLabels::over_discrepancies(c0, rng);
  CoupledConfiguration c = c0;
  CoupledSampler sampler(p);

  std::vector<CoupledSnapshot> out;
  std::size_t next = 0;
  int prev_diff = c.diff_count();
  // Snapshots at a sample time s reflect every mark with time <= s, so marks
  // flush strictly-earlier sample times before being applied.
  auto flush = [&](double t, bool strict) {
    while (next < sample_times.size() &&
           (strict ? sample_times[next] < t : sample_times[next] <= t)) {
      out.push_back({sample_times[next], c, labels.live_labels(), labels});
      ++next;
    }
  };
  sampler.run(
      c, horizon, rng,
      [&](double t) { flush(t, true); return true; },
      [&](double, const CoupledClock&, const MarkEffect& eff) {
        labels.apply(eff);
        if (validate) {
          if (!labels.consistent_with(c))
            throw Error("label/configuration consistency violated");
          const int d = c.diff_count();
          if (d > prev_diff) throw Error("discrepancy count increased");
          prev_diff = d;
          (void)c.decompose();  // order preservation is structural; exercise it
        }
        return true;
      });
  flush(horizon, false);
  return out;
}

namespace {

// Shared driver: follows the tagged discrepancy (and optionally the total
// discrepancy count on a grid) for one replica.  Returns the death time, or
// +infinity if alive at the horizon.
template <typename GridHook>
double run_tagged_replica(const ModelParams& p, const TaggedStart& z0, double horizon,
                          Rng& rng, bool stop_at_death, GridHook&& on_grid,
                          std::span<const double> grid) {
  CoupledConfiguration c = CoupledConfiguration::all_diff(p.half_width);
  TaggedDiscrepancy z;
  z.site = z0.uniform ? rng.uniform_site(p.half_width) : z0.site;
  int diff_count = c.num_sites();
  double death = std::numeric_limits<double>::infinity();

  CoupledSampler sampler(p);
  std::size_t next = 0;
  auto flush = [&](double t, bool strict) {
    while (next < grid.size() && (strict ? grid[next] < t : grid[next] <= t)) {
      on_grid(next, diff_count, z);
      ++next;
    }
  };
  sampler.run(
      c, horizon, rng, [&](double t) { flush(t, true); return true; },
      [&](double t, const CoupledClock&, const MarkEffect& eff) {
        if (eff.kind == MarkEffect::Kind::Killed) --diff_count;
        z.apply(eff);
        if (!z.alive && std::isinf(death)) {
          death = t;
          if (stop_at_death) return false;
        }
        return true;
      });
  flush(horizon, false);
  return death;
}

}  // namespace

SurvivalCurve survival_samples(const ModelParams& p, TaggedStart z0, double horizon,
                               long replicas, std::uint64_t seed,
                               const SurvivalOptions& opt) {
  p.validate();
  const double n2 = static_cast<double>(p.half_width) * p.half_width;
  const double dt = opt.grid_step > 0 ? opt.grid_step : n2 / 50.0;

  std::vector<double> grid;
  for (double t = 0.0; t <= horizon + 0.5 * dt; t += dt)
    grid.push_back(std::min(t, horizon));
  if (grid.back() < horizon) grid.push_back(horizon);

  std::vector<double> deaths(replicas);
  const int threads = opt.threads > 0 ? opt.threads : default_threads();
  std::vector<std::vector<long>> count_acc;
  if (opt.record_counts)
    count_acc.assign(threads, std::vector<long>(grid.size(), 0));
  const long chunk = (replicas + threads - 1) / threads;

  parallel_replicas(threads, threads, [&](long tid) {
    const long lo = tid * chunk, hi = std::min<long>(replicas, lo + chunk);
    for (long r = lo; r < hi; ++r) {
      Rng rng = Rng::from(seed, opt.stream, static_cast<std::uint64_t>(r));
      if (opt.record_counts) {
        auto& acc = count_acc[tid];
        deaths[r] = run_tagged_replica(
            p, z0, horizon, rng, /*stop_at_death=*/false,
            [&](std::size_t k, int diff, const TaggedDiscrepancy&) { acc[k] += diff; },
            grid);
      } else {
        deaths[r] = run_tagged_replica(
            p, z0, horizon, rng, /*stop_at_death=*/true,
            [](std::size_t, int, const TaggedDiscrepancy&) {}, grid);
      }
    }
  });

  SurvivalCurve curve = survival_from_deaths(std::move(deaths), horizon, dt);
  if (opt.record_counts) {
    curve.mean_diff_count.assign(grid.size(), 0.0);
    for (int t = 0; t < threads; ++t)
      for (std::size_t k = 0; k < grid.size(); ++k)
        curve.mean_diff_count[k] += static_cast<double>(count_acc[t][k]);
    for (auto& v : curve.mean_diff_count) v /= static_cast<double>(replicas);
  }
  return curve;
}

namespace {

MarginalTable coupled_marginals_impl(const ModelParams& p, std::span<const double> times,
                                     long replicas, std::uint64_t seed, int threads,
                                     int copy /* 0 = discrepancy indicator */) {
  p.validate();
  const int sites = p.num_sites();
  const std::size_t nt = times.size();
  if (threads <= 0) threads = default_threads();
  std::vector<std::vector<long>> counts(threads, std::vector<long>(nt * sites, 0));
  const long chunk = (replicas + threads - 1) / threads;

  parallel_replicas(threads, threads, [&](long tid) {
    const long lo = tid * chunk, hi = std::min<long>(replicas, lo + chunk);
    auto& acc = counts[tid];
    for (long r = lo; r < hi; ++r) {
      Rng rng = Rng::from(seed, /*stream=*/4, static_cast<std::uint64_t>(r));
      CoupledConfiguration c = CoupledConfiguration::all_diff(p.half_width);
      CoupledSampler sampler(p);
      std::size_t next = 0;
      auto flush = [&](double t, bool strict) {
        while (next < nt && (strict ? times[next] < t : times[next] <= t)) {
          for (int i = 0; i < sites; ++i) {
            const SiteState s = c.cells()[i];
            const bool hit = copy == 0 ? s == SiteState::Diff
                                       : c.copy_at(i - p.half_width, copy) == 1;
            if (hit) ++acc[next * sites + i];
          }
          ++next;
        }
      };
      sampler.run(
          c, times.empty() ? 0.0 : times.back(), rng,
          [&](double t) { flush(t, true); return true; },
          [](double, const CoupledClock&, const MarkEffect&) { return true; });
      flush(times.empty() ? 0.0 : times.back(), false);
    }
  });

  MarginalTable table;
  table.n_replicas = replicas;
  table.times.assign(times.begin(), times.end());
  table.value.assign(nt, std::vector<double>(sites, 0.0));
  table.std_err.assign(nt, std::vector<double>(sites, 0.0));
  for (std::size_t k = 0; k < nt; ++k)
    for (int i = 0; i < sites; ++i) {
      long total = 0;
      for (int t = 0; t < threads; ++t) total += counts[t][k * sites + i];
      const double ph = static_cast<double>(total) / replicas;
      table.value[k][i] = ph;
      table.std_err[k][i] = binomial_std_err(ph, replicas);
    }
  return table;
}

}  // namespace

MarginalTable coupled_diff_marginals(const ModelParams& p, std::span<const double> times,
                                     long replicas, std::uint64_t seed, int threads) {
  return coupled_marginals_impl(p, times, replicas, seed, threads, 0);
}

MarginalTable coupled_copy_marginals(const ModelParams& p, int copy,
                                     std::span<const double> times, long replicas,
                                     std::uint64_t seed, int threads) {
  return coupled_marginals_impl(p, times, replicas, seed, threads, copy);
}

}  // namespace stir
