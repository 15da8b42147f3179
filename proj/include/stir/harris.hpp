#pragma once

#include <climits>
#include <cstdint>
#include <span>
#include <vector>

#include "stir/config.hpp"
#include "stir/params.hpp"
#include "stir/rng.hpp"
#include "stir/stats.hpp"

namespace stir {

// One Poisson clock of the coupled graphical construction.
//
// Current-reservoir coupling, per boundary side (offset 0 = edge site +/-N,
// offset 1 = one site inward), every clock at rate j/(2N):
//   MoveDiscrepancy : the edge discrepancy relocates one site inward, the
//                     vacated edge becoming an agreeing pair.
//   KillDiscrepancy : the discrepancy at the clock's site is absorbed into an
//                     agreeing pair.
//   JointUpdate     : both copies perform the same boundary update at the
//                     clock's site (no discrepancy involved).
// Density-reservoir coupling: SetBoundary writes an agreeing value to the
// edge site at rate rho (value 1) or 1-rho (value 0); a discrepancy sitting
// there dies.
struct CoupledClock {
  enum class Kind : std::uint8_t {
    Stir,
    MoveDiscrepancy,
    KillDiscrepancy,
    JointUpdate,
    SetBoundary,
  };

  Kind kind = Kind::Stir;
  Side side = Side::Plus;
  int site = 0;    // Stir: left site of the bond; boundary clocks: target site
  int value = 0;   // SetBoundary only
  double rate = 0.0;
};

// Canonically ordered clock list; this order breaks probability-zero time ties.
std::vector<CoupledClock> coupled_clock_alphabet(const ModelParams& p);

// What a mark did, for label bookkeeping.
struct MarkEffect {
  enum class Kind : std::uint8_t {
    None,        // guard failed
    Swapped,     // bond contents exchanged (labels at a and b trade places)
    Moved,       // discrepancy moved from a to b
    Killed,      // discrepancy at a died
    ConfigOnly,  // state changed, no discrepancy involved
  };
  Kind kind = Kind::None;
  int a = 0;
  int b = 0;
};

// Applies one mark in place, returning its effect.
MarkEffect apply_mark(CoupledConfiguration& c, const CoupledClock& clock);

// A merged, time-ordered realisation of all clocks on [0, horizon).
struct Mark {
  double time = 0.0;
  std::uint32_t clock = 0;  // index into the alphabet
};

struct MarkStream {
  std::vector<Mark> marks;
  double horizon = 0.0;
  long tie_count = 0;  // exact time collisions resolved by clock order
};

MarkStream sample_marks(const ModelParams& p, double horizon, Rng& rng);

// Label positions of the initial discrepancies.  Labels are 1..2N+1 for the
// all-discrepancy start; partial labelings cover arbitrary starts.
class DiscrepancyLabels {
 public:
  static constexpr int kDead = INT_MIN;

  // Uniform random permutation of labels 1..2N+1 over all sites.
  static DiscrepancyLabels uniform_permutation(int half_width, Rng& rng);
  // Labels 1..K assigned uniformly at random to the K discrepancy sites of c.
  static DiscrepancyLabels over_discrepancies(const CoupledConfiguration& c, Rng& rng);

  int num_labels() const { return static_cast<int>(position_.size()) - 1; }
  int live_count() const { return live_; }
  // Site of a label, or kDead.
  int position_of(int label) const { return position_[label]; }
  // Label at a site, 0 if none.
  int label_at(int x) const { return label_at_[x + half_width_]; }
  std::vector<int> live_labels() const;

  void apply(const MarkEffect& e);

  // Live label positions coincide with the discrepancy sites of c.
  bool consistent_with(const CoupledConfiguration& c) const;

 private:
  int half_width_ = 0;
  int live_ = 0;
  std::vector<int> position_;  // by label, entry 0 unused
  std::vector<int> label_at_;  // by site index
};

// One tagged discrepancy followed through the marks.
struct TaggedDiscrepancy {
  int site = 0;
  bool alive = true;

  void apply(const MarkEffect& e) {
    if (!alive) return;
    switch (e.kind) {
      case MarkEffect::Kind::Swapped:
        if (site == e.a) site = e.b;
        else if (site == e.b) site = e.a;
        break;
      case MarkEffect::Kind::Moved:
        if (site == e.a) site = e.b;
        break;
      case MarkEffect::Kind::Killed:
        if (site == e.a) alive = false;
        break;
      default:
        break;
    }
  }
};

// Drives the coupled process from pre-sampled Poisson marks, generated lazily
// over bounded windows (default length N^2) so long horizons stay in O(window)
// memory.  pre(t) runs before each mark is applied (and once at the horizon);
// post(t, clock, effect) after.  Either returning false stops the run.
class CoupledSampler {
 public:
  explicit CoupledSampler(const ModelParams& p, double window = -1.0);

  const std::vector<CoupledClock>& alphabet() const { return alphabet_; }

  template <typename Pre, typename Post>
  void run(CoupledConfiguration& c, double horizon, Rng& rng, Pre&& pre,
           Post&& post) const {
    std::vector<Mark> marks;
    for (double w0 = 0.0; w0 < horizon; w0 += window_) {
      const double w1 = std::min(horizon, w0 + window_);
      sample_window(w0, w1, rng, marks);
      for (const Mark& m : marks) {
        if (!pre(m.time)) return;
        const MarkEffect eff = apply_mark(c, alphabet_[m.clock]);
        if (!post(m.time, alphabet_[m.clock], eff)) return;
      }
    }
    pre(horizon);
  }

  void sample_window(double t0, double t1, Rng& rng, std::vector<Mark>& out) const;

 private:
  ModelParams params_;
  std::vector<CoupledClock> alphabet_;
  double window_ = 0.0;
};

struct CoupledSnapshot {
  double time = 0.0;
  CoupledConfiguration config;
  std::vector<int> live_labels;
  DiscrepancyLabels labels;
};

// Full graphical evolution with labelled discrepancies.  Starts from c0 with
// labels assigned by an independent uniform permutation (all-discrepancy
// start) or over the existing discrepancies otherwise.  With `validate` set,
// label/configuration consistency and monotone discrepancy count are checked
// after every mark (throws Error on violation).
std::vector<CoupledSnapshot> evolve_coupled(const CoupledConfiguration& c0,
                                            double horizon, const ModelParams& p,
                                            Rng& rng,
                                            std::span<const double> sample_times,
                                            bool validate = false);

// Start policy for the tagged discrepancy.
struct TaggedStart {
  bool uniform = true;
  int site = 0;
  static TaggedStart uniform_over_sites() { return {true, 0}; }
  static TaggedStart fixed(int x) { return {false, x}; }
};

struct SurvivalOptions {
  double grid_step = -1.0;      // default N^2/50
  bool record_counts = false;   // also track the total discrepancy count
  int threads = 0;
  std::uint64_t stream = 3;     // RNG stream tag
};

// Monte Carlo survival curve of the tagged discrepancy from the
// all-discrepancy start.  When counts are not recorded, replicas stop at the
// tagged death.
SurvivalCurve survival_samples(const ModelParams& p, TaggedStart z0, double horizon,
                               long replicas, std::uint64_t seed,
                               const SurvivalOptions& opt = {});

// Per-site discrepancy occupation P[site x disagrees at t] over replicas from
// the all-discrepancy start; binomial errors.
MarginalTable coupled_diff_marginals(const ModelParams& p, std::span<const double> times,
                                     long replicas, std::uint64_t seed, int threads = 0);

// Per-site occupation of one extracted copy (1 = upper) at fixed times.
MarginalTable coupled_copy_marginals(const ModelParams& p, int copy,
                                     std::span<const double> times, long replicas,
                                     std::uint64_t seed, int threads = 0);

}  // namespace stir
