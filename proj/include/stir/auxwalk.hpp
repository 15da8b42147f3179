#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stir/harris.hpp"
#include "stir/params.hpp"
#include "stir/rng.hpp"
#include "stir/stats.hpp"

namespace stir {

// Time-binned conditional rates of the tagged discrepancy seen as a walk in
// its random environment: death rates at the four boundary-window sites and
// the extra inward-jump rates at the two edges.  Every entry is j/(2N) times a
// conditional probability; bins whose conditioning event lacks support hold
// NaN and are flagged, never zero.
//
// Rows are (side, offset) pairs: 0 = +N, 1 = +(N-1), 2 = -N, 3 = -(N-1).
// At N = 1 rows 1 and 3 share site 0 and their death rates add.
struct RateTable {
  int half_width = 0;
  double clock_rate = 0.0;  // j/(2N)
  long support_floor = 0;
  std::vector<double> bin_edges;               // K+1 ascending, starting at 0
  std::array<std::vector<double>, 4> death;    // per row, per bin
  std::array<std::vector<long>, 4> support;    // conditioning sample counts
  std::array<std::vector<double>, 2> extra;    // rows: 0 = +N, 1 = -N
  // Diagnostic: conditional mean of the stricter both-occupied (right) or
  // both-empty (left) inner-site indicator, a pointwise lower bound on the
  // death indicator.  Rows as `extra`.
  std::array<std::vector<double>, 2> death_lower_bound;
  std::vector<std::string> warnings;

  int site_of_row(int row) const;
  std::size_t num_bins() const { return bin_edges.empty() ? 0 : bin_edges.size() - 1; }
  int bin_of(double t) const;
  bool missing(int row, std::size_t bin) const;
  // Total death rate of a walker at z during `bin` (0 off the windows).
  // Throws MissingRates on a flagged entry.
  double death_rate_at(int z, std::size_t bin) const;
  // Extra inward-jump rate at z (nonzero only at the edges).
  double extra_rate_at(int z, std::size_t bin) const;
  // Start of the first bin with any flagged entry; +infinity when complete.
  double first_missing_time() const;
};

struct EstimateOptions {
  long support_floor = 25;
  int threads = 0;
  bool with_refined = false;  // also estimate on half-width bins (same pass)
  std::uint64_t stream = 5;
  // Test hook, honoured only when threads == 1: raw conditioning samples
  // (replica, bin, row, death indicator).
  std::function<void(long, int, int, int)> recorder;
};

struct RateEstimate {
  RateTable table;
  RateTable refined;                      // set when with_refined
  std::vector<double> tagged_death_times; // same replicas (+inf = alive)
};

// Conditional-rate estimation from the coupled process started at (z0,
// eta_star): environment indicators are sampled at bin midpoints among
// replicas whose tagged walker sits at the row's site.
RateEstimate estimate_rates(const ModelParams& p, TaggedStart z0,
                            const CoupledConfiguration& eta_star,
                            std::span<const double> bin_edges, long replicas,
                            std::uint64_t seed, const EstimateOptions& opt = {});

// Simple random walk at rate 1/2 per direction (outward jumps suppressed) with
// the table's extra jumps and killing, piecewise constant per bin.  Returns
// the extinction time, +infinity if alive at `horizon`.
double evolve_aux(const RateTable& table, int z0, double horizon, Rng& rng);

struct CompareOptions {
  double bin_width = -1.0;   // default max(1, N^2/50)
  long support_floor = 25;
  double ks_level = 0.01;
  int permutations = 300;
  int threads = 0;
  double grid_step = -1.0;   // reporting grid, default N^2/50
  long aux_replicas = -1;    // default: same as tagged replicas
};

struct ExtinctionComparison {
  SurvivalCurve tagged;
  SurvivalCurve aux;
  KsResult ks;
  RateTable rates;
  double horizon_effective = 0.0;  // comparison truncated at unsupported bins
  double refinement_gap = 0.0;     // sup |S_aux(coarse) - S_aux(refined)|
  bool agree = false;
};

// Extinction-law comparison between the tagged discrepancy and the auxiliary
// walk driven by the estimated rates.  The same coupled replicas provide the
// rate table and the tagged extinction sample; the auxiliary sample is an
// independent stream.
ExtinctionComparison compare_extinction(const ModelParams& p, TaggedStart z0,
                                        double horizon, long replicas,
                                        std::uint64_t seed,
                                        const CompareOptions& opt = {});

// Uniform bin edges of width max(1, N^2/50) unless overridden.
std::vector<double> default_bin_edges(const ModelParams& p, double horizon,
                                      double width = -1.0);

}  // namespace stir
