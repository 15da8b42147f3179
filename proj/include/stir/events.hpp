#pragma once

#include <vector>

#include "stir/config.hpp"
#include "stir/params.hpp"

namespace stir {

// One Poisson clock of the single-copy generator.  Rates are state
// independent; guards decide whether a firing changes the configuration.
struct EventKind {
  enum class Tag : std::uint8_t { Stir, DensitySet, CurrentBirth, CurrentDeath };

  Tag tag = Tag::Stir;
  int bond = 0;          // Stir: left site x of the bond (x, x+1)
  Side side = Side::Plus;
  int value = 0;         // DensitySet: value written to the edge site
  int offset = 0;        // Current*: 0 = edge site, 1 = one site inward

  static EventKind stir(int bond) { return {Tag::Stir, bond, Side::Plus, 0, 0}; }
  static EventKind density_set(Side s, int v) { return {Tag::DensitySet, 0, s, v, 0}; }
  static EventKind current_birth(int offset) { return {Tag::CurrentBirth, 0, Side::Plus, 0, offset}; }
  static EventKind current_death(int offset) { return {Tag::CurrentDeath, 0, Side::Minus, 0, offset}; }
};

struct RatedEvent {
  EventKind kind;
  double rate = 0.0;
};

// The complete clock alphabet of the generator L.  Stirring bonds fire at
// rate 1/2 each; density set-clocks at rho / (1 - rho) per side; each of the
// two per-site current clocks per side at j/(2N).
std::vector<RatedEvent> transition_alphabet(const ModelParams& p);

// Applies one clock firing in place.  Returns true iff the configuration
// changed (guarded clocks whose guard fails are no-ops).
bool apply_event(Configuration& c, const EventKind& ev, const ModelParams& p);

// Exchanges the contents of sites x and x+1.  Throws BondOutOfRange.
Configuration apply_stirring(Configuration c, int bond);
CoupledConfiguration apply_stirring(CoupledConfiguration c, int bond);

// Density-reservoir boundary: sets site (+/-)N to v.  Throws WrongModel.
Configuration apply_density_boundary(Configuration c, Side side, int value,
                                     const ModelParams& p);

// Current-reservoir boundary: applies the unique active site of the side's
// window (birth at the last empty site on the right, removal of the first
// particle on the left); identity when the window has none.  Throws WrongModel.
Configuration apply_current_boundary(Configuration c, Side side, const ModelParams& p);

// Guard of the per-site current clock: birth admissible at `site` on the
// right (all sites beyond it occupied, site empty) or removal on the left.
bool current_guard(const Configuration& c, Side side, int offset);

}  // namespace stir
