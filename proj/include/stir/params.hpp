#pragma once

#include <string>

#include "stir/errors.hpp"

namespace stir {

enum class ModelKind { DensityReservoir, CurrentReservoir };

enum class Side { Minus, Plus };

inline int sign_of(Side s) { return s == Side::Plus ? +1 : -1; }
inline Side opposite(Side s) { return s == Side::Plus ? Side::Minus : Side::Plus; }
inline const char* name_of(Side s) { return s == Side::Plus ? "+" : "-"; }

// Model parameters.  The lattice has 2N+1 sites -N..N; epsilon = 1/N is always
// derived, never stored.  Boundary windows are the two outermost sites per side.
struct ModelParams {
  ModelKind kind = ModelKind::CurrentReservoir;
  int half_width = 1;               // N
  double boundary_intensity = 1.0;  // j (current-reservoir model)
  double rho_plus = 1.0;            // density-reservoir model only
  double rho_minus = 0.0;

  int num_sites() const { return 2 * half_width + 1; }
  int num_bonds() const { return 2 * half_width; }
  double epsilon() const { return 1.0 / half_width; }
  // Rate of each boundary Poisson clock in the current model: j/(2N).
  double boundary_clock_rate() const { return boundary_intensity / (2.0 * half_width); }
  double rho(Side s) const { return s == Side::Plus ? rho_plus : rho_minus; }
  int edge_site(Side s) const { return sign_of(s) * half_width; }
  // The site one step inward from the edge.
  int inner_site(Side s) const { return sign_of(s) * (half_width - 1); }

  void validate() const {
    if (half_width < 1) throw ValidationError("half_width must be >= 1");
    if (kind == ModelKind::CurrentReservoir) {
      if (!(boundary_intensity > 0.0))
        throw ValidationError("boundary_intensity must be > 0");
    } else {
      if (!(rho_minus >= 0.0 && rho_plus <= 1.0 && rho_plus >= rho_minus))
        throw ValidationError("need 1 >= rho_plus >= rho_minus >= 0");
    }
  }

  static ModelParams density(int n, double rp, double rm) {
    ModelParams p;
    p.kind = ModelKind::DensityReservoir;
    p.half_width = n;
    p.rho_plus = rp;
    p.rho_minus = rm;
    p.validate();
    return p;
  }

  static ModelParams current(int n, double j) {
    ModelParams p;
    p.kind = ModelKind::CurrentReservoir;
    p.half_width = n;
    p.boundary_intensity = j;
    p.validate();
    return p;
  }
};

inline const char* name_of(ModelKind k) {
  return k == ModelKind::DensityReservoir ? "density" : "current";
}

}  // namespace stir
