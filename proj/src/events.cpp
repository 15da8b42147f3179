#include "stir/events.hpp"

namespace stir {

std::vector<RatedEvent> transition_alphabet(const ModelParams& p) {
  std::vector<RatedEvent> out;
  const int n = p.half_width;
  out.reserve(p.num_bonds() + 4);
  for (int x = -n; x < n; ++x) out.push_back({EventKind::stir(x), 0.5});
  if (p.kind == ModelKind::DensityReservoir) {
    out.push_back({EventKind::density_set(Side::Plus, 1), p.rho_plus});
    out.push_back({EventKind::density_set(Side::Plus, 0), 1.0 - p.rho_plus});
    out.push_back({EventKind::density_set(Side::Minus, 1), p.rho_minus});
    out.push_back({EventKind::density_set(Side::Minus, 0), 1.0 - p.rho_minus});
  } else {
    const double r = p.boundary_clock_rate();
    out.push_back({EventKind::current_birth(0), r});
    out.push_back({EventKind::current_birth(1), r});
    out.push_back({EventKind::current_death(0), r});
    out.push_back({EventKind::current_death(1), r});
  }
  return out;
}

bool current_guard(const Configuration& c, Side side, int offset) {
  const int n = c.half_width();
  if (side == Side::Plus) {
    // Birth window {N-1, N}: site must be empty and everything beyond occupied.
    if (offset == 0) return c.at(n) == 0;
    return c.at(n - 1) == 0 && c.at(n) == 1;
  }
  // Removal window {-N, -N+1}: site occupied, everything before empty.
  if (offset == 0) return c.at(-n) == 1;
  return c.at(-n + 1) == 1 && c.at(-n) == 0;
}

bool apply_event(Configuration& c, const EventKind& ev, const ModelParams& p) {
  const int n = c.half_width();
  switch (ev.tag) {
    case EventKind::Tag::Stir: {
      const int a = c.at(ev.bond), b = c.at(ev.bond + 1);
      if (a == b) return false;
      c.set(ev.bond, b);
      c.set(ev.bond + 1, a);
      return true;
    }
    case EventKind::Tag::DensitySet: {
      const int site = p.edge_site(ev.side);
      if (c.at(site) == ev.value) return false;
      c.set(site, ev.value);
      return true;
    }
    case EventKind::Tag::CurrentBirth: {
      if (!current_guard(c, Side::Plus, ev.offset)) return false;
      c.set(n - ev.offset, 1);
      return true;
    }
    case EventKind::Tag::CurrentDeath: {
      if (!current_guard(c, Side::Minus, ev.offset)) return false;
      c.set(-n + ev.offset, 0);
      return true;
    }
  }
  return false;
}

namespace {
void check_bond(int bond, int n) {
  if (bond < -n || bond >= n)
    throw BondOutOfRange("bond " + std::to_string(bond) + " outside [-N, N-1]");
}
}  // namespace

Configuration apply_stirring(Configuration c, int bond) {
  check_bond(bond, c.half_width());
  const int a = c.at(bond);
  c.set(bond, c.at(bond + 1));
  c.set(bond + 1, a);
  return c;
}

CoupledConfiguration apply_stirring(CoupledConfiguration c, int bond) {
  check_bond(bond, c.half_width());
  const SiteState a = c.at(bond);
  c.set(bond, c.at(bond + 1));
  c.set(bond + 1, a);
  return c;
}

Configuration apply_density_boundary(Configuration c, Side side, int value,
                                     const ModelParams& p) {
  if (p.kind != ModelKind::DensityReservoir)
    throw WrongModel("density boundary event on a current-reservoir model");
  c.set(p.edge_site(side), value);
  return c;
}

Configuration apply_current_boundary(Configuration c, Side side, const ModelParams& p) {
  if (p.kind != ModelKind::CurrentReservoir)
    throw WrongModel("current boundary event on a density-reservoir model");
  for (int offset = 0; offset < 2; ++offset) {
    if (current_guard(c, side, offset)) {
      const int site = (side == Side::Plus ? c.half_width() - offset
                                           : -c.half_width() + offset);
      c.set(site, side == Side::Plus ? 1 : 0);
      break;
    }
  }
  return c;
}

}  // namespace stir
