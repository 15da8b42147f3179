#include "stir/config.hpp"

namespace stir {

Configuration Configuration::from_string(const std::string& s) {
  if (s.empty() || s.size() % 2 == 0)
    throw ValidationError("configuration string must have odd length 2N+1");
  Configuration c(static_cast<int>(s.size() / 2), 0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1')
      throw ValidationError("configuration string may contain only 0/1");
    c.cells_[i] = (s[i] == '1');
  }
  return c;
}

CoupledConfiguration CoupledConfiguration::from_string(const std::string& s) {
  if (s.empty() || s.size() % 2 == 0)
    throw ValidationError("coupled string must have odd length 2N+1");
  CoupledConfiguration c(static_cast<int>(s.size() / 2), SiteState::Empty);
  for (std::size_t i = 0; i < s.size(); ++i) {
    switch (s[i]) {
      case 'x': c.cells_[i] = SiteState::Diff; break;
      case '1': c.cells_[i] = SiteState::Full; break;
      case '0': c.cells_[i] = SiteState::Empty; break;
      default: throw ValidationError("coupled string may contain only x/1/0");
    }
  }
  return c;
}

CoupledConfiguration compose(const Configuration& eta1, const Configuration& eta2) {
  if (eta1.half_width() != eta2.half_width())
    throw OrderViolation("copies have different lengths");
  const int n = eta1.half_width();
  CoupledConfiguration c(n, SiteState::Empty);
  for (int x = -n; x <= n; ++x) {
    const int a = eta1.at(x), b = eta2.at(x);
    if (a < b)
      throw OrderViolation("eta1 < eta2 at site " + std::to_string(x));
    c.set(x, a == b ? (a ? SiteState::Full : SiteState::Empty) : SiteState::Diff);
  }
  return c;
}

Configuration reflect_flip(const Configuration& c) {
  const int n = c.half_width();
  Configuration out(n, 0);
  for (int x = -n; x <= n; ++x) out.set(x, 1 - c.at(-x));
  return out;
}

}  // namespace stir
