#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stir/errors.hpp"

namespace stir {

// Occupancy word over the signed sites -N..N of a single copy.
class Configuration {
 public:
  Configuration() = default;
  Configuration(int half_width, int fill)
      : half_width_(half_width),
        cells_(2 * half_width + 1, static_cast<std::uint8_t>(fill)) {}

  static Configuration all_empty(int half_width) { return Configuration(half_width, 0); }
  static Configuration all_full(int half_width) { return Configuration(half_width, 1); }

  // Parses a {0,1} string, site -N leftmost.  Length must be odd.
  static Configuration from_string(const std::string& s);

  int half_width() const { return half_width_; }
  int num_sites() const { return 2 * half_width_ + 1; }

  int at(int x) const { return cells_[idx(x)]; }
  void set(int x, int v) { cells_[idx(x)] = static_cast<std::uint8_t>(v); }

  int particle_count() const {
    int n = 0;
    for (auto c : cells_) n += c;
    return n;
  }

  std::string str() const {
    std::string s(cells_.size(), '0');
    for (std::size_t i = 0; i < cells_.size(); ++i) s[i] = cells_[i] ? '1' : '0';
    return s;
  }

  const std::vector<std::uint8_t>& cells() const { return cells_; }

  bool operator==(const Configuration&) const = default;

 private:
  int idx(int x) const { return x + half_width_; }

  int half_width_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Per-site state of two coupled copies.  Diff encodes (1,0) (upper copy
// occupied, lower empty), Full (1,1), Empty (0,0).  The pointwise order
// eta1 >= eta2 is built into the encoding.
enum class SiteState : std::uint8_t { Diff, Full, Empty };

inline char to_char(SiteState s) {
  switch (s) {
    case SiteState::Diff: return 'x';
    case SiteState::Full: return '1';
    default: return '0';
  }
}

struct StateCounts {
  int diff = 0;
  int full = 0;
  int empty = 0;
};

class CoupledConfiguration {
 public:
  CoupledConfiguration() = default;
  CoupledConfiguration(int half_width, SiteState fill)
      : half_width_(half_width), cells_(2 * half_width + 1, fill) {}

  // The coupled start used throughout: every site holds a discrepancy.
  static CoupledConfiguration all_diff(int half_width) {
    return CoupledConfiguration(half_width, SiteState::Diff);
  }

  // Parses a {x,1,0} string, site -N leftmost.
  static CoupledConfiguration from_string(const std::string& s);

  int half_width() const { return half_width_; }
  int num_sites() const { return 2 * half_width_ + 1; }

  SiteState at(int x) const { return cells_[idx(x)]; }
  void set(int x, SiteState v) { cells_[idx(x)] = v; }

  StateCounts counts() const {
    StateCounts c;
    for (auto s : cells_) {
      if (s == SiteState::Diff) ++c.diff;
      else if (s == SiteState::Full) ++c.full;
      else ++c.empty;
    }
    return c;
  }

  int diff_count() const { return counts().diff; }

  // Copy occupations at a site: copy 1 is the upper copy.
  int copy_at(int x, int copy) const {
    SiteState s = at(x);
    if (s == SiteState::Full) return 1;
    if (s == SiteState::Empty) return 0;
    return copy == 1 ? 1 : 0;
  }

  std::pair<Configuration, Configuration> decompose() const {
    Configuration a(half_width_, 0), b(half_width_, 0);
    for (int x = -half_width_; x <= half_width_; ++x) {
      a.set(x, copy_at(x, 1));
      b.set(x, copy_at(x, 2));
    }
    return {a, b};
  }

  std::string str() const {
    std::string s(cells_.size(), '0');
    for (std::size_t i = 0; i < cells_.size(); ++i) s[i] = to_char(cells_[i]);
    return s;
  }

  const std::vector<SiteState>& cells() const { return cells_; }

  bool operator==(const CoupledConfiguration&) const = default;

 private:
  int idx(int x) const { return x + half_width_; }

  int half_width_ = 0;
  std::vector<SiteState> cells_;
};

// Builds the three-state word from an ordered pair of copies.
// Throws OrderViolation if eta1(x) < eta2(x) anywhere.
CoupledConfiguration compose(const Configuration& eta1, const Configuration& eta2);

// Site reflection combined with particle-hole exchange: out(x) = 1 - in(-x).
// An involution.
Configuration reflect_flip(const Configuration& c);

}  // namespace stir
