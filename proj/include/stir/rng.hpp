#pragma once

#include <cmath>
#include <cstdint>

namespace stir {

// xoshiro256** with splitmix64 seeding.  Replica streams are derived from a
// master seed and a (stream, index) pair, so aggregated results do not depend
// on thread count or scheduling.  All floating-point draws are built from the
// raw 64-bit output, keeping byte-identical reruns independent of the C++
// standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) {
    std::uint64_t sm = seed;
    for (auto& w : state_) w = splitmix(sm);
  }

  // Independent stream for purpose `stream`, replica `index`.
  static Rng from(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t h = master;
    (void)splitmix(h);
    h ^= 0xD1B54A32D192ED03ull * (stream + 1);
    (void)splitmix(h);
    h ^= 0x8CB92BA72F3D8DD7ull * (index + 1);
    return Rng(splitmix(h));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n).  Multiply-shift; bias is O(n / 2^64).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform site in [-half_width, half_width].
  int uniform_site(int half_width) {
    return static_cast<int>(below(2 * half_width + 1)) - half_width;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_[4];
};

}  // namespace stir
