#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace sdc {

struct RngSeed {
  std::uint64_t value = 0;
};

// SplitMix64 finalizer. Used to derive independent sub-seeds from a master
// seed and a tuple of indices (per column, per sweep cell and trial, ...).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

template <typename... Idx>
constexpr RngSeed derive_seed(RngSeed master, Idx... idx) noexcept {
  std::uint64_t h = mix64(master.value);
  ((h = mix64(h ^ static_cast<std::uint64_t>(idx))), ...);
  return RngSeed{h};
}

/// Seeded generator with platform-independent output.
///
/// std::mt19937_64 is bit-exact across standard libraries, but the
/// std::*_distribution adaptors are not, so the conversions to uniform,
/// normal and bounded-integer variates are written out here:
///   - uniform(): top 53 bits scaled to [0, 1)
///   - normal():  Marsaglia polar method (one cached spare variate)
///   - below(n):  Lemire's multiply-shift with rejection
class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed.value) {}

  std::uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }

  // Uniform integer in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniformly random k-subset of [0, n), returned sorted ascending.
  std::vector<std::size_t> subset(std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::size_t>(below(n - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sdc
