#pragma once

// rng.hpp - deterministic seeding and portable Gaussian sampling.
//
// Every random stream in the toolkit derives from a single master seed via
// derive_seed(master, stream_name, index). Gaussian samples use an explicit
// Box-Muller transform on hand-rolled uniform doubles, so sequences are
// bit-identical across platforms and thread counts (std::normal_distribution
// is implementation-defined).

#include "isar/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace isar {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Sub-seed for stream `name` / element `index` under a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view name, std::uint64_t index = 0) {
  std::uint64_t h = fnv1a64(name.data(), name.size());
  h = fnv1a64(&master, sizeof(master), h);
  h = fnv1a64(&index, sizeof(index), h);
  return splitmix64(h);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  bool next_bit() { return (gen_() >> 63) != 0; }

  /// Uniform double in (0, 1), 53-bit resolution, never exactly 0.
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal pair via Box-Muller.
  void normal_pair(double& a, double& b) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * M_PI * u2;
    a = r * std::cos(th);
    b = r * std::sin(th);
  }

  /// Circularly symmetric complex Gaussian with E|z|^2 = variance.
  Complex complex_normal(double variance) {
    double a, b;
    normal_pair(a, b);
    const double s = std::sqrt(variance / 2.0);
    return Complex{s * a, s * b};
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace isar
