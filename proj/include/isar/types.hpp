#pragma once

// types.hpp - shared value types for the ISAC SAR toolkit.
//
// Everything here is plain data with value semantics; all processing
// functions are pure and safe to call concurrently on shared inputs.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace isar {

using Complex = std::complex<double>;

namespace constants {
inline constexpr double speed_of_light = 299792458.0;    // m/s
inline constexpr double boltzmann = 1.380649e-23;        // J/K
}  // namespace constants

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Uniformly sampled complex baseband sequence.
struct ComplexSignal {
  std::vector<Complex> samples;
  double sample_rate = 0.0;  // Hz
  double t0 = 0.0;           // time of first sample, seconds

  std::size_t size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }

  // Sum of |x|^2 over samples (discrete energy, no 1/fs factor).
  double discrete_energy() const {
    double e = 0.0;
    for (const auto& s : samples) e += std::norm(s);
    return e;
  }
  double mean_power() const {
    return samples.empty() ? 0.0 : discrete_energy() / static_cast<double>(samples.size());
  }

  void validate() const {
    if (sample_rate <= 0.0) throw std::invalid_argument("ComplexSignal: sample_rate must be > 0");
  }
};

/// Fast-time x slow-time complex matrix (raw echoes or range-compressed data).
/// Row k holds the fast-time samples of pulse k; sample i sits at
/// fast_time_origin + i / sample_rate.
struct RawDataMatrix {
  std::vector<Complex> data;  // row-major [n_pulses][n_fast]
  std::size_t n_pulses = 0;
  std::size_t n_fast = 0;
  double fast_time_origin = 0.0;  // seconds
  double sample_rate = 0.0;       // Hz
  std::vector<double> slow_times; // one per pulse, seconds
  bool range_compressed = false;

  RawDataMatrix() = default;
  RawDataMatrix(std::size_t pulses, std::size_t fast)
      : data(pulses * fast, Complex{0.0, 0.0}), n_pulses(pulses), n_fast(fast) {}

  std::span<Complex> row(std::size_t k) {
    return std::span<Complex>(data.data() + k * n_fast, n_fast);
  }
  std::span<const Complex> row(std::size_t k) const {
    return std::span<const Complex>(data.data() + k * n_fast, n_fast);
  }

  double fast_time(std::size_t i) const {
    return fast_time_origin + static_cast<double>(i) / sample_rate;
  }

  void validate() const {
    if (data.size() != n_pulses * n_fast)
      throw std::invalid_argument("RawDataMatrix: data size inconsistent with dimensions");
    if (!slow_times.empty() && slow_times.size() != n_pulses)
      throw std::invalid_argument("RawDataMatrix: slow-time axis inconsistent with pulse count");
  }
};

/// Range-compressed data reuses the raw container; the flag tells them apart.
using RangeCompressedMatrix = RawDataMatrix;

}  // namespace isar
