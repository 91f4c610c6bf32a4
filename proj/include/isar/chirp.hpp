#pragma once

// chirp.hpp - linear FM pulse synthesis.

#include "isar/types.hpp"

#include <cmath>

namespace isar {

struct ChirpConfig {
  double bandwidth = 40e6;     // Hz, swept band
  double pulse_length = 10e-6; // seconds
  double sample_rate = 50e6;   // Hz, complex baseband

  double chirp_rate() const { return bandwidth / pulse_length; }

  void validate() const {
    if (bandwidth <= 0.0 || pulse_length <= 0.0)
      throw std::invalid_argument("ChirpConfig: bandwidth and pulse_length must be > 0");
    if (sample_rate < bandwidth)
      throw std::invalid_argument("ChirpConfig: sample_rate must be >= bandwidth");
  }
};

/// Unit-modulus chirp over [-T_p/2, T_p/2); instantaneous frequency sweeps
/// -B/2 -> +B/2. The signal's own time origin (t0) is -T_p/2, so a delay of
/// tau places the chirp center at fast time tau.
inline ComplexSignal generate_chirp(const ChirpConfig& cfg) {
  cfg.validate();
  const std::size_t n =
      static_cast<std::size_t>(std::llround(cfg.pulse_length * cfg.sample_rate));
  const double alpha = cfg.chirp_rate();

  ComplexSignal out;
  out.sample_rate = cfg.sample_rate;
  out.t0 = -cfg.pulse_length / 2.0;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = out.t0 + static_cast<double>(i) / cfg.sample_rate;
    out.samples[i] = std::polar(1.0, M_PI * alpha * t * t);
  }
  return out;
}

}  // namespace isar
