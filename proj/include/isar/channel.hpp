#pragma once

// channel.hpp - deterministic point-scatterer echo simulator.
//
// For each pulse and target the transmitted waveform is delayed by the
// bistatic propagation time (sub-sample accurate: linear phase across the
// fast-time window's DFT grid), rotated by the carrier phase exp(-j2pi fc tau),
// and scaled so the received pulse power matches the radar equation. White
// Gaussian noise with per-sample variance N0*fs is added from a per-pulse
// seeded stream, so runs are bit-identical for any thread count.
//
// Stop-and-go approximation: the platform is frozen within each pulse.

#include "isar/fft.hpp"
#include "isar/geometry.hpp"
#include "isar/link_budget.hpp"
#include "isar/parallel.hpp"
#include "isar/rng.hpp"
#include "isar/types.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace isar {

struct EchoSimConfig {
  double fast_time_origin = 0.0;  // seconds, time of first fast-time sample
  std::size_t n_fast = 0;         // fast-time samples per pulse
  bool noise_enabled = true;
  std::uint64_t seed = 1;
  unsigned threads = 0;           // 0 = hardware concurrency
};

namespace detail {

// Accumulate gain * waveform delayed by `shift` samples into a spectrum that
// lives on an n-point DFT grid. `base` is the unitary spectrum of the
// zero-padded waveform.
inline void add_shifted_spectrum(std::vector<Complex>& accum,
                                 const std::vector<Complex>& base,
                                 double shift_samples, Complex gain) {
  const std::size_t n = accum.size();
  const double w = -2.0 * M_PI * shift_samples / static_cast<double>(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double f = fft::signed_bin_index(m, n);
    accum[m] += gain * base[m] * std::polar(1.0, w * f);
  }
}

}  // namespace detail

/// Waveform delayed by tau into a fast-time window, unit gain, no noise.
/// The waveform's own t0 rides along: sample time t maps to w(t - tau).
inline std::vector<Complex> delayed_replica(const ComplexSignal& waveform, double tau,
                                            double fast_time_origin, std::size_t n_fast) {
  waveform.validate();
  if (n_fast < waveform.size())
    throw std::invalid_argument("delayed_replica: window shorter than waveform");
  std::vector<Complex> spec(n_fast, Complex{0.0, 0.0});
  std::copy(waveform.samples.begin(), waveform.samples.end(), spec.begin());
  fft::forward_unitary(spec);

  std::vector<Complex> out(n_fast, Complex{0.0, 0.0});
  const double shift = (tau + waveform.t0 - fast_time_origin) * waveform.sample_rate;
  detail::add_shifted_spectrum(out, spec, shift, Complex{1.0, 0.0});
  fft::inverse_unitary(out);
  return out;
}

/// Raw echo matrix for a set of point targets under the given geometry and
/// link budget. Throws if any target's echo does not fit the fast-time window.
inline RawDataMatrix simulate_echoes(const ComplexSignal& waveform,
                                     const BistaticGeometry& geom,
                                     const std::vector<PointTarget>& targets,
                                     const LinkBudget& budget, const SnowModel& snow,
                                     const EchoSimConfig& sim) {
  waveform.validate();
  budget.validate();
  snow.validate();
  geom.rx_trajectory.validate();
  for (const auto& t : targets) t.validate();
  if (sim.n_fast == 0) throw std::invalid_argument("simulate_echoes: n_fast must be > 0");
  if (sim.n_fast < waveform.size())
    throw std::invalid_argument("simulate_echoes: fast-time window shorter than waveform");

  const std::size_t n_pulses = geom.pulse_count();
  const double fs = waveform.sample_rate;
  const std::size_t n_wave = waveform.size();
  const double energy = waveform.discrete_energy();

  RawDataMatrix rx(n_pulses, sim.n_fast);
  rx.fast_time_origin = sim.fast_time_origin;
  rx.sample_rate = fs;
  rx.slow_times = geom.rx_trajectory.slow_times;
  rx.range_compressed = false;

  // Unitary spectrum of the zero-padded waveform, shared read-only.
  std::vector<Complex> base(sim.n_fast, Complex{0.0, 0.0});
  std::copy(waveform.samples.begin(), waveform.samples.end(), base.begin());
  fft::forward_unitary(base);

  const double noise_var = budget.noise_psd() * fs;  // complex per-sample variance

  parallel_for_chunks(n_pulses, sim.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<Complex> accum(sim.n_fast);
    for (std::size_t k = begin; k < end; ++k) {
      std::fill(accum.begin(), accum.end(), Complex{0.0, 0.0});
      for (std::size_t q = 0; q < targets.size(); ++q) {
        const PointTarget& tgt = targets[q];
        const double r_tx = geom.tx_range(k, tgt.position);
        const double r_rx = geom.rx_range(k, tgt.position);
        const double tau = (r_tx + r_rx) / constants::speed_of_light;

        const double shift = (tau + waveform.t0 - sim.fast_time_origin) * fs;
        if (shift < 0.0 || shift + static_cast<double>(n_wave) > static_cast<double>(sim.n_fast))
          throw std::invalid_argument(
              "simulate_echoes: target " + std::to_string(q) + " at delay " +
              std::to_string(tau) + " s falls outside the fast-time window at pulse " +
              std::to_string(k));

        const double p_rx =
            received_power_bistatic(budget, tgt.rcs, r_tx, r_rx, snow, tgt.burial_depth);
        // Scale so the received pulse's average power over its duration is P_RX.
        const double amp = std::sqrt(p_rx * static_cast<double>(n_wave) / energy);
        const Complex gain =
            amp * std::polar(1.0, -2.0 * M_PI * budget.carrier_frequency * tau);
        detail::add_shifted_spectrum(accum, base, shift, gain);
      }
      fft::inverse_unitary(accum);

      auto dst = rx.row(k);
      std::copy(accum.begin(), accum.end(), dst.begin());
      if (sim.noise_enabled && noise_var > 0.0) {
        Rng rng(derive_seed(sim.seed, "channel", k));
        for (auto& v : dst) v += rng.complex_normal(noise_var);
      }
    }
  });
  return rx;
}

}  // namespace isar
