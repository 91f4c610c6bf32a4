#pragma once

// compression.hpp - range compression (matched filter, zero forcing,
// regularized zero forcing) and impulse-response quality metrics.
//
// Compression works per pulse row on the fast-time DFT grid. Only bins
// inside the reference's occupied band participate; guard bins are zeroed
// for every method so out-of-band noise never enters. Zero forcing divides
// by the reference spectrum and refuses structurally dead bins (|X| below
// 1e-12 of the in-band maximum), pointing the caller at the regularized
// variant. The regularized filter is literally 1/(X + k) with real k >= 0.

#include "isar/fft.hpp"
#include "isar/parallel.hpp"
#include "isar/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace isar {

struct SingularSpectrumError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CompressionKind { Matched, ZeroForcing, RegularizedZf };

struct CompressionMethod {
  CompressionKind kind = CompressionKind::Matched;
  double k = 0.0;  // regularization constant, used by RegularizedZf only

  static CompressionMethod matched() { return {CompressionKind::Matched, 0.0}; }
  static CompressionMethod zero_forcing() { return {CompressionKind::ZeroForcing, 0.0}; }
  static CompressionMethod regularized_zf(double k) {
    if (k < 0.0) throw std::invalid_argument("CompressionMethod: k must be >= 0");
    return {CompressionKind::RegularizedZf, k};
  }
};

/// Reference pulse plus the band it occupies. dc_null marks waveforms with a
/// structurally empty DC bin (OFDM with unused DC subcarrier).
struct ReferenceWaveform {
  ComplexSignal signal;
  double occupied_bandwidth = 0.0;  // Hz
  bool dc_null = false;
};

/// Occupied-bin mask on an n-point grid at the given sample rate.
inline std::vector<std::uint8_t> occupied_bins(std::size_t n, double sample_rate,
                                               double occupied_bandwidth, bool dc_null) {
  std::vector<std::uint8_t> mask(n, 0);
  const double half = 0.5 * occupied_bandwidth * (1.0 + 1e-9);
  for (std::size_t m = 0; m < n; ++m) {
    const double f = fft::signed_bin_index(m, n) * sample_rate / static_cast<double>(n);
    mask[m] = std::abs(f) <= half ? 1 : 0;
  }
  if (dc_null) mask[0] = 0;
  return mask;
}

/// SNR-derived regularization constant: mean in-band |X|^2 over the linear SNR.
inline double default_regularization(std::span<const Complex> reference_spectrum,
                                     std::span<const std::uint8_t> mask, double snr_linear) {
  if (snr_linear <= 0.0) throw std::invalid_argument("default_regularization: snr must be > 0");
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t m = 0; m < reference_spectrum.size(); ++m) {
    if (!mask[m]) continue;
    acc += std::norm(reference_spectrum[m]);
    ++count;
  }
  if (count == 0) throw std::invalid_argument("default_regularization: empty band");
  return acc / static_cast<double>(count) / snr_linear;
}

namespace detail {

inline std::vector<Complex> compression_gain(const std::vector<Complex>& ref_spectrum,
                                             const std::vector<std::uint8_t>& mask,
                                             const CompressionMethod& method) {
  const std::size_t n = ref_spectrum.size();
  std::vector<Complex> gain(n, Complex{0.0, 0.0});
  switch (method.kind) {
    case CompressionKind::Matched:
      for (std::size_t m = 0; m < n; ++m)
        if (mask[m]) gain[m] = std::conj(ref_spectrum[m]);
      break;
    case CompressionKind::ZeroForcing: {
      double max_mag = 0.0;
      for (std::size_t m = 0; m < n; ++m)
        if (mask[m]) max_mag = std::max(max_mag, std::abs(ref_spectrum[m]));
      const double floor = 1e-12 * max_mag;
      for (std::size_t m = 0; m < n; ++m) {
        if (!mask[m]) continue;
        if (std::abs(ref_spectrum[m]) < floor)
          throw SingularSpectrumError(
              "range_compress: reference spectrum vanishes inside the occupied band "
              "(bin " + std::to_string(m) + "); use the regularized zero-forcing method");
        gain[m] = 1.0 / ref_spectrum[m];
      }
      break;
    }
    case CompressionKind::RegularizedZf:
      for (std::size_t m = 0; m < n; ++m)
        if (mask[m]) gain[m] = 1.0 / (ref_spectrum[m] + method.k);
      break;
  }
  return gain;
}

}  // namespace detail

/// DFT of a reference zero-padded onto an n-point fast-time grid (plain
/// unnormalized transform; compression works in the raw-DFT convention so
/// that zero forcing is the exact inverse of a convolution channel).
inline std::vector<Complex> reference_spectrum(const ReferenceWaveform& ref, std::size_t n) {
  ref.signal.validate();
  if (ref.signal.size() > n)
    throw std::invalid_argument("range_compress: reference longer than fast-time window");
  std::vector<Complex> spec(n, Complex{0.0, 0.0});
  std::copy(ref.signal.samples.begin(), ref.signal.samples.end(), spec.begin());
  fft::forward_raw(spec);
  return spec;
}

/// Range-compress every pulse row against the reference waveform.
inline RangeCompressedMatrix range_compress(const RawDataMatrix& rx,
                                            const ReferenceWaveform& ref,
                                            const CompressionMethod& method,
                                            unsigned threads = 0) {
  rx.validate();
  if (ref.occupied_bandwidth <= 0.0)
    throw std::invalid_argument("range_compress: occupied bandwidth must be > 0");
  if (std::abs(ref.signal.sample_rate - rx.sample_rate) >
      1e-9 * std::max(ref.signal.sample_rate, rx.sample_rate))
    throw std::invalid_argument("range_compress: reference and data sample rates differ");

  const std::size_t n = rx.n_fast;
  const auto spec = reference_spectrum(ref, n);
  const auto mask = occupied_bins(n, rx.sample_rate, ref.occupied_bandwidth, ref.dc_null);
  const auto gain = detail::compression_gain(spec, mask, method);

  RangeCompressedMatrix out = rx;
  out.range_compressed = true;
  const double inv_n = 1.0 / static_cast<double>(n);
  parallel_for_chunks(rx.n_pulses, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<Complex> work(n);
    for (std::size_t k = begin; k < end; ++k) {
      const auto src = rx.row(k);
      work.assign(src.begin(), src.end());
      fft::forward_raw(work);
      for (std::size_t m = 0; m < n; ++m) work[m] *= gain[m] * inv_n;
      fft::inverse_raw(work);
      auto dst = out.row(k);
      std::copy(work.begin(), work.end(), dst.begin());
    }
  });
  return out;
}

/// Impulse-response quality numbers. Measured on the native sample grid with
/// parabolic peak refinement; far_floor_db is the mean sidelobe power beyond
/// 50 resolution cells from the peak (NaN when the window is too short).
struct IrfMetrics {
  double pslr_db = 0.0;           // peak-to-max-sidelobe, <= 0
  double islr_db = 0.0;           // sidelobe-to-mainlobe energy
  double mainlobe_width_m = 0.0;  // -3 dB width mapped to range, c/2 * delay width
  double peak_position = 0.0;     // fast time of the (refined) peak, seconds
  double far_floor_db = 0.0;      // mean far-sidelobe power relative to peak
};

inline IrfMetrics irf_metrics(std::span<const Complex> compressed, double sample_rate,
                              double occupied_bandwidth, double fast_time_origin = 0.0) {
  if (sample_rate <= 0.0 || occupied_bandwidth <= 0.0)
    throw std::invalid_argument("irf_metrics: rates must be > 0");
  const std::size_t n = compressed.size();
  if (n < 8) throw std::invalid_argument("irf_metrics: vector too short");

  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(compressed[i]);

  std::size_t peak = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (mag[i] > mag[peak]) peak = i;

  std::vector<double> sorted = mag;
  std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
  const double median = sorted[n / 2];
  if (mag[peak] <= 0.0 || (median > 0.0 && linear_to_db(mag[peak] * mag[peak]) <
                                               linear_to_db(median * median) + 10.0))
    throw std::invalid_argument("irf_metrics: no dominant peak (need >= 10 dB over median)");

  // Parabolic refinement of position and height.
  double delta = 0.0;
  double peak_val = mag[peak];
  if (peak > 0 && peak + 1 < n) {
    const double a = mag[peak - 1], b = mag[peak], c = mag[peak + 1];
    const double den = a - 2.0 * b + c;
    if (den < 0.0) {
      delta = 0.5 * (a - c) / den;
      peak_val = b - 0.25 * (a - c) * delta;
    }
  }

  // Mainlobe extent: walk to the first local minima on both sides.
  std::size_t left = peak;
  while (left > 0 && mag[left - 1] < mag[left]) --left;
  std::size_t right = peak;
  while (right + 1 < n && mag[right + 1] < mag[right]) ++right;

  double max_side = 0.0;
  double side_energy = 0.0, main_energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = mag[i] * mag[i];
    if (i >= left && i <= right)
      main_energy += p;
    else {
      side_energy += p;
      max_side = std::max(max_side, mag[i]);
    }
  }

  // -3 dB crossings by linear interpolation of |.|.
  const double thr = peak_val / std::sqrt(2.0);
  double xl = static_cast<double>(peak);
  for (std::size_t i = peak; i > 0; --i) {
    if (mag[i - 1] < thr) {
      xl = static_cast<double>(i - 1) + (thr - mag[i - 1]) / (mag[i] - mag[i - 1]);
      break;
    }
    if (i - 1 == 0) xl = 0.0;
  }
  double xr = static_cast<double>(peak);
  for (std::size_t i = peak; i + 1 < n; ++i) {
    if (mag[i + 1] < thr) {
      xr = static_cast<double>(i) + (mag[i] - thr) / (mag[i] - mag[i + 1]);
      break;
    }
    if (i + 2 == n) xr = static_cast<double>(n - 1);
  }

  IrfMetrics m;
  m.pslr_db = max_side > 0.0 ? 20.0 * std::log10(max_side / peak_val)
                             : -std::numeric_limits<double>::infinity();
  m.islr_db = (side_energy > 0.0 && main_energy > 0.0)
                  ? linear_to_db(side_energy / main_energy)
                  : -std::numeric_limits<double>::infinity();
  m.mainlobe_width_m = constants::speed_of_light / 2.0 * (xr - xl) / sample_rate;
  m.peak_position = fast_time_origin + (static_cast<double>(peak) + delta) / sample_rate;

  // Far floor: beyond 50 resolution cells from the peak.
  const double cell_samples = sample_rate / occupied_bandwidth;
  const double far_off = 50.0 * cell_samples;
  double far_acc = 0.0;
  std::size_t far_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(static_cast<double>(i) - static_cast<double>(peak)) <= far_off) continue;
    far_acc += mag[i] * mag[i];
    ++far_count;
  }
  m.far_floor_db = far_count > 0
                       ? linear_to_db(far_acc / static_cast<double>(far_count) /
                                      (peak_val * peak_val))
                       : std::numeric_limits<double>::quiet_NaN();
  return m;
}

}  // namespace isar
