#pragma once

// emulation.hpp - OFDM acquisition emulated from chirp acquisitions.
//
// A chirp-based range-compressed data matrix acts as a continuous channel
// description: convolving each row with an OFDM pulse produces the raw data
// an OFDM transmission would have returned. The convolution is evaluated on
// the fast-time window's DFT grid (full linear convolution with the tail
// folded periodically), which makes zero-forcing re-compression an exact
// inverse on the occupied band. Alignment: the output fast-time origin is
// the input origin plus the pulse's own t0.

#include "isar/fft.hpp"
#include "isar/geometry.hpp"
#include "isar/parallel.hpp"
#include "isar/types.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace isar {

struct UnsupportedOperationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline RawDataMatrix emulate_ofdm_from_chirp(const RangeCompressedMatrix& rc_chirp,
                                             const ComplexSignal& ofdm_pulse,
                                             unsigned threads = 0) {
  rc_chirp.validate();
  ofdm_pulse.validate();
  if (!rc_chirp.range_compressed)
    throw std::invalid_argument("emulate_ofdm_from_chirp: input must be range-compressed");
  if (std::abs(ofdm_pulse.sample_rate - rc_chirp.sample_rate) >
      1e-9 * std::max(ofdm_pulse.sample_rate, rc_chirp.sample_rate)) {
    const double factor = rc_chirp.sample_rate / ofdm_pulse.sample_rate;
    throw std::invalid_argument(
        "emulate_ofdm_from_chirp: sample-rate mismatch; resample the pulse by a factor of " +
        std::to_string(factor) + " first");
  }
  if (ofdm_pulse.size() > rc_chirp.n_fast)
    throw std::invalid_argument("emulate_ofdm_from_chirp: pulse longer than fast-time window");

  RawDataMatrix out = rc_chirp;
  out.range_compressed = false;
  out.fast_time_origin = rc_chirp.fast_time_origin + ofdm_pulse.t0;

  // Shared kernel spectrum on the window grid.
  std::vector<Complex> kernel(rc_chirp.n_fast, Complex{0.0, 0.0});
  std::copy(ofdm_pulse.samples.begin(), ofdm_pulse.samples.end(), kernel.begin());
  fft::forward_raw(kernel);

  const double inv_n = 1.0 / static_cast<double>(rc_chirp.n_fast);
  parallel_for_chunks(rc_chirp.n_pulses, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<Complex> work(rc_chirp.n_fast);
    for (std::size_t k = begin; k < end; ++k) {
      const auto src = rc_chirp.row(k);
      work.assign(src.begin(), src.end());
      fft::forward_raw(work);
      for (std::size_t m = 0; m < work.size(); ++m) work[m] *= kernel[m] * inv_n;
      fft::inverse_raw(work);
      auto dst = out.row(k);
      std::copy(work.begin(), work.end(), dst.begin());
    }
  });
  return out;
}

/// Slow-time decimation to a lower PRF (integer ratio only, no interpolation).
/// Keeps every ratio-th pulse of both the matrix and the trajectory.
inline std::pair<RawDataMatrix, Trajectory> adapt_prf(const RawDataMatrix& rc,
                                                      const Trajectory& trajectory,
                                                      double target_prf) {
  rc.validate();
  trajectory.validate();
  if (target_prf <= 0.0) throw std::invalid_argument("adapt_prf: target prf must be > 0");
  if (trajectory.size() != rc.n_pulses)
    throw std::invalid_argument("adapt_prf: trajectory pulse count does not match row count");
  if (!trajectory.uniform || trajectory.pri <= 0.0)
    throw std::invalid_argument("adapt_prf: requires a uniform-PRI trajectory");

  const double source_prf = 1.0 / trajectory.pri;
  if (target_prf > source_prf * (1.0 + 1e-9))
    throw UnsupportedOperationError("adapt_prf: upsampling is not supported");
  const double ratio = source_prf / target_prf;
  const auto k = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(k)) > 1e-9 * ratio)
    throw UnsupportedOperationError(
        "adapt_prf: source/target PRF ratio " + std::to_string(ratio) +
        " is not an integer; slow-time interpolation is not supported");
  if (k == 1) return {rc, trajectory};

  const std::size_t n_out = (rc.n_pulses + k - 1) / k;
  RawDataMatrix out(n_out, rc.n_fast);
  out.fast_time_origin = rc.fast_time_origin;
  out.sample_rate = rc.sample_rate;
  out.range_compressed = rc.range_compressed;
  out.slow_times.resize(n_out);

  Trajectory traj_out;
  traj_out.pri = trajectory.pri * static_cast<double>(k);
  traj_out.uniform = true;
  traj_out.slow_times.resize(n_out);
  traj_out.positions.resize(n_out);

  for (std::size_t i = 0; i < n_out; ++i) {
    const std::size_t src = i * k;
    const auto row = rc.row(src);
    std::copy(row.begin(), row.end(), out.row(i).begin());
    out.slow_times[i] = rc.slow_times.empty() ? trajectory.slow_times[src] : rc.slow_times[src];
    traj_out.slow_times[i] = trajectory.slow_times[src];
    traj_out.positions[i] = trajectory.positions[src];
  }
  return {std::move(out), std::move(traj_out)};
}

}  // namespace isar
