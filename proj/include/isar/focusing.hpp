#pragma once

// focusing.hpp - time-domain back projection.
//
// Each pixel accumulates, over pulses in ascending index order, the
// range-compressed row interpolated at the pixel's propagation delay and
// re-phased by exp(+j 2 pi fc L / c), where L is the total path length
// (2R monostatic, tx+rx bistatic). Interpolation is an 8-tap Kaiser-windowed
// sinc (beta = 6); nearest-neighbor is selectable. Pixels whose delay falls
// outside the fast-time window (including the kernel's reach) are zeroed and
// counted. The fixed per-pixel summation order makes results independent of
// the worker count; pixels are disjoint, so the loop parallelizes freely.
//
// tdbp_reference is an intentionally naive single-threaded re-implementation
// of the same definition and serves as the brute-force oracle for tdbp_focus.

#include "isar/geometry.hpp"
#include "isar/parallel.hpp"
#include "isar/types.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <vector>

namespace isar {

enum class Interpolation { WindowedSinc8, NearestNeighbor };

struct SarImage {
  std::vector<Complex> pixels;  // row-major [nx][ny]
  SceneGrid grid;
  double wavelength = 0.0;
  std::size_t n_clipped = 0;  // pixels zeroed for leaving the fast-time window

  Complex& at(std::size_t i, std::size_t j) { return pixels[i * grid.ny + j]; }
  const Complex& at(std::size_t i, std::size_t j) const { return pixels[i * grid.ny + j]; }
};

namespace detail {

inline double bessel_i0(double x) {
  // Series expansion; converges quickly for the kernel's argument range.
  const double q = x * x / 4.0;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

inline double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = M_PI * x;
  return std::sin(px) / px;
}

constexpr int kSincTaps = 8;
constexpr double kKaiserBeta = 6.0;

// 8-tap Kaiser-windowed sinc evaluated at fractional sample position u.
// Returns zero (and sets ok=false) when the kernel support leaves the row.
inline Complex interpolate_sinc8(const Complex* row, std::size_t n, double u, bool& ok) {
  const double half = kSincTaps / 2.0;
  const long first = static_cast<long>(std::floor(u)) - kSincTaps / 2 + 1;
  if (first < 0 || first + kSincTaps > static_cast<long>(n)) {
    ok = false;
    return Complex{0.0, 0.0};
  }
  static const double inv_i0 = 1.0 / bessel_i0(kKaiserBeta);
  Complex acc{0.0, 0.0};
  for (int t = 0; t < kSincTaps; ++t) {
    const long j = first + t;
    const double d = u - static_cast<double>(j);
    const double frac = d / half;
    const double win = bessel_i0(kKaiserBeta * std::sqrt(std::max(0.0, 1.0 - frac * frac))) * inv_i0;
    acc += row[j] * (sinc(d) * win);
  }
  ok = true;
  return acc;
}

inline Complex interpolate_nearest(const Complex* row, std::size_t n, double u, bool& ok) {
  const long j = std::lround(u);
  if (j < 0 || j >= static_cast<long>(n)) {
    ok = false;
    return Complex{0.0, 0.0};
  }
  ok = true;
  return row[j];
}

// Slow-time integration weights: unity for uniform PRI, local dtau / nominal
// PRI otherwise.
inline std::vector<double> slow_time_weights(const Trajectory& t) {
  std::vector<double> w(t.size(), 1.0);
  if (t.uniform || t.size() < 3) return w;
  double pri = t.pri;
  if (pri <= 0.0) {
    pri = (t.slow_times.back() - t.slow_times.front()) / static_cast<double>(t.size() - 1);
  }
  for (std::size_t k = 0; k < t.size(); ++k) {
    double dt;
    if (k == 0)
      dt = t.slow_times[1] - t.slow_times[0];
    else if (k + 1 == t.size())
      dt = t.slow_times[k] - t.slow_times[k - 1];
    else
      dt = 0.5 * (t.slow_times[k + 1] - t.slow_times[k - 1]);
    w[k] = dt / pri;
  }
  return w;
}

}  // namespace detail

inline SarImage tdbp_focus(const RangeCompressedMatrix& rc, const BistaticGeometry& geom,
                           const SceneGrid& grid, double carrier_frequency,
                           Interpolation interp = Interpolation::WindowedSinc8,
                           unsigned threads = 0) {
  rc.validate();
  grid.validate();
  geom.rx_trajectory.validate();
  if (carrier_frequency <= 0.0)
    throw std::invalid_argument("tdbp_focus: carrier frequency must be > 0");
  if (rc.n_pulses != geom.pulse_count())
    throw std::invalid_argument("tdbp_focus: trajectory pulse count does not match row count");

  SarImage img;
  img.grid = grid;
  img.wavelength = constants::speed_of_light / carrier_frequency;
  img.pixels.assign(grid.pixel_count(), Complex{0.0, 0.0});

  const double fs = rc.sample_rate;
  const double origin = rc.fast_time_origin;
  const std::size_t n_fast = rc.n_fast;
  const auto weights = detail::slow_time_weights(geom.rx_trajectory);
  const double phase_scale = 2.0 * M_PI * carrier_frequency / constants::speed_of_light;

  std::vector<std::size_t> clipped_per_chunk;
  std::mutex clip_mutex;

  parallel_for_chunks(grid.pixel_count(), threads, [&](std::size_t begin, std::size_t end) {
    std::size_t clipped = 0;
    for (std::size_t p = begin; p < end; ++p) {
      const std::size_t i = p / grid.ny;
      const std::size_t j = p % grid.ny;
      const Vec3 pos = grid.pixel(i, j);

      Complex acc{0.0, 0.0};
      bool in_window = true;
      for (std::size_t k = 0; k < rc.n_pulses; ++k) {
        const double path = geom.path_length(k, pos);
        const double u = (path / constants::speed_of_light - origin) * fs;
        bool ok = true;
        const Complex sample =
            interp == Interpolation::WindowedSinc8
                ? detail::interpolate_sinc8(rc.row(k).data(), n_fast, u, ok)
                : detail::interpolate_nearest(rc.row(k).data(), n_fast, u, ok);
        if (!ok) {
          in_window = false;
          break;
        }
        acc += sample * std::polar(weights[k], phase_scale * path);
      }
      if (in_window) {
        img.pixels[p] = acc;
      } else {
        img.pixels[p] = Complex{0.0, 0.0};
        ++clipped;
      }
    }
    if (clipped > 0) {
      std::lock_guard<std::mutex> lock(clip_mutex);
      clipped_per_chunk.push_back(clipped);
    }
  });

  for (std::size_t c : clipped_per_chunk) img.n_clipped += c;
  return img;
}

/// Brute-force oracle: same contract as tdbp_focus, direct per-pixel
/// evaluation with no shared precomputation and no threading.
inline SarImage tdbp_reference(const RangeCompressedMatrix& rc, const BistaticGeometry& geom,
                               const SceneGrid& grid, double carrier_frequency,
                               Interpolation interp = Interpolation::WindowedSinc8) {
  rc.validate();
  grid.validate();
  geom.rx_trajectory.validate();
  if (carrier_frequency <= 0.0)
    throw std::invalid_argument("tdbp_reference: carrier frequency must be > 0");
  if (rc.n_pulses != geom.pulse_count())
    throw std::invalid_argument("tdbp_reference: trajectory pulse count does not match row count");

  SarImage img;
  img.grid = grid;
  img.wavelength = constants::speed_of_light / carrier_frequency;
  img.pixels.assign(grid.pixel_count(), Complex{0.0, 0.0});

  const auto weights = detail::slow_time_weights(geom.rx_trajectory);

  for (std::size_t i = 0; i < grid.nx; ++i) {
    for (std::size_t j = 0; j < grid.ny; ++j) {
      const Vec3 pos = grid.pixel(i, j);
      Complex acc{0.0, 0.0};
      bool in_window = true;
      for (std::size_t k = 0; k < rc.n_pulses && in_window; ++k) {
        const double path = geom.path_length(k, pos);
        const double t = path / constants::speed_of_light;
        const double u = (t - rc.fast_time_origin) * rc.sample_rate;
        bool ok = true;
        const Complex sample =
            interp == Interpolation::WindowedSinc8
                ? detail::interpolate_sinc8(rc.row(k).data(), rc.n_fast, u, ok)
                : detail::interpolate_nearest(rc.row(k).data(), rc.n_fast, u, ok);
        if (!ok) {
          in_window = false;
          break;
        }
        const double phase = 2.0 * M_PI * carrier_frequency * path / constants::speed_of_light;
        acc += sample * std::polar(weights[k], phase);
      }
      if (in_window)
        img.at(i, j) = acc;
      else {
        img.at(i, j) = Complex{0.0, 0.0};
        ++img.n_clipped;
      }
    }
  }
  return img;
}

/// Peak power over mean background power, in dB. The peak is searched within
/// exclusion_radius of the nominal target position; background pixels are
/// those farther than exclusion_radius (in the grid plane) from the found
/// peak. Returns +inf for a zero background (noise-free image).
inline double image_snr(const SarImage& img, const Vec3& target_position,
                        double exclusion_radius) {
  img.grid.validate();
  if (!img.grid.contains_xy(target_position))
    throw std::invalid_argument("image_snr: target outside grid");
  if (exclusion_radius <= 0.0)
    throw std::invalid_argument("image_snr: exclusion radius must be > 0");

  const SceneGrid& g = img.grid;
  double peak_pow = -1.0;
  std::size_t peak_i = 0, peak_j = 0;
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      const Vec3 p = g.pixel(i, j);
      const double dx = p.x - target_position.x;
      const double dy = p.y - target_position.y;
      if (dx * dx + dy * dy > exclusion_radius * exclusion_radius) continue;
      const double pw = std::norm(img.at(i, j));
      if (pw > peak_pow) {
        peak_pow = pw;
        peak_i = i;
        peak_j = j;
      }
    }
  }
  if (peak_pow < 0.0)
    throw std::invalid_argument("image_snr: no pixels within the search radius of the target");

  const Vec3 peak_pos = g.pixel(peak_i, peak_j);
  double bg_acc = 0.0;
  std::size_t bg_count = 0;
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      const Vec3 p = g.pixel(i, j);
      const double dx = p.x - peak_pos.x;
      const double dy = p.y - peak_pos.y;
      if (dx * dx + dy * dy <= exclusion_radius * exclusion_radius) continue;
      bg_acc += std::norm(img.at(i, j));
      ++bg_count;
    }
  }
  if (bg_count == 0)
    throw std::invalid_argument("image_snr: exclusion disc covers the whole grid");
  const double bg_mean = bg_acc / static_cast<double>(bg_count);
  if (bg_mean == 0.0) return std::numeric_limits<double>::infinity();
  return linear_to_db(peak_pow / bg_mean);
}

}  // namespace isar
