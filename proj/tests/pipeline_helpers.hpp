#pragma once

// Shared end-to-end scene builder for the focusing and KPI tests: a single
// point target on flat ground, a straight pass at constant altitude, and a
// wideband oversampled waveform so range sidelobes stay within a few meters.

#include "isar/channel.hpp"
#include "isar/compression.hpp"
#include "isar/focusing.hpp"
#include "isar/ofdm.hpp"
#include "isar/rng.hpp"

#include <algorithm>
#include <cmath>

namespace isar::testing {

struct SceneSpec {
  std::size_t n_pulses = 64;
  double altitude = 150.0;
  double ground_offset = 150.0;  // target y; 45 degrees off-nadir when = altitude
  double speed = 10.0;           // m/s along x
  double prf = 100.0;
  double rcs = 1.0;
  double snow_depth = 0.0;

  std::size_t grid_nx = 33, grid_ny = 33;
  double dx = 1.0, dy = 1.0;

  bool noise = false;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  OfdmConfig cfg = wideband_cfg();
  LinkBudget budget;
  SnowModel snow;

  static OfdmConfig wideband_cfg() {
    OfdmConfig cfg;
    cfg.m_fft = 128;
    cfg.m_active = 52;
    cfg.delta_f = 1.2e6;  // B = 62.4 MHz -> range cell 2.4 m
    cfg.cp_samples = 0;
    return cfg;
  }
};

struct BuiltScene {
  OfdmConfig cfg;
  ComplexSignal pulse;
  BistaticGeometry geom;
  SceneGrid grid;
  Vec3 target;
  LinkBudget budget;
  SnowModel snow;
  RawDataMatrix raw;
  RangeCompressedMatrix rc;
};

inline ComplexSignal scene_pulse(const OfdmConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> bits(cfg.m_active * cfg.constellation.bits_per_symbol());
  for (auto& b : bits) b = rng.next_bit();
  return ofdm_symbol_body(map_bits(bits, cfg.constellation), cfg);
}

inline BuiltScene build_point_scene(const SceneSpec& spec) {
  BuiltScene s;
  s.cfg = spec.cfg;
  s.budget = spec.budget;
  s.snow = spec.snow;
  s.pulse = scene_pulse(spec.cfg, derive_seed(spec.seed, "scene-pulse"));
  s.target = {0.0, spec.ground_offset, 0.0};

  const double aperture = spec.speed * static_cast<double>(spec.n_pulses - 1) / spec.prf;
  auto traj = make_linear_trajectory({-aperture / 2.0, 0.0, spec.altitude},
                                     {spec.speed, 0.0, 0.0}, spec.prf, spec.n_pulses);
  s.geom = BistaticGeometry::monostatic(traj);

  s.grid.nx = spec.grid_nx;
  s.grid.ny = spec.grid_ny;
  s.grid.dx = spec.dx;
  s.grid.dy = spec.dy;
  s.grid.origin = {s.target.x - spec.dx * static_cast<double>(spec.grid_nx / 2),
                   s.target.y - spec.dy * static_cast<double>(spec.grid_ny / 2), 0.0};

  // Fast-time window covering every pixel delay plus the interpolator reach.
  const double fs = s.pulse.sample_rate;
  double t_min = 1e30, t_max = 0.0;
  for (std::size_t k = 0; k < s.geom.pulse_count(); ++k) {
    for (const Vec3& corner :
         {s.grid.pixel(0, 0), s.grid.pixel(spec.grid_nx - 1, 0),
          s.grid.pixel(0, spec.grid_ny - 1), s.grid.pixel(spec.grid_nx - 1, spec.grid_ny - 1)}) {
      const double t = s.geom.path_length(k, corner) / constants::speed_of_light;
      t_min = std::min(t_min, t);
      t_max = std::max(t_max, t);
    }
  }
  EchoSimConfig sim;
  sim.fast_time_origin = t_min - 16.0 / fs;
  std::size_t span =
      static_cast<std::size_t>((t_max - t_min) * fs) + s.pulse.size() + 48;
  std::size_t n_fast = 64;
  while (n_fast < span) n_fast *= 2;
  sim.n_fast = n_fast;
  sim.noise_enabled = spec.noise;
  sim.seed = spec.seed;
  sim.threads = spec.threads;

  const std::vector<PointTarget> targets{{s.target, spec.rcs, spec.snow_depth}};
  s.raw = simulate_echoes(s.pulse, s.geom, targets, s.budget, s.snow, sim);
  const ReferenceWaveform ref{s.pulse, s.cfg.occupied_bandwidth(), true};
  s.rc = range_compress(s.raw, ref, CompressionMethod::matched(), spec.threads);
  return s;
}

inline std::pair<std::size_t, std::size_t> peak_pixel(const SarImage& img) {
  std::size_t bi = 0, bj = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < img.grid.nx; ++i)
    for (std::size_t j = 0; j < img.grid.ny; ++j)
      if (std::norm(img.at(i, j)) > best) {
        best = std::norm(img.at(i, j));
        bi = i;
        bj = j;
      }
  return {bi, bj};
}

// PSLR of a 1-D cut: max magnitude outside the mainlobe (first local minima
// around the peak), relative to the peak.
inline double cut_pslr_db(const std::vector<double>& mag) {
  std::size_t peak = 0;
  for (std::size_t i = 1; i < mag.size(); ++i)
    if (mag[i] > mag[peak]) peak = i;
  std::size_t left = peak;
  while (left > 0 && mag[left - 1] < mag[left]) --left;
  std::size_t right = peak;
  while (right + 1 < mag.size() && mag[right + 1] < mag[right]) ++right;
  double side = 0.0;
  for (std::size_t i = 0; i < mag.size(); ++i)
    if (i < left || i > right) side = std::max(side, mag[i]);
  return 20.0 * std::log10(side / mag[peak]);
}

}  // namespace isar::testing
