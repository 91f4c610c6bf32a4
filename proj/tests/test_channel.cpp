#include "isar/channel.hpp"
#include "isar/compression.hpp"
#include "isar/ofdm.hpp"
#include "isar/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace isar;

namespace {

ComplexSignal radar_pulse(const OfdmConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> bits(cfg.m_active * cfg.constellation.bits_per_symbol());
  for (auto& b : bits) b = rng.next_bit();
  return ofdm_symbol_body(map_bits(bits, cfg.constellation), cfg);
}

}  // namespace

TEST_CASE("delayed replica: integer sample shifts are exact") {
  ComplexSignal pulse;
  pulse.sample_rate = 1e6;
  pulse.t0 = 0.0;
  Rng rng(3);
  pulse.samples.resize(16);
  for (auto& s : pulse.samples) s = rng.complex_normal(1.0);

  const double tau = 5.0 / pulse.sample_rate;
  const auto out = delayed_replica(pulse, tau, 0.0, 64);
  for (std::size_t i = 0; i < 64; ++i) {
    const Complex expected = (i >= 5 && i < 21) ? pulse.samples[i - 5] : Complex{0.0, 0.0};
    REQUIRE(std::abs(out[i] - expected) < 1e-12);
  }
}

TEST_CASE("static platform, noise disabled: every pulse row identical") {
  const auto cfg = OfdmConfig::sub6_default();
  const auto pulse = radar_pulse(cfg, 1);
  auto traj = make_linear_trajectory({0, 0, 100}, {0, 0, 0}, 1e3, 8);
  const auto geom = BistaticGeometry::monostatic(traj);
  const std::vector<PointTarget> targets{{{0, 0, 0}, 1.0, 0.0}};
  LinkBudget budget;
  SnowModel snow;

  EchoSimConfig sim;
  sim.fast_time_origin = 0.0;
  sim.n_fast = 128;
  sim.noise_enabled = false;
  const auto rx = simulate_echoes(pulse, geom, targets, budget, snow, sim);
  for (std::size_t k = 1; k < rx.n_pulses; ++k) {
    const auto a = rx.row(0), b = rx.row(k);
    for (std::size_t i = 0; i < rx.n_fast; ++i) REQUIRE(a[i] == b[i]);
  }
}

TEST_CASE("matched-filter peak lands at the two-way delay (direct peak search oracle)") {
  const auto cfg = OfdmConfig::sub6_default();
  const auto pulse = radar_pulse(cfg, 2);
  auto traj = make_linear_trajectory({-8, 0, 150}, {10, 0, 0}, 500.0, 16);
  const auto geom = BistaticGeometry::monostatic(traj);
  const Vec3 target_pos{0, 150, 0};
  const std::vector<PointTarget> targets{{target_pos, 1.0, 0.0}};
  LinkBudget budget;
  SnowModel snow;

  EchoSimConfig sim;
  sim.fast_time_origin = 0.0;
  sim.n_fast = 256;
  sim.noise_enabled = false;
  const auto rx = simulate_echoes(pulse, geom, targets, budget, snow, sim);

  const ReferenceWaveform ref{pulse, cfg.occupied_bandwidth(), true};
  const auto rc = range_compress(rx, ref, CompressionMethod::matched());
  REQUIRE(rc.range_compressed);

  for (std::size_t k = 0; k < rc.n_pulses; ++k) {
    const auto row = rc.row(k);
    std::size_t peak = 0;
    for (std::size_t i = 1; i < row.size(); ++i)
      if (std::abs(row[i]) > std::abs(row[peak])) peak = i;
    const double t_peak = rc.fast_time(peak);
    const double tau = geom.path_length(k, target_pos) / constants::speed_of_light;
    REQUIRE(std::abs(t_peak - tau) <= 0.5 / rc.sample_rate);
  }
}

TEST_CASE("noise-only run calibrates to N0 * fs per sample") {
  const auto cfg = OfdmConfig::sub6_default();
  const auto pulse = radar_pulse(cfg, 3);
  auto traj = make_linear_trajectory({0, 0, 100}, {0, 0, 0}, 1e3, 10);
  const auto geom = BistaticGeometry::monostatic(traj);
  LinkBudget budget;
  SnowModel snow;

  EchoSimConfig sim;
  sim.fast_time_origin = 0.0;
  sim.n_fast = 131072;  // 10 * 131072 > 1e6 samples
  sim.seed = 99;
  const auto rx = simulate_echoes(pulse, geom, {}, budget, snow, sim);

  double acc = 0.0;
  for (const auto& v : rx.data) acc += std::norm(v);
  const double measured = acc / static_cast<double>(rx.data.size());
  const double expected = budget.noise_psd() * cfg.sample_rate();
  REQUIRE(std::abs(measured - expected) < 0.03 * expected);
}

TEST_CASE("echoes superpose linearly") {
  const auto cfg = OfdmConfig::sub6_default();
  const auto pulse = radar_pulse(cfg, 4);
  auto traj = make_linear_trajectory({-4, 0, 120}, {8, 0, 0}, 400.0, 8);
  const auto geom = BistaticGeometry::monostatic(traj);
  LinkBudget budget;
  SnowModel snow;
  const PointTarget t1{{0, 120, 0}, 1.0, 0.0};
  const PointTarget t2{{5, 128, 0}, 2.5, 0.0};

  EchoSimConfig sim;
  sim.fast_time_origin = 0.0;
  sim.n_fast = 256;
  sim.noise_enabled = false;
  const auto both = simulate_echoes(pulse, geom, {t1, t2}, budget, snow, sim);
  const auto only1 = simulate_echoes(pulse, geom, {t1}, budget, snow, sim);
  const auto only2 = simulate_echoes(pulse, geom, {t2}, budget, snow, sim);

  double max_ref = 0.0;
  for (const auto& v : both.data) max_ref = std::max(max_ref, std::abs(v));
  for (std::size_t i = 0; i < both.data.size(); ++i) {
    const Complex sum = only1.data[i] + only2.data[i];
    REQUIRE(std::abs(both.data[i] - sum) <= 1e-9 * max_ref);
  }
}

TEST_CASE("identical seed reproduces bit-identical data for any thread count") {
  const auto cfg = OfdmConfig::sub6_default();
  const auto pulse = radar_pulse(cfg, 5);
  auto traj = make_linear_trajectory({-4, 0, 100}, {8, 0, 0}, 400.0, 12);
  const auto geom = BistaticGeometry::monostatic(traj);
  LinkBudget budget;
  SnowModel snow;
  const std::vector<PointTarget> targets{{{0, 100, 0}, 1.0, 0.0}};

  EchoSimConfig sim;
  sim.fast_time_origin = 0.0;
  sim.n_fast = 256;
  sim.seed = 1234;
  sim.threads = 1;
  const auto a = simulate_echoes(pulse, geom, targets, budget, snow, sim);
  const auto b = simulate_echoes(pulse, geom, targets, budget, snow, sim);
  sim.threads = 3;
  const auto c = simulate_echoes(pulse, geom, targets, budget, snow, sim);
  REQUIRE(a.data == b.data);
  REQUIRE(a.data == c.data);

  sim.seed = 1235;
  sim.threads = 1;
  const auto d = simulate_echoes(pulse, geom, targets, budget, snow, sim);
  REQUIRE(a.data != d.data);
}

TEST_CASE("a target outside the fast-time window is reported by index") {
  const auto cfg = OfdmConfig::sub6_default();
  const auto pulse = radar_pulse(cfg, 6);
  auto traj = make_linear_trajectory({0, 0, 100}, {0, 0, 0}, 1e3, 2);
  const auto geom = BistaticGeometry::monostatic(traj);
  LinkBudget budget;
  SnowModel snow;
  const std::vector<PointTarget> targets{{{0, 100, 0}, 1.0, 0.0},
                                         {{0, 5000, 0}, 1.0, 0.0}};

  EchoSimConfig sim;
  sim.fast_time_origin = 0.0;
  sim.n_fast = 256;
  sim.noise_enabled = false;
  try {
    simulate_echoes(pulse, geom, targets, budget, snow, sim);
    FAIL("expected an out-of-window error");
  } catch (const std::invalid_argument& e) {
    REQUIRE(std::string(e.what()).find("target 1") != std::string::npos);
  }
}

TEST_CASE("compressed-peak SNR matches P_RX T_p / N0 over 100 noise seeds") {
  OfdmConfig cfg;
  cfg.m_fft = 128;
  cfg.m_active = 52;
  cfg.delta_f = 120e3;
  cfg.cp_samples = 0;
  const auto pulse = radar_pulse(cfg, 7);
  const double fs = cfg.sample_rate();

  LinkBudget budget;
  budget.eirp_dbm = 20.0;
  budget.g_rx_dbi = 40.0;
  SnowModel snow;

  const double height = 234.0;
  const double tau = 2.0 * height / constants::speed_of_light;
  auto traj = make_linear_trajectory({0, 0, height}, {0, 0, 0}, 1e3, 100);
  const auto geom = BistaticGeometry::monostatic(traj);
  const std::vector<PointTarget> targets{{{0, 0, 0}, 1.0, 0.0}};

  EchoSimConfig sim;
  sim.fast_time_origin = tau;  // echo occupies the whole window, peak at bin 0
  sim.n_fast = pulse.size();
  sim.seed = 77;
  const auto rx = simulate_echoes(pulse, geom, targets, budget, snow, sim);
  const auto noise_only = simulate_echoes(pulse, geom, {}, budget, snow, sim);

  const ReferenceWaveform ref{pulse, cfg.occupied_bandwidth(), true};
  const auto rc = range_compress(rx, ref, CompressionMethod::matched());
  const auto rc_noise = range_compress(noise_only, ref, CompressionMethod::matched());

  double peak_acc = 0.0;
  for (std::size_t k = 0; k < rc.n_pulses; ++k) {
    const auto row = rc.row(k);
    double best = 0.0;
    for (const auto& v : row) best = std::max(best, std::norm(v));
    peak_acc += best;
  }
  double noise_acc = 0.0;
  for (const auto& v : rc_noise.data) noise_acc += std::norm(v);

  const double snr_measured =
      (peak_acc / static_cast<double>(rc.n_pulses)) /
      (noise_acc / static_cast<double>(rc_noise.data.size()));

  const double p_rx = received_power(budget, 1.0, height, snow, 0.0);
  const double t_p = pulse.duration();
  const double snr_theory = p_rx * t_p / budget.noise_psd();

  REQUIRE(std::abs(linear_to_db(snr_measured) - linear_to_db(snr_theory)) < 0.5);
}
