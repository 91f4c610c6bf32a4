#include "isar/chirp.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace isar;

namespace {

// Direct time-domain autocorrelation oracle: r[l] = sum_n x[n] conj(x[n-l]).
std::vector<double> autocorr_magnitude(const std::vector<Complex>& x) {
  const long n = static_cast<long>(x.size());
  std::vector<double> mag(2 * n - 1);
  for (long lag = -(n - 1); lag <= n - 1; ++lag) {
    Complex acc{0.0, 0.0};
    for (long i = std::max(0l, lag); i < std::min(n, n + lag); ++i)
      acc += x[i] * std::conj(x[i - lag]);
    mag[lag + n - 1] = std::abs(acc);
  }
  return mag;
}

// -3 dB width around the central peak, linear interpolation between samples.
double width_at_3db(const std::vector<double>& mag, double dt) {
  const std::size_t peak = mag.size() / 2;
  const double thr = mag[peak] / std::sqrt(2.0);
  double xl = 0.0, xr = 0.0;
  for (std::size_t i = peak; i > 0; --i)
    if (mag[i - 1] < thr) {
      xl = static_cast<double>(i - 1) + (thr - mag[i - 1]) / (mag[i] - mag[i - 1]);
      break;
    }
  for (std::size_t i = peak; i + 1 < mag.size(); ++i)
    if (mag[i + 1] < thr) {
      xr = static_cast<double>(i) + (mag[i] - thr) / (mag[i] - mag[i + 1]);
      break;
    }
  return (xr - xl) * dt;
}

}  // namespace

TEST_CASE("chirp sample count and unit modulus") {
  const ChirpConfig cfg{40e6, 10e-6, 50e6};
  const auto sig = generate_chirp(cfg);
  REQUIRE(sig.size() == 500);
  for (const auto& s : sig.samples) REQUIRE(std::abs(std::abs(s) - 1.0) < 1e-14);
  REQUIRE(std::abs(sig.t0 + 5e-6) < 1e-15);
}

TEST_CASE("chirp rate definition") {
  const ChirpConfig cfg{40e6, 10e-6, 50e6};
  REQUIRE(std::abs(cfg.chirp_rate() - 4e12) < 1.0);
}

TEST_CASE("instantaneous frequency sweeps -B/2 to +B/2") {
  const ChirpConfig cfg{4e6, 20e-6, 32e6};
  const auto sig = generate_chirp(cfg);
  auto inst_freq = [&](std::size_t i) {
    const double dphi = std::arg(sig.samples[i + 1] * std::conj(sig.samples[i]));
    return dphi * cfg.sample_rate / (2.0 * M_PI);
  };
  // Center: near zero; edges: near +/- B/2.
  const std::size_t n = sig.size();
  REQUIRE(std::abs(inst_freq(n / 2)) < cfg.bandwidth / n);
  REQUIRE(std::abs(inst_freq(0) + cfg.bandwidth / 2.0) < 2.0 * cfg.bandwidth / n);
  REQUIRE(std::abs(inst_freq(n - 2) - cfg.bandwidth / 2.0) < 2.0 * cfg.bandwidth / n);
}

TEST_CASE("autocorrelation: peak at zero lag, -3 dB width 0.886/B within 5%") {
  // Oversampled so the mainlobe is resolvable on the lag grid.
  const ChirpConfig cfg{5e6, 20e-6, 40e6};
  const auto sig = generate_chirp(cfg);
  const auto mag = autocorr_magnitude(sig.samples);

  std::size_t peak = 0;
  for (std::size_t i = 1; i < mag.size(); ++i)
    if (mag[i] > mag[peak]) peak = i;
  REQUIRE(peak == mag.size() / 2);  // lag 0

  const double width = width_at_3db(mag, 1.0 / cfg.sample_rate);
  const double expected = 0.886 / cfg.bandwidth;
  REQUIRE(std::abs(width - expected) < 0.05 * expected);
}

TEST_CASE("chirp validation") {
  REQUIRE_THROWS_AS(generate_chirp(ChirpConfig{-1.0, 10e-6, 50e6}), std::invalid_argument);
  REQUIRE_THROWS_AS(generate_chirp(ChirpConfig{40e6, 0.0, 50e6}), std::invalid_argument);
  REQUIRE_THROWS_AS(generate_chirp(ChirpConfig{40e6, 10e-6, 20e6}), std::invalid_argument);
}
