#pragma once

// analysis.hpp - link-budget KPI chain (range-compressed and focused SNR,
// NESZ, resolutions) and the BER measurement / KPI sweep engines.
//
// The communication link uses one-way Friis with one pass of snow loss and
// genie per-subcarrier equalization at the receiver; the sensing KPIs use
// the two-way radar chain from link_budget.hpp.

#include "isar/constellation.hpp"
#include "isar/link_budget.hpp"
#include "isar/ofdm.hpp"
#include "isar/parallel.hpp"
#include "isar/rng.hpp"
#include "isar/types.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace isar {

inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

/// 95% (by default) Wilson score interval for k successes in n trials.
inline WilsonInterval wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054) {
  if (n == 0) throw std::invalid_argument("wilson_interval: n must be > 0");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Radar pulse bookkeeping: one OFDM symbol per pulse (symbol-based) or a
/// frame of N symbols per pulse (frame-based). Both run at 100% duty, so
/// t_p * prf = 1 and the focused SNR is identical between the two modes.
struct PulseDefinition {
  enum class Mode { SymbolBased, FrameBased };
  Mode mode = Mode::SymbolBased;
  std::size_t n_symbols = 1;
  double t_symbol = 8e-6;  // full symbol duration incl. CP, seconds

  static PulseDefinition symbol_based(double symbol_duration) {
    if (symbol_duration <= 0.0)
      throw std::invalid_argument("PulseDefinition: symbol duration must be > 0");
    return {Mode::SymbolBased, 1, symbol_duration};
  }
  static PulseDefinition frame_based(double symbol_duration, std::size_t n_symbols) {
    if (symbol_duration <= 0.0 || n_symbols == 0)
      throw std::invalid_argument("PulseDefinition: need positive duration and n_symbols");
    return {Mode::FrameBased, n_symbols, symbol_duration};
  }

  double pulse_duration() const { return t_symbol * static_cast<double>(n_symbols); }
  double prf() const { return 1.0 / pulse_duration(); }
};

inline double snr_range_compressed(double p_rx, double t_p, double n0) {
  if (p_rx <= 0.0 || t_p <= 0.0 || n0 <= 0.0)
    throw std::invalid_argument("snr_range_compressed: all inputs must be > 0");
  return p_rx * t_p / n0;
}

inline double snr_focused(double snr_rc, std::size_t n_tau) {
  if (n_tau == 0) throw std::invalid_argument("snr_focused: n_tau must be >= 1");
  return snr_rc * static_cast<double>(n_tau);
}

struct Resolutions {
  double rho_rg = 0.0;  // meters
  double rho_az = 0.0;  // meters
};

/// Standard SAR resolution formulas: rho_rg = c/(2B), rho_az = lambda R / (2 L).
inline Resolutions resolutions(double occupied_bandwidth, double wavelength,
                               double aperture_length, double range) {
  if (occupied_bandwidth <= 0.0 || wavelength <= 0.0 || aperture_length <= 0.0 || range <= 0.0)
    throw std::invalid_argument("resolutions: all inputs must be > 0");
  return {constants::speed_of_light / (2.0 * occupied_bandwidth),
          wavelength * range / (2.0 * aperture_length)};
}

/// Noise-equivalent sigma zero in dB: the normalized backscatter giving unit
/// focused SNR. Evaluated by running the SNR chain at sigma = rho_rg * rho_az
/// (one resolution cell of sigma0 = 1).
inline double nesz_db(const LinkBudget& budget, double slant_range,
                      const PulseDefinition& pulse, std::size_t n_tau,
                      const Resolutions& res, const SnowModel& snow, double depth_m) {
  if (res.rho_rg <= 0.0 || res.rho_az <= 0.0)
    throw std::invalid_argument("nesz: resolutions must be > 0");
  const double sigma_cell = res.rho_rg * res.rho_az;
  const double p_rx = received_power(budget, sigma_cell, slant_range, snow, depth_m);
  const double snr = snr_focused(
      snr_range_compressed(p_rx, pulse.pulse_duration(), budget.noise_psd()), n_tau);
  return -linear_to_db(snr);
}

// ---------------------------------------------------------------------------
// BER measurement
// ---------------------------------------------------------------------------

struct BerResult {
  double ber = 0.0;
  WilsonInterval ci;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits = 0;
};

/// One-way communication link to a (possibly buried) user.
struct CommLink {
  LinkBudget budget;
  SnowModel snow;
  double snow_depth = 0.0;  // meters
  double range = 100.0;     // meters, tx->user

  // P_rx = EIRP * G_rx * lambda^2 / (4 pi R)^2, one pass of snow and
  // directivity loss.
  double rx_power() const {
    budget.validate();
    snow.validate();
    if (range <= 0.0) throw std::invalid_argument("CommLink: range must be > 0");
    const double l = budget.wavelength();
    const double spread = 4.0 * M_PI * range;
    const double loss_db = snow.one_way_loss_db(snow_depth) + budget.directivity_loss_db;
    return budget.eirp_watts() * budget.g_rx_linear() * l * l / (spread * spread) *
           db_to_linear(-loss_db);
  }

  // Per-subcarrier symbol SNR: the received power splits across m_active
  // subcarriers, each facing noise N0 * delta_f.
  double es_n0(const OfdmConfig& cfg) const {
    return rx_power() /
           (static_cast<double>(cfg.m_active) * cfg.delta_f * budget.noise_psd());
  }
};

namespace detail {

// End-to-end OFDM link at a given amplitude gain and per-sample complex noise
// variance: bits -> map -> modulate (CP on) -> channel -> genie equalize ->
// demap -> count errors. min_bits is rounded up to whole OFDM symbols.
inline BerResult run_ber(const OfdmConfig& cfg, double gain, double noise_var,
                         std::uint64_t min_bits, std::uint64_t seed) {
  cfg.validate();
  if (min_bits == 0) throw std::invalid_argument("ber: zero bits requested");
  const int bps = cfg.constellation.bits_per_symbol();
  const std::uint64_t bits_per_block =
      static_cast<std::uint64_t>(cfg.m_active) * static_cast<std::uint64_t>(bps);
  const std::uint64_t n_blocks = (min_bits + bits_per_block - 1) / bits_per_block;

  std::uint64_t errors = 0;
  std::vector<std::uint8_t> bits(bits_per_block);
  for (std::uint64_t blk = 0; blk < n_blocks; ++blk) {
    Rng rng(derive_seed(seed, "ber", blk));
    for (auto& b : bits) b = rng.next_bit() ? 1 : 0;

    const auto symbols = map_bits(bits, cfg.constellation);
    ComplexSignal tx = ofdm_modulate(symbols, cfg);
    for (auto& s : tx.samples) s = s * gain + rng.complex_normal(noise_var);

    auto rx_symbols = ofdm_demodulate(tx.samples, cfg, 1);
    for (auto& s : rx_symbols) s /= gain;  // genie equalization
    const auto rx_bits = demap_symbols(rx_symbols, cfg.constellation);
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i] != rx_bits[i]) ++errors;
  }

  BerResult r;
  r.bits = n_blocks * bits_per_block;
  r.bit_errors = errors;
  r.ber = static_cast<double>(errors) / static_cast<double>(r.bits);
  r.ci = wilson_interval(errors, r.bits);
  return r;
}

}  // namespace detail

/// BER over a pure AWGN channel at the given Eb/N0.
inline BerResult measure_ber_awgn(const OfdmConfig& cfg, double eb_n0_db,
                                  std::uint64_t min_bits, std::uint64_t seed) {
  const double es_n0 =
      db_to_linear(eb_n0_db) * static_cast<double>(cfg.constellation.bits_per_symbol());
  return detail::run_ber(cfg, 1.0, 1.0 / es_n0, min_bits, seed);
}

/// BER through the one-way link budget (Friis + snow + AWGN).
inline BerResult measure_ber_link(const CommLink& link, const OfdmConfig& cfg,
                                  std::uint64_t min_bits, std::uint64_t seed) {
  // Time-domain scale for the target received power; the noise floor rides
  // at N0 * fs per complex sample.
  const double mean_tx_power =
      static_cast<double>(cfg.m_active) / static_cast<double>(cfg.m_fft);
  const double gain = std::sqrt(link.rx_power() / mean_tx_power);
  const double noise_var = link.budget.noise_psd() * cfg.sample_rate();
  return detail::run_ber(cfg, gain, noise_var, min_bits, seed);
}

// ---------------------------------------------------------------------------
// KPI sweeps
// ---------------------------------------------------------------------------

enum class SweepVariable { Eirp, Altitude, SnowDepth };

inline SweepVariable parse_sweep_variable(std::string_view name) {
  if (name == "eirp") return SweepVariable::Eirp;
  if (name == "altitude") return SweepVariable::Altitude;
  if (name == "snow_depth") return SweepVariable::SnowDepth;
  throw std::invalid_argument("unknown sweep variable: " + std::string(name));
}

inline std::string sweep_variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::Eirp: return "eirp";
    case SweepVariable::Altitude: return "altitude";
    case SweepVariable::SnowDepth: return "snow_depth";
  }
  return "?";
}

/// Fixed scenario plus the variable to sweep. Resolutions stay fixed across
/// the sweep so the NESZ isolates the pure link-budget dependence.
struct KpiSweepSpec {
  SweepVariable variable = SweepVariable::Eirp;
  double start = 0.0, stop = 23.0, step = 1.0;

  LinkBudget budget;
  SnowModel snow;
  double snow_depth = 0.0;     // meters
  double altitude = 100.0;     // meters
  double off_nadir_deg = 45.0;
  PulseDefinition pulse = PulseDefinition::symbol_based(8e-6);
  std::size_t n_tau = 1000;
  Resolutions res{24.0, 0.4};

  double slant_range(double alt) const {
    return alt / std::cos(off_nadir_deg * M_PI / 180.0);
  }

  std::vector<double> values() const {
    if (step <= 0.0) throw std::invalid_argument("KpiSweepSpec: step must be > 0");
    if (stop < start) throw std::invalid_argument("KpiSweepSpec: empty range");
    std::vector<double> v;
    for (double x = start; x <= stop + 1e-9 * step; x += step) v.push_back(x);
    return v;
  }
};

struct SweepPoint {
  double value = 0.0;
  double nesz_db = 0.0;
  double ber = std::numeric_limits<double>::quiet_NaN();
  double ber_ci_low = std::numeric_limits<double>::quiet_NaN();
  double ber_ci_high = std::numeric_limits<double>::quiet_NaN();
};

/// Evaluate NESZ (always) and BER (when n_bits > 0) across the sweep.
/// Points are independent and run in parallel with per-point seeds.
inline std::vector<SweepPoint> kpi_sweep(const KpiSweepSpec& spec, const OfdmConfig& cfg,
                                         std::uint64_t n_bits, std::uint64_t seed,
                                         unsigned threads = 0) {
  const auto values = spec.values();
  std::vector<SweepPoint> points(values.size());

  parallel_for_chunks(values.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      KpiSweepSpec s = spec;
      double depth = s.snow_depth;
      double alt = s.altitude;
      switch (s.variable) {
        case SweepVariable::Eirp: s.budget.eirp_dbm = values[i]; break;
        case SweepVariable::Altitude: alt = values[i]; break;
        case SweepVariable::SnowDepth: depth = values[i]; break;
      }

      SweepPoint& p = points[i];
      p.value = values[i];
      p.nesz_db = nesz_db(s.budget, s.slant_range(alt), s.pulse, s.n_tau, s.res, s.snow, depth);
      if (n_bits > 0) {
        CommLink link{s.budget, s.snow, depth, s.slant_range(alt)};
        const BerResult r =
            measure_ber_link(link, cfg, n_bits, derive_seed(seed, "sweep", i));
        p.ber = r.ber;
        p.ber_ci_low = r.ci.low;
        p.ber_ci_high = r.ci.high;
      }
    }
  });
  return points;
}

}  // namespace isar
