#pragma once

// ofdm.hpp - OFDM symbol synthesis and demodulation.
//
// Conventions:
//  - unitary IDFT/DFT (1/sqrt(N) both ways), so signal energy equals
//    symbol-block energy and link-budget bookkeeping stays exact;
//  - active subcarriers sit symmetrically around DC, DC itself unused
//    (for 52 of 64: bins -26..-1 and +1..+26);
//  - input symbols fill subcarriers in increasing frequency order;
//  - rectangular pulse shaping (sampled boxcar over the symbol);
//  - cyclic prefix = last cp_samples of the body, prepended.

#include "isar/constellation.hpp"
#include "isar/fft.hpp"
#include "isar/types.hpp"

#include <vector>

namespace isar {

struct OfdmConfig {
  std::size_t m_fft = 64;        // IDFT size
  double delta_f = 120e3;        // subcarrier spacing, Hz
  std::size_t m_active = 52;     // used subcarriers
  std::size_t cp_samples = 12;   // cyclic prefix length, samples
  Constellation constellation{ConstellationOrder::Qpsk};

  double sample_rate() const { return static_cast<double>(m_fft) * delta_f; }
  double symbol_duration() const { return 1.0 / delta_f; }  // body only
  double cp_duration() const { return static_cast<double>(cp_samples) / sample_rate(); }
  double pulse_duration() const { return symbol_duration() + cp_duration(); }
  double occupied_bandwidth() const { return static_cast<double>(m_active) * delta_f; }
  double cp_fraction() const {
    return static_cast<double>(cp_samples) / static_cast<double>(m_fft);
  }
  std::size_t samples_per_symbol() const { return m_fft + cp_samples; }

  void set_cp_fraction(double fraction) {
    cp_samples = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(m_fft)));
  }

  /// Sub-6 GHz sidelink-style default profile: 64-point FFT, 120 kHz
  /// spacing, 52 active subcarriers, 12-sample CP, QPSK.
  static OfdmConfig sub6_default() { return OfdmConfig{}; }

  void validate() const {
    if (m_fft == 0) throw std::invalid_argument("OfdmConfig: m_fft must be positive");
    if (m_active == 0 || m_active > m_fft - 1)
      throw std::invalid_argument("OfdmConfig: need 1 <= m_active <= m_fft-1 (DC stays unused)");
    if (delta_f <= 0.0) throw std::invalid_argument("OfdmConfig: delta_f must be > 0");
  }
};

/// Signed subcarrier indices in fill order (increasing frequency, DC skipped).
inline std::vector<int> subcarrier_indices(const OfdmConfig& cfg) {
  cfg.validate();
  const int n_pos = static_cast<int>(cfg.m_active / 2);
  const int n_neg = static_cast<int>(cfg.m_active) - n_pos;
  std::vector<int> idx;
  idx.reserve(cfg.m_active);
  for (int m = -n_neg; m <= -1; ++m) idx.push_back(m);
  for (int m = 1; m <= n_pos; ++m) idx.push_back(m);
  return idx;
}

/// Modulate symbol blocks into a time-domain signal (CP attached per symbol).
/// Symbol count must be a multiple of m_active.
inline ComplexSignal ofdm_modulate(std::span<const Complex> symbols, const OfdmConfig& cfg) {
  cfg.validate();
  if (symbols.empty() || symbols.size() % cfg.m_active != 0)
    throw std::invalid_argument("ofdm_modulate: symbol count must be a positive multiple of m_active");

  const auto idx = subcarrier_indices(cfg);
  const std::size_t n_symbols = symbols.size() / cfg.m_active;
  const std::size_t out_per_symbol = cfg.samples_per_symbol();

  ComplexSignal out;
  out.sample_rate = cfg.sample_rate();
  out.t0 = 0.0;
  out.samples.resize(n_symbols * out_per_symbol);

  std::vector<Complex> freq(cfg.m_fft);
  for (std::size_t s = 0; s < n_symbols; ++s) {
    std::fill(freq.begin(), freq.end(), Complex{0.0, 0.0});
    for (std::size_t a = 0; a < cfg.m_active; ++a) {
      const int m = idx[a];
      const std::size_t bin = m >= 0 ? static_cast<std::size_t>(m)
                                     : cfg.m_fft - static_cast<std::size_t>(-m);
      freq[bin] = symbols[s * cfg.m_active + a];
    }
    std::vector<Complex> body = freq;
    fft::inverse_unitary(body);

    Complex* dst = out.samples.data() + s * out_per_symbol;
    for (std::size_t i = 0; i < cfg.cp_samples; ++i)
      dst[i] = body[cfg.m_fft - cfg.cp_samples + i];
    std::copy(body.begin(), body.end(), dst + cfg.cp_samples);
  }
  return out;
}

/// CP-free single-symbol pulse for radar use (the echo simulator and the
/// range compressor operate on the symbol body with known timing).
inline ComplexSignal ofdm_symbol_body(std::span<const Complex> symbols, const OfdmConfig& cfg) {
  OfdmConfig body_cfg = cfg;
  body_cfg.cp_samples = 0;
  return ofdm_modulate(symbols, body_cfg);
}

/// Recover subcarrier symbols from a modulated signal (genie timing: samples
/// start at the first CP sample). Inverse of ofdm_modulate for a clean channel.
inline std::vector<Complex> ofdm_demodulate(std::span<const Complex> samples,
                                            const OfdmConfig& cfg, std::size_t n_symbols) {
  cfg.validate();
  const std::size_t per_symbol = cfg.samples_per_symbol();
  if (samples.size() < n_symbols * per_symbol)
    throw std::invalid_argument("ofdm_demodulate: not enough samples");

  const auto idx = subcarrier_indices(cfg);
  std::vector<Complex> symbols;
  symbols.reserve(n_symbols * cfg.m_active);
  std::vector<Complex> body(cfg.m_fft);
  for (std::size_t s = 0; s < n_symbols; ++s) {
    const Complex* src = samples.data() + s * per_symbol + cfg.cp_samples;
    body.assign(src, src + cfg.m_fft);
    fft::forward_unitary(body);
    for (std::size_t a = 0; a < cfg.m_active; ++a) {
      const int m = idx[a];
      const std::size_t bin = m >= 0 ? static_cast<std::size_t>(m)
                                     : cfg.m_fft - static_cast<std::size_t>(-m);
      symbols.push_back(body[bin]);
    }
  }
  return symbols;
}

}  // namespace isar
