#pragma once

// constellation.hpp - Gray-coded square QAM mapping and hard-decision demapping.
//
// Fixed mapping, documented so bit-error measurements are reproducible:
// the bits of a symbol split into an I half and a Q half (I bits first,
// MSB first within each half). Each half is read as a Gray codeword g;
// the axis amplitude is (L-1) - 2*gray_to_binary(g) with L = sqrt(M)
// levels, then the point is scaled so the alphabet has unit average
// energy. For QPSK this gives 00 -> (1+j)/sqrt(2), 01 -> (1-j)/sqrt(2),
// 10 -> (-1+j)/sqrt(2), 11 -> (-1-j)/sqrt(2).

#include "isar/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace isar {

enum class ConstellationOrder : int { Qpsk = 4, Qam16 = 16, Qam64 = 64, Qam256 = 256 };

struct Constellation {
  ConstellationOrder order = ConstellationOrder::Qpsk;

  int points() const { return static_cast<int>(order); }
  int bits_per_symbol() const {
    switch (order) {
      case ConstellationOrder::Qpsk: return 2;
      case ConstellationOrder::Qam16: return 4;
      case ConstellationOrder::Qam64: return 6;
      case ConstellationOrder::Qam256: return 8;
    }
    throw std::invalid_argument("Constellation: unknown order");
  }
  int side() const { return 1 << (bits_per_symbol() / 2); }  // levels per axis

  // Unit average alphabet energy: E{|s|^2} = 2(L^2-1)/3 before scaling.
  double normalization() const {
    const double m = static_cast<double>(points());
    return std::sqrt(3.0 / (2.0 * (m - 1.0)));
  }
};

namespace detail {

inline unsigned gray_to_binary(unsigned g) {
  for (unsigned shift = 1; shift < 16; shift <<= 1) g ^= g >> shift;
  return g;
}

inline unsigned binary_to_gray(unsigned b) { return b ^ (b >> 1); }

// Amplitude for one axis from its Gray-coded bit group.
inline double axis_amplitude(unsigned gray_bits, int levels) {
  const unsigned k = gray_to_binary(gray_bits);
  return static_cast<double>(levels - 1) - 2.0 * static_cast<double>(k);
}

// Nearest level index (exact minimum-distance slicing on a square grid).
inline unsigned slice_axis(double amp, int levels) {
  const double k = (static_cast<double>(levels - 1) - amp) / 2.0;
  const long idx = std::lround(k);
  return static_cast<unsigned>(std::clamp<long>(idx, 0, levels - 1));
}

}  // namespace detail

/// Map a 0/1 bit sequence to constellation symbols.
/// Bit count must be divisible by bits_per_symbol.
inline std::vector<Complex> map_bits(std::span<const std::uint8_t> bits, const Constellation& c) {
  const int bps = c.bits_per_symbol();
  if (bits.size() % static_cast<std::size_t>(bps) != 0)
    throw std::invalid_argument("map_bits: bit count not divisible by bits per symbol");
  const int half = bps / 2;
  const int levels = c.side();
  const double norm = c.normalization();

  std::vector<Complex> symbols;
  symbols.reserve(bits.size() / bps);
  for (std::size_t i = 0; i < bits.size(); i += bps) {
    unsigned gi = 0, gq = 0;
    for (int b = 0; b < half; ++b) gi = (gi << 1) | (bits[i + b] & 1u);
    for (int b = 0; b < half; ++b) gq = (gq << 1) | (bits[i + half + b] & 1u);
    symbols.emplace_back(norm * detail::axis_amplitude(gi, levels),
                         norm * detail::axis_amplitude(gq, levels));
  }
  return symbols;
}

/// Minimum-Euclidean-distance hard decision back to bits.
inline std::vector<std::uint8_t> demap_symbols(std::span<const Complex> symbols,
                                               const Constellation& c) {
  const int bps = c.bits_per_symbol();
  const int half = bps / 2;
  const int levels = c.side();
  const double norm = c.normalization();

  std::vector<std::uint8_t> bits;
  bits.reserve(symbols.size() * bps);
  for (const Complex& s : symbols) {
    const unsigned ki = detail::slice_axis(s.real() / norm, levels);
    const unsigned kq = detail::slice_axis(s.imag() / norm, levels);
    const unsigned gi = detail::binary_to_gray(ki);
    const unsigned gq = detail::binary_to_gray(kq);
    for (int b = half - 1; b >= 0; --b) bits.push_back((gi >> b) & 1u);
    for (int b = half - 1; b >= 0; --b) bits.push_back((gq >> b) & 1u);
  }
  return bits;
}

/// Full alphabet in bit-pattern order (index = bits read MSB first).
inline std::vector<Complex> constellation_alphabet(const Constellation& c) {
  const int bps = c.bits_per_symbol();
  std::vector<std::uint8_t> bits;
  bits.reserve(static_cast<std::size_t>(c.points()) * bps);
  for (int v = 0; v < c.points(); ++v)
    for (int b = bps - 1; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((v >> b) & 1));
  return map_bits(bits, c);
}

inline Constellation parse_constellation(std::string_view name) {
  if (name == "qpsk") return {ConstellationOrder::Qpsk};
  if (name == "qam16") return {ConstellationOrder::Qam16};
  if (name == "qam64") return {ConstellationOrder::Qam64};
  if (name == "qam256") return {ConstellationOrder::Qam256};
  throw std::invalid_argument("unknown constellation: " + std::string(name));
}

inline std::string constellation_name(const Constellation& c) {
  switch (c.order) {
    case ConstellationOrder::Qpsk: return "qpsk";
    case ConstellationOrder::Qam16: return "qam16";
    case ConstellationOrder::Qam64: return "qam64";
    case ConstellationOrder::Qam256: return "qam256";
  }
  return "?";
}

}  // namespace isar
