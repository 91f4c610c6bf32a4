#pragma once

// io.hpp - file formats: the .isar binary data container, trajectory CSV,
// image exports (16-bit PGM, CSV), sweep CSV, and the run manifest.
//
// .isar container layout (little endian):
//   bytes 0-3   magic "ISAR"
//   bytes 4-5   version (u16, currently 1)
//   bytes 6-9   n_pulses (u32)
//   bytes 10-13 n_fast (u32)
//   bytes 14-15 flags (u16, bit 0 = range-compressed)
//   then n_pulses * n_fast float32 I/Q pairs, row-major.
// A text sidecar "<file>.meta" carries sample_rate, fast_time_origin and the
// trajectory file path. No format carries timestamps, so identical runs
// produce byte-identical files.

#include "isar/focusing.hpp"
#include "isar/geometry.hpp"
#include "isar/rng.hpp"
#include "isar/types.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace isar {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}
inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void put_f32(std::string& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}
inline float get_f32(const unsigned char* p) {
  const std::uint32_t bits = get_u32(p);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace detail

/// Deterministic textual form for doubles (12 significant digits).
inline std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string fnv1a64_hex(const std::string& bytes) {
  const std::uint64_t h = fnv1a64(bytes.data(), bytes.size());
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// .isar container
// ---------------------------------------------------------------------------

inline constexpr std::uint16_t kIsarVersion = 1;

inline void write_isar(const std::string& path, const RawDataMatrix& m,
                       const std::string& trajectory_path = "-") {
  m.validate();
  std::string out;
  out.reserve(16 + m.data.size() * 8);
  out += "ISAR";
  detail::put_u16(out, kIsarVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(m.n_pulses));
  detail::put_u32(out, static_cast<std::uint32_t>(m.n_fast));
  detail::put_u16(out, m.range_compressed ? 1 : 0);
  for (const Complex& v : m.data) {
    detail::put_f32(out, static_cast<float>(v.real()));
    detail::put_f32(out, static_cast<float>(v.imag()));
  }
  write_file_bytes(path, out);

  std::string meta;
  meta += "sample_rate = " + format_double(m.sample_rate) + "\n";
  meta += "fast_time_origin = " + format_double(m.fast_time_origin) + "\n";
  meta += "trajectory = " + trajectory_path + "\n";
  write_file_bytes(path + ".meta", meta);
}

/// Reads the container plus its sidecar; slow times are not stored and must
/// be re-attached from the trajectory file.
inline RawDataMatrix read_isar(const std::string& path, std::string* trajectory_path = nullptr) {
  const std::string bytes = read_file_bytes(path);
  if (bytes.size() < 16 || bytes.compare(0, 4, "ISAR") != 0)
    throw IoError("not an ISAR container: " + path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint16_t version = detail::get_u16(p + 4);
  if (version != kIsarVersion)
    throw IoError("unsupported ISAR version " + std::to_string(version) + ": " + path);
  const std::uint32_t n_pulses = detail::get_u32(p + 6);
  const std::uint32_t n_fast = detail::get_u32(p + 10);
  const std::uint16_t flags = detail::get_u16(p + 14);
  const std::size_t expected = 16 + static_cast<std::size_t>(n_pulses) * n_fast * 8;
  if (bytes.size() != expected) throw IoError("truncated ISAR container: " + path);

  RawDataMatrix m(n_pulses, n_fast);
  m.range_compressed = (flags & 1) != 0;
  const unsigned char* q = p + 16;
  for (std::size_t i = 0; i < m.data.size(); ++i, q += 8)
    m.data[i] = Complex{detail::get_f32(q), detail::get_f32(q + 4)};

  std::ifstream meta(path + ".meta");
  if (meta) {
    std::string line;
    while (std::getline(meta, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(0, line.find_last_not_of(" \t", eq - 1) + 1);
      std::string value = line.substr(eq + 1);
      const auto b = value.find_first_not_of(" \t");
      value = b == std::string::npos ? "" : value.substr(b);
      if (key == "sample_rate") m.sample_rate = std::stod(value);
      else if (key == "fast_time_origin") m.fast_time_origin = std::stod(value);
      else if (key == "trajectory" && trajectory_path) *trajectory_path = value;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Trajectory CSV
// ---------------------------------------------------------------------------

inline void write_trajectory_csv(const std::string& path, const Trajectory& t) {
  t.validate();
  std::string out = "tau_s,x_m,y_m,z_m\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    out += format_double(t.slow_times[k]) + "," + format_double(t.positions[k].x) + "," +
           format_double(t.positions[k].y) + "," + format_double(t.positions[k].z) + "\n";
  }
  write_file_bytes(path, out);
}

inline Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("tau_s,x_m,y_m,z_m", 0) != 0)
    throw IoError("trajectory file missing 'tau_s,x_m,y_m,z_m' header: " + path);

  Trajectory t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double v[4];
    std::size_t pos = 0;
    for (int c = 0; c < 4; ++c) {
      const auto comma = c < 3 ? line.find(',', pos) : line.size();
      if (comma == std::string::npos) throw IoError("bad trajectory row: " + line);
      v[c] = std::stod(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    t.slow_times.push_back(v[0]);
    t.positions.push_back({v[1], v[2], v[3]});
  }
  if (t.size() >= 2) {
    const double d0 = t.slow_times[1] - t.slow_times[0];
    bool uniform = d0 > 0.0;
    for (std::size_t k = 1; k + 1 < t.size() && uniform; ++k)
      uniform = std::abs((t.slow_times[k + 1] - t.slow_times[k]) - d0) <= 1e-9;
    t.uniform = uniform;
    t.pri = uniform ? d0 : 0.0;
  } else {
    t.uniform = true;
    t.pri = 0.0;
  }
  t.validate();
  return t;
}

// ---------------------------------------------------------------------------
// Image exports
// ---------------------------------------------------------------------------

/// Magnitude in dB as a 16-bit PGM: the top `dynamic_db` decibels below the
/// image peak map linearly onto [0, 65535].
inline void write_image_pgm(const std::string& path, const SarImage& img,
                            double dynamic_db = 60.0) {
  if (img.pixels.empty()) throw IoError("write_image_pgm: empty image");
  double peak = 0.0;
  for (const auto& p : img.pixels) peak = std::max(peak, std::norm(p));
  const double peak_db = peak > 0.0 ? linear_to_db(peak) : 0.0;

  std::string out = "P5\n" + std::to_string(img.grid.nx) + " " + std::to_string(img.grid.ny) +
                    "\n65535\n";
  for (std::size_t j = 0; j < img.grid.ny; ++j) {
    for (std::size_t i = 0; i < img.grid.nx; ++i) {
      const double pw = std::norm(img.at(i, img.grid.ny - 1 - j));  // north up
      const double db = pw > 0.0 ? linear_to_db(pw) : peak_db - 2.0 * dynamic_db;
      double v = (db - (peak_db - dynamic_db)) / dynamic_db;
      v = std::clamp(v, 0.0, 1.0);
      const auto q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
      out.push_back(static_cast<char>((q >> 8) & 0xff));  // PGM is big-endian
      out.push_back(static_cast<char>(q & 0xff));
    }
  }
  write_file_bytes(path, out);
}

inline void write_image_csv(const std::string& path, const SarImage& img) {
  std::string out = "x_m,y_m,re,im\n";
  for (std::size_t i = 0; i < img.grid.nx; ++i) {
    for (std::size_t j = 0; j < img.grid.ny; ++j) {
      const Vec3 p = img.grid.pixel(i, j);
      const Complex& v = img.at(i, j);
      out += format_double(p.x) + "," + format_double(p.y) + "," + format_double(v.real()) +
             "," + format_double(v.imag()) + "\n";
    }
  }
  write_file_bytes(path, out);
}

/// Grid and wavelength sidecar for image exports.
inline void write_image_meta(const std::string& path, const SarImage& img) {
  std::string out;
  out += "nx = " + std::to_string(img.grid.nx) + "\n";
  out += "ny = " + std::to_string(img.grid.ny) + "\n";
  out += "dx_m = " + format_double(img.grid.dx) + "\n";
  out += "dy_m = " + format_double(img.grid.dy) + "\n";
  out += "origin_x_m = " + format_double(img.grid.origin.x) + "\n";
  out += "origin_y_m = " + format_double(img.grid.origin.y) + "\n";
  out += "origin_z_m = " + format_double(img.grid.origin.z) + "\n";
  out += "wavelength_m = " + format_double(img.wavelength) + "\n";
  out += "clipped_pixels = " + std::to_string(img.n_clipped) + "\n";
  write_file_bytes(path, out);
}

}  // namespace isar
