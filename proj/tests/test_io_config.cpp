#include "isar/config.hpp"
#include "isar/io.hpp"
#include "isar/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

using namespace isar;

namespace {

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "isar_io_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_CASE("isar container round trip") {
  RawDataMatrix m(3, 5);
  m.sample_rate = 7.68e6;
  m.fast_time_origin = 1.5e-6;
  m.range_compressed = true;
  Rng rng(1);
  for (auto& v : m.data) v = rng.complex_normal(1.0);

  const auto path = temp_path("roundtrip.isar");
  write_isar(path, m, "traj.csv");
  std::string traj_path;
  const auto back = read_isar(path, &traj_path);

  REQUIRE(back.n_pulses == 3);
  REQUIRE(back.n_fast == 5);
  REQUIRE(back.range_compressed);
  REQUIRE(back.sample_rate == m.sample_rate);
  REQUIRE(back.fast_time_origin == m.fast_time_origin);
  REQUIRE(traj_path == "traj.csv");
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    // Stored as float32: exact after the same quantization.
    REQUIRE(back.data[i].real() == static_cast<double>(static_cast<float>(m.data[i].real())));
    REQUIRE(back.data[i].imag() == static_cast<double>(static_cast<float>(m.data[i].imag())));
  }

  // Header layout: magic + version + dims + flags = 16 bytes.
  const auto bytes = read_file_bytes(path);
  REQUIRE(bytes.size() == 16 + 3 * 5 * 8);
  REQUIRE(bytes.compare(0, 4, "ISAR") == 0);
  REQUIRE(static_cast<unsigned char>(bytes[14]) == 1);  // compressed flag bit
}

TEST_CASE("isar container rejects bad input") {
  const auto path = temp_path("bad.isar");
  write_file_bytes(path, "NOPE");
  REQUIRE_THROWS_AS(read_isar(path), IoError);
  write_file_bytes(path, std::string("ISAR") + std::string(8, '\0'));
  REQUIRE_THROWS_AS(read_isar(path), IoError);
}

TEST_CASE("trajectory csv round trip") {
  const auto t = make_linear_trajectory({1, 2, 3}, {4, 0, -1}, 250.0, 7);
  const auto path = temp_path("traj.csv");
  write_trajectory_csv(path, t);
  const auto back = read_trajectory_csv(path);
  REQUIRE(back.size() == 7);
  REQUIRE(back.uniform);
  REQUIRE(std::abs(back.pri - 1.0 / 250.0) < 1e-12);
  for (std::size_t k = 0; k < 7; ++k) {
    REQUIRE(std::abs(back.slow_times[k] - t.slow_times[k]) < 1e-12);
    REQUIRE(std::abs(back.positions[k].x - t.positions[k].x) < 1e-9);
    REQUIRE(std::abs(back.positions[k].z - t.positions[k].z) < 1e-9);
  }

  write_file_bytes(path, "wrong,header\n0,1,2,3\n");
  REQUIRE_THROWS_AS(read_trajectory_csv(path), IoError);
}

TEST_CASE("pgm export is deterministic with a fixed mapping") {
  SarImage img;
  img.grid.origin = {0, 0, 0};
  img.grid.nx = 4;
  img.grid.ny = 3;
  img.grid.dx = img.grid.dy = 1.0;
  img.wavelength = 0.05;
  img.pixels.assign(12, Complex{0.001, 0.0});
  img.at(2, 1) = Complex{1.0, 0.0};

  const auto p1 = temp_path("img1.pgm");
  const auto p2 = temp_path("img2.pgm");
  write_image_pgm(p1, img);
  write_image_pgm(p2, img);
  const auto b1 = read_file_bytes(p1);
  REQUIRE(b1 == read_file_bytes(p2));
  REQUIRE(b1.compare(0, 3, "P5\n") == 0);
  REQUIRE(b1.find("4 3\n65535\n") != std::string::npos);
  const std::size_t header = b1.find("65535\n") + 6;
  REQUIRE(b1.size() == header + 4 * 3 * 2);
}

TEST_CASE("image csv layout") {
  SarImage img;
  img.grid.origin = {10, 20, 0};
  img.grid.nx = 2;
  img.grid.ny = 2;
  img.grid.dx = 1.0;
  img.grid.dy = 2.0;
  img.pixels = {Complex{1, 2}, Complex{3, 4}, Complex{5, 6}, Complex{7, 8}};
  const auto path = temp_path("img.csv");
  write_image_csv(path, img);
  const auto text = read_file_bytes(path);
  REQUIRE(text.rfind("x_m,y_m,re,im\n", 0) == 0);
  REQUIRE(text.find("10,20,1,2\n") != std::string::npos);
  REQUIRE(text.find("10,22,3,4\n") != std::string::npos);
  REQUIRE(text.find("11,20,5,6\n") != std::string::npos);
}

TEST_CASE("config parsing: comments, whitespace, types") {
  const std::string text =
      "# scenario\n"
      "ofdm.m_fft = 64\n"
      "link.eirp_dbm = 23  # regulatory cap\n"
      "snow.enabled = true\n"
      "irf.methods = matched, zf\n"
      "\n";
  auto cfg = KeyValueConfig::parse_string(text);
  REQUIRE(cfg.get_u64("ofdm.m_fft") == 64);
  REQUIRE(cfg.get_double("link.eirp_dbm") == 23.0);
  REQUIRE(cfg.get_bool("snow.enabled"));
  const auto methods = cfg.get_list("irf.methods");
  REQUIRE(methods == std::vector<std::string>{"matched", "zf"});

  REQUIRE_THROWS_AS(cfg.get_string("missing.key"), ConfigError);
  cfg.set("bad", "abc");
  REQUIRE_THROWS_AS(cfg.get_double("bad"), ConfigError);
  REQUIRE_THROWS_AS(KeyValueConfig::parse_string("no equals sign\n"), ConfigError);
}

TEST_CASE("config overrides and unknown-key reporting") {
  auto cfg = KeyValueConfig::parse_string("a.x = 1\nb.y = 2\n");
  cfg.apply_overrides({"a.x=10", "c.z=3"});
  REQUIRE(cfg.get_u64("a.x") == 10);
  REQUIRE(cfg.get_u64("c.z") == 3);

  try {
    cfg.check_known({"a.x", "b.y"});
    FAIL("expected unknown-key error");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    REQUIRE(msg.find("c.z") != std::string::npos);
    REQUIRE(msg.find("a.x") == std::string::npos);
  }
  REQUIRE_NOTHROW(cfg.check_known({"a.x", "b.y"}, {"c."}));
}

TEST_CASE("config serialization round trips") {
  auto cfg = KeyValueConfig::parse_string("b = 2\na = 1\n");
  const auto text = cfg.serialize();
  REQUIRE(text == "a = 1\nb = 2\n");
  auto again = KeyValueConfig::parse_string(text);
  REQUIRE(again.values() == cfg.values());
}

TEST_CASE("content hash is stable") {
  REQUIRE(fnv1a64_hex("hello") == fnv1a64_hex("hello"));
  REQUIRE(fnv1a64_hex("hello") != fnv1a64_hex("hellp"));
  REQUIRE(fnv1a64_hex("").size() == 16);
}

TEST_CASE("deterministic double formatting") {
  REQUIRE(format_double(1.5) == "1.5");
  REQUIRE(format_double(1e-9) == "1e-09");
  REQUIRE(format_double(123456789.25) == "123456789.25");
}
