#include "isar/link_budget.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace isar;

TEST_CASE("R^4 law: doubling range costs 12.04 dB") {
  LinkBudget b;
  SnowModel snow;
  const double p1 = received_power(b, 1.0, 100.0, snow, 0.0);
  const double p2 = received_power(b, 1.0, 200.0, snow, 0.0);
  REQUIRE(std::abs(linear_to_db(p1 / p2) - 40.0 * std::log10(2.0)) < 1e-9);
}

TEST_CASE("snow extinction: 10 dB/m over 1 m costs 20 dB two-way") {
  LinkBudget b;
  SnowModel dry{10.0, true};
  SnowModel none;
  const double p_clear = received_power(b, 1.0, 100.0, none, 0.0);
  const double p_snow = received_power(b, 1.0, 100.0, dry, 1.0);
  REQUIRE(std::abs(linear_to_db(p_clear / p_snow) - 20.0) < 1e-9);
}

TEST_CASE("received power against a dB-domain hand calculation") {
  // EIRP 23 dBm, G_rx 10 dBi, f_c 5.9 GHz, sigma 1 m^2, R = 100*sqrt(2) m.
  LinkBudget b;
  b.eirp_dbm = 23.0;
  b.g_rx_dbi = 10.0;
  b.carrier_frequency = 5.9e9;
  SnowModel snow;
  const double r = 100.0 * std::sqrt(2.0);
  const double p = received_power(b, 1.0, r, snow, 0.0);

  // Independent spreadsheet-style route: sum the dB terms.
  const double lambda = constants::speed_of_light / 5.9e9;
  const double ae_db = 10.0 + 20.0 * std::log10(lambda) - 10.0 * std::log10(4.0 * M_PI);
  const double p_db = (23.0 - 30.0)                      // EIRP in dBW
                      + 0.0                              // sigma = 1 m^2
                      + ae_db                            // receive aperture
                      - 20.0 * std::log10(4.0 * M_PI)    // two spreading factors
                      - 40.0 * std::log10(r);
  REQUIRE(std::abs(linear_to_db(p) - p_db) < 1e-9);
}

TEST_CASE("noise power spectral density") {
  LinkBudget b;
  b.noise_figure_db = 7.0;
  b.temperature_k = 290.0;
  const double expected = 1.380649e-23 * 290.0 * std::pow(10.0, 0.7);
  REQUIRE(b.noise_psd() > 0.0);
  REQUIRE(std::abs(b.noise_psd() - expected) < 1e-30);
}

TEST_CASE("EIRP limit enforced unless overridden") {
  LinkBudget b;
  b.eirp_dbm = 30.0;
  REQUIRE_THROWS_AS(b.validate(), std::invalid_argument);
  b.allow_eirp_above_limit = true;
  REQUIRE_NOTHROW(b.validate());
}

TEST_CASE("unambiguous range") {
  REQUIRE(std::abs(unambiguous_range(125e3) - 1199.169832) < 1e-5);
  // Consistent with "1.2 km" at two significant figures.
  REQUIRE(std::abs(unambiguous_range(125e3) / 1000.0 - 1.2) < 0.05);
  REQUIRE(std::abs(unambiguous_range(1e3) - 149896.229) < 1e-3);
  const double r1 = unambiguous_range(10e3);
  const double r2 = unambiguous_range(20e3);
  REQUIRE(std::abs(r1 - 2.0 * r2) < 1e-9);
  REQUIRE_THROWS_AS(unambiguous_range(0.0), std::invalid_argument);
}

TEST_CASE("range must be positive") {
  LinkBudget b;
  SnowModel snow;
  REQUIRE_THROWS_AS(received_power(b, 1.0, 0.0, snow, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(received_power(b, 1.0, -5.0, snow, 0.0), std::invalid_argument);
}
