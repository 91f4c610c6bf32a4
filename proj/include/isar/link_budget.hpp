#pragma once

// link_budget.hpp - radar equation, noise density, snow extinction,
// unambiguous range.

#include "isar/types.hpp"

#include <cmath>

namespace isar {

/// Radio parameters of the sensing/communication link. The 23 dBm EIRP cap is
/// the regulatory limit; raising it requires the explicit override flag.
struct LinkBudget {
  double eirp_dbm = 23.0;           // P_TX * G_TX
  double g_rx_dbi = 10.0;           // receive antenna gain
  double noise_figure_db = 7.0;
  double carrier_frequency = 5.9e9; // Hz
  double temperature_k = 290.0;
  double directivity_loss_db = 0.0; // one-way pattern loss at scene center
  bool allow_eirp_above_limit = false;

  double wavelength() const { return constants::speed_of_light / carrier_frequency; }
  double eirp_watts() const { return dbm_to_watts(eirp_dbm); }
  double g_rx_linear() const { return db_to_linear(g_rx_dbi); }

  // Effective receive aperture A_e = G * lambda^2 / (4 pi).
  double effective_area() const {
    const double l = wavelength();
    return g_rx_linear() * l * l / (4.0 * M_PI);
  }

  // Noise power spectral density N0 = k_B * T * F, W/Hz.
  double noise_psd() const {
    return constants::boltzmann * temperature_k * db_to_linear(noise_figure_db);
  }

  void validate() const {
    if (carrier_frequency <= 0.0) throw std::invalid_argument("LinkBudget: carrier frequency must be > 0");
    if (temperature_k <= 0.0) throw std::invalid_argument("LinkBudget: temperature must be > 0");
    if (eirp_dbm > 23.0 + 1e-12 && !allow_eirp_above_limit)
      throw std::invalid_argument(
          "LinkBudget: EIRP above the 23 dBm limit; set allow_eirp_above_limit to override");
  }
};

/// One-way snow extinction in dB/m; loss applies as amplitude scaling only.
struct SnowModel {
  double extinction_db_per_m = 0.0;  // gamma, one-way
  bool enabled = false;

  double one_way_loss_db(double depth_m) const {
    return enabled ? extinction_db_per_m * depth_m : 0.0;
  }
  double two_way_loss_db(double depth_m) const { return 2.0 * one_way_loss_db(depth_m); }

  void validate() const {
    if (extinction_db_per_m < 0.0)
      throw std::invalid_argument("SnowModel: extinction must be >= 0 dB/m");
  }
};

/// Received echo power for separate tx/rx ranges:
/// P_RX = EIRP * sigma * A_e / ((4 pi)^2 R_tx^2 R_rx^2), degraded by two
/// passes of directivity loss and snow extinction.
inline double received_power_bistatic(const LinkBudget& budget, double rcs,
                                      double r_tx, double r_rx,
                                      const SnowModel& snow, double depth_m) {
  budget.validate();
  snow.validate();
  if (r_tx <= 0.0 || r_rx <= 0.0)
    throw std::invalid_argument("received_power: range must be > 0");
  const double spreading = (4.0 * M_PI) * (4.0 * M_PI) * r_tx * r_tx * r_rx * r_rx;
  const double loss_db = snow.two_way_loss_db(depth_m) + 2.0 * budget.directivity_loss_db;
  return budget.eirp_watts() * rcs * budget.effective_area() / spreading *
         db_to_linear(-loss_db);
}

/// Monostatic radar equation (R^4 law).
inline double received_power(const LinkBudget& budget, double rcs, double range_one_way,
                             const SnowModel& snow, double depth_m) {
  return received_power_bistatic(budget, rcs, range_one_way, range_one_way, snow, depth_m);
}

inline double unambiguous_range(double prf) {
  if (prf <= 0.0) throw std::invalid_argument("unambiguous_range: prf must be > 0");
  return constants::speed_of_light / (2.0 * prf);
}

}  // namespace isar
