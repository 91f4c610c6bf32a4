#pragma once

// geometry.hpp - acquisition geometry: trajectories, scene grids, targets,
// and monostatic/bistatic range computation.
//
// Coordinates are local Cartesian east-north-up in meters; scenes are small
// enough that no geodetic handling is needed.

#include "isar/types.hpp"

#include <cmath>
#include <vector>

namespace isar {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Platform positions per pulse. Slow times must increase strictly; when the
/// uniform flag is set the spacing must equal pri within 1e-9 s.
struct Trajectory {
  std::vector<double> slow_times;  // seconds
  std::vector<Vec3> positions;
  double pri = 0.0;                // nominal 1/PRF, seconds
  bool uniform = false;

  std::size_t size() const { return positions.size(); }

  void validate() const {
    if (positions.size() != slow_times.size())
      throw std::invalid_argument("Trajectory: slow-time/position count mismatch");
    if (positions.empty()) throw std::invalid_argument("Trajectory: empty");
    for (const auto& p : positions)
      if (!p.finite()) throw std::invalid_argument("Trajectory: non-finite position");
    for (std::size_t k = 1; k < slow_times.size(); ++k) {
      const double dt = slow_times[k] - slow_times[k - 1];
      if (dt <= 0.0) throw std::invalid_argument("Trajectory: slow times must increase strictly");
      if (uniform && std::abs(dt - pri) > 1e-9)
        throw std::invalid_argument("Trajectory: uniform flag set but spacing != pri");
    }
  }
};

inline Trajectory make_linear_trajectory(const Vec3& start, const Vec3& velocity,
                                         double prf, std::size_t n_pulses) {
  if (prf <= 0.0) throw std::invalid_argument("make_linear_trajectory: prf must be > 0");
  if (n_pulses == 0) throw std::invalid_argument("make_linear_trajectory: need n_pulses >= 1");
  Trajectory t;
  t.pri = 1.0 / prf;
  t.uniform = true;
  t.slow_times.resize(n_pulses);
  t.positions.resize(n_pulses);
  for (std::size_t k = 0; k < n_pulses; ++k) {
    const double tau = static_cast<double>(k) * t.pri;
    t.slow_times[k] = tau;
    t.positions[k] = start + velocity * tau;
  }
  return t;
}

/// Flat image pixel lattice: pixel (i, j) = origin + i*dx*x_hat + j*dy*y_hat,
/// all pixels at the origin's elevation.
struct SceneGrid {
  Vec3 origin;
  std::size_t nx = 0, ny = 0;
  double dx = 0.0, dy = 0.0;  // meters

  std::size_t pixel_count() const { return nx * ny; }
  Vec3 pixel(std::size_t i, std::size_t j) const {
    return {origin.x + static_cast<double>(i) * dx,
            origin.y + static_cast<double>(j) * dy, origin.z};
  }
  double extent_x() const { return static_cast<double>(nx > 0 ? nx - 1 : 0) * dx; }
  double extent_y() const { return static_cast<double>(ny > 0 ? ny - 1 : 0) * dy; }

  bool contains_xy(const Vec3& p) const {
    return p.x >= origin.x - 0.5 * dx && p.x <= origin.x + extent_x() + 0.5 * dx &&
           p.y >= origin.y - 0.5 * dy && p.y <= origin.y + extent_y() + 0.5 * dy;
  }

  void validate() const {
    if (nx == 0 || ny == 0) throw std::invalid_argument("SceneGrid: empty grid");
    if (dx <= 0.0 || dy <= 0.0) throw std::invalid_argument("SceneGrid: spacing must be > 0");
    if (!origin.finite()) throw std::invalid_argument("SceneGrid: non-finite origin");
  }
};

struct PointTarget {
  Vec3 position;
  double rcs = 1.0;           // m^2
  double burial_depth = 0.0;  // meters of snow above the target, 0 = surface

  void validate() const {
    if (rcs <= 0.0) throw std::invalid_argument("PointTarget: rcs must be > 0");
    if (burial_depth < 0.0) throw std::invalid_argument("PointTarget: burial_depth must be >= 0");
  }
};

/// Monostatic (tx rides with rx) or bistatic (fixed tx, moving rx) geometry.
/// path_length returns the total propagation path: 2|p_rx - p| monostatic,
/// |p_tx - p| + |p_rx - p| bistatic.
struct BistaticGeometry {
  bool co_located = true;
  Vec3 tx_position;
  Trajectory rx_trajectory;

  static BistaticGeometry monostatic(Trajectory traj) {
    BistaticGeometry g;
    g.co_located = true;
    g.rx_trajectory = std::move(traj);
    g.rx_trajectory.validate();
    return g;
  }

  static BistaticGeometry bistatic(const Vec3& tx, Trajectory rx) {
    BistaticGeometry g;
    g.co_located = false;
    g.tx_position = tx;
    g.rx_trajectory = std::move(rx);
    g.rx_trajectory.validate();
    return g;
  }

  std::size_t pulse_count() const { return rx_trajectory.size(); }

  double rx_range(std::size_t pulse, const Vec3& p) const {
    return distance(rx_trajectory.positions[pulse], p);
  }
  double tx_range(std::size_t pulse, const Vec3& p) const {
    return co_located ? rx_range(pulse, p) : distance(tx_position, p);
  }
  double path_length(std::size_t pulse, const Vec3& p) const {
    return tx_range(pulse, p) + rx_range(pulse, p);
  }
};

/// Total tx->target->rx path per pulse (equals two-way range when monostatic).
inline std::vector<double> range_history(const BistaticGeometry& geom, const Vec3& point) {
  geom.rx_trajectory.validate();
  std::vector<double> r(geom.pulse_count());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = geom.path_length(k, point);
  return r;
}

}  // namespace isar
