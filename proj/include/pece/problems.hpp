/**
 * @file problems.hpp
 * @brief Benchmark problems: the Brusselator, a heave/pitch/roll vehicle model
 *        and closed-form problems used as convergence oracles.
 */
#pragma once

#include <array>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pece/core.hpp"

namespace pece::problems {

// ---------------------------------------------------------------------------
// Brusselator

struct BrusselatorParams {
  double A = 1.0;
  double B = 3.0;
  StateVector y0{1.5, 3.0};
};

/// y1' = A + y1^2 y2 - (B + 1) y1,  y2' = B y1 - y1^2 y2.
[[nodiscard]] StateVector brusselator_rhs(const BrusselatorParams& p, double t,
                                          const StateVector& y);

/// Jacobian eigenvalues at the fixed point (A, B/A).
[[nodiscard]] std::array<std::complex<double>, 2> brusselator_eigenvalues(
    const BrusselatorParams& p);

/// |lambda|_max / |lambda|_min. Throws DomainError for a zero eigenvalue.
[[nodiscard]] double stiffness_ratio(const std::array<std::complex<double>, 2>& lambda);

[[nodiscard]] FirstOrderProblem brusselator_problem(const BrusselatorParams& p, double t_end,
                                                    int n_global);

// ---------------------------------------------------------------------------
// Vehicle

inline constexpr double kGravity = 32.174;           // ft/s^2
inline constexpr double kMphToFtPerSec = 5280.0 / 3600.0;

/// Road made of raised-cosine bumps one wheelbase long.
struct RoadwayProfile {
  double amplitude = 1.0 / 12.0;  ///< ft
  int wave_count = 5;
  double side_lag_fraction = 0.1;  ///< passenger side lag, fraction of the wheelbase
  double speed = 10.0 * kMphToFtPerSec;  ///< ft/s
};

/// Vehicle data as usually quoted: rates per inch, lengths in feet.
struct VehicleVitals {
  double mass = 14.0;       ///< slug
  double j_pitch = 45.0;    ///< slug ft^2
  double j_roll = 20.0;     ///< slug ft^2
  double l_front = 3.2;     ///< ft, front axle to CG
  double l_rear = 1.8;      ///< ft, rear axle to CG
  double rho_front = 2.1;   ///< ft, half track
  double rho_rear = 2.0;    ///< ft
  double damper_front = 10.0;  ///< lbs/(in/s)
  double damper_rear = 15.0;   ///< lbs/(in/s)
  double spring_front = 150.0;  ///< lbs/in
  double spring_rear = 300.0;   ///< lbs/in
};

/**
 * @brief Vehicle parameters in ft-lb-s units.
 *
 * Corners: 1 driver front, 2 passenger front, 3 passenger rear, 4 driver rear.
 */
struct VehicleParams {
  double m = 0.0;
  double j_theta = 0.0;
  double j_phi = 0.0;
  std::array<double, 4> c{};  ///< lb/(ft/s)
  std::array<double, 4> k{};  ///< lb/ft
  double l_f = 0.0;
  double l_r = 0.0;
  double rho_f = 0.0;
  double rho_r = 0.0;
  double g = kGravity;
  RoadwayProfile roadway;

  VehicleParams() = default;
  /// Converts per-inch rates to per-foot and validates.
  explicit VehicleParams(const VehicleVitals& vitals, RoadwayProfile road = {});

  [[nodiscard]] double weight() const { return m * g; }
  [[nodiscard]] double wheelbase() const { return l_f + l_r; }
  /// Throws DomainError on nonpositive inertia/length or negative rates.
  void validate() const;
};

struct VehicleMatrices {
  Eigen::Matrix3d M;
  Eigen::Matrix3d C;
  Eigen::Matrix3d K;
};

[[nodiscard]] VehicleMatrices vehicle_matrices(const VehicleParams& p);

struct RoadExcitation {
  std::array<double, 4> R{};
  std::array<double, 4> R_dot{};
};

/// Road coordinate lag of each corner behind the driver front wheel, ft.
[[nodiscard]] std::array<double, 4> wheel_offsets(const VehicleParams& p);

[[nodiscard]] RoadExcitation roadway_excitation(const VehicleParams& p, double t);

/// Time after which every wheel has left the bump train.
[[nodiscard]] double bumps_cleared_time(const VehicleParams& p);

[[nodiscard]] StateVector vehicle_forcing(const VehicleParams& p, double t);

/// Solves M a = f(t) - C v - K x.
[[nodiscard]] StateVector vehicle_acceleration(const VehicleParams& p, const VehicleMatrices& mats,
                                               double t, const StateVector& x,
                                               const StateVector& v);
[[nodiscard]] StateVector vehicle_acceleration(const VehicleParams& p, double t,
                                               const StateVector& x, const StateVector& v);

/// x0 = K^{-1} (w, 0, 0), v0 = 0.
[[nodiscard]] std::pair<StateVector, StateVector> vehicle_static_ic(const VehicleParams& p);

[[nodiscard]] DynamicProblem vehicle_problem(const VehicleParams& p, double t_end, int n_global);

// ---------------------------------------------------------------------------
// Closed-form problems

/// x' = -x, x(0) = 1; also posed as v = -x, a = -v.
[[nodiscard]] ClosedFormProblem exp_decay();

/// x'' = -x, x(0) = 1, v(0) = 0; kinematic form uses v = -sin t, a = -x.
[[nodiscard]] ClosedFormProblem harmonic_oscillator();

/// x' = -x + sin t, x(0) = x0.
[[nodiscard]] ClosedFormProblem forced_linear(double x0 = 1.0);

[[nodiscard]] ClosedFormProblem closed_form(const std::string& name);

// ---------------------------------------------------------------------------
// Named presets

struct BrusselatorPreset {
  std::string name;
  BrusselatorParams params;
  double t_end;
  int n_global;
};

[[nodiscard]] BrusselatorPreset brusselator_limit_cycle();
[[nodiscard]] BrusselatorPreset brusselator_stiff();

/// Initial conditions of the published Brusselator runs.
[[nodiscard]] const std::vector<StateVector>& brusselator_table_ics();

struct VehiclePreset {
  std::string name;
  VehicleParams params;
  double t_end;
  int n_global;
};

[[nodiscard]] VehiclePreset fsae_bumps();

}  // namespace pece::problems
