#include "pece/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pece::problems {

StateVector brusselator_rhs(const BrusselatorParams& p, double /*t*/, const StateVector& y) {
  if (y.size() != 2) throw InvalidStateError("brusselator state must have two entries");
  const double y1 = y[0];
  const double y2 = y[1];
  const double auto_cat = y1 * y1 * y2;
  return {p.A + auto_cat - (p.B + 1.0) * y1, p.B * y1 - auto_cat};
}

std::array<std::complex<double>, 2> brusselator_eigenvalues(const BrusselatorParams& p) {
  if (!(p.A > 0.0) || !(p.B > 0.0) || !std::isfinite(p.A) || !std::isfinite(p.B)) {
    throw DomainError("brusselator parameters must be positive and finite");
  }
  // lambda^2 + b lambda + A^2 = 0
  const double b = 1.0 - p.B + p.A * p.A;
  const double c = p.A * p.A;
  const double disc = b * b - 4.0 * c;
  if (disc < 0.0) {
    const double re = -0.5 * b;
    const double im = 0.5 * std::sqrt(-disc);
    return {std::complex<double>(re, im), std::complex<double>(re, -im)};
  }
  // avoid cancellation in the small root
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  const double r1 = q;
  const double r2 = c / q;
  return {std::complex<double>(std::max(r1, r2)), std::complex<double>(std::min(r1, r2))};
}

double stiffness_ratio(const std::array<std::complex<double>, 2>& lambda) {
  const double m0 = std::abs(lambda[0]);
  const double m1 = std::abs(lambda[1]);
  if (m0 == 0.0 || m1 == 0.0) throw DomainError("stiffness ratio undefined for a zero eigenvalue");
  return std::max(m0, m1) / std::min(m0, m1);
}

FirstOrderProblem brusselator_problem(const BrusselatorParams& p, double t_end, int n_global) {
  (void)brusselator_eigenvalues(p);  // validates A, B
  FirstOrderProblem prob;
  prob.velocity = [p](double t, const StateVector& y) { return brusselator_rhs(p, t, y); };
  prob.x0 = p.y0;
  prob.t_end = t_end;
  prob.n_global = n_global;
  return prob;
}

// ---------------------------------------------------------------------------

VehicleParams::VehicleParams(const VehicleVitals& v, RoadwayProfile road)
    : m(v.mass),
      j_theta(v.j_pitch),
      j_phi(v.j_roll),
      c{12.0 * v.damper_front, 12.0 * v.damper_front, 12.0 * v.damper_rear, 12.0 * v.damper_rear},
      k{12.0 * v.spring_front, 12.0 * v.spring_front, 12.0 * v.spring_rear, 12.0 * v.spring_rear},
      l_f(v.l_front),
      l_r(v.l_rear),
      rho_f(v.rho_front),
      rho_r(v.rho_rear),
      roadway(road) {
  validate();
}

void VehicleParams::validate() const {
  for (double x : {m, j_theta, j_phi, l_f, l_r, rho_f, rho_r, g}) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw DomainError("vehicle masses, inertias and lengths must be positive");
    }
  }
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(c[i] >= 0.0) || !(k[i] >= 0.0)) {
      throw DomainError("vehicle damper and spring rates must be nonnegative");
    }
  }
  if (!(roadway.speed > 0.0) || roadway.wave_count < 0 || !(roadway.amplitude >= 0.0)) {
    throw DomainError("invalid roadway profile");
  }
}

namespace {

// Symmetric heave/pitch/roll assembly shared by C and K.
Eigen::Matrix3d corner_matrix(const std::array<double, 4>& r, const VehicleParams& p) {
  const double front = r[0] + r[1];
  const double rear = r[2] + r[3];
  const double front_diff = r[0] - r[1];
  const double rear_diff = r[2] - r[3];
  Eigen::Matrix3d out;
  out(0, 0) = front + rear;
  out(0, 1) = -front * p.l_f + rear * p.l_r;
  out(0, 2) = -front_diff * p.rho_f + rear_diff * p.rho_r;
  out(1, 1) = front * p.l_f * p.l_f + rear * p.l_r * p.l_r;
  out(1, 2) = front_diff * p.l_f * p.rho_f + rear_diff * p.l_r * p.rho_r;
  out(2, 2) = front * p.rho_f * p.rho_f + rear * p.rho_r * p.rho_r;
  out(1, 0) = out(0, 1);
  out(2, 0) = out(0, 2);
  out(2, 1) = out(1, 2);
  return out;
}

}  // namespace

VehicleMatrices vehicle_matrices(const VehicleParams& p) {
  p.validate();
  VehicleMatrices mats;
  mats.M = Eigen::Vector3d(p.m, p.j_theta, p.j_phi).asDiagonal();
  mats.C = corner_matrix(p.c, p);
  mats.K = corner_matrix(p.k, p);
  return mats;
}

std::array<double, 4> wheel_offsets(const VehicleParams& p) {
  const double L = p.wheelbase();
  const double lag = p.roadway.side_lag_fraction * L;
  return {0.0, lag, L + lag, L};
}

RoadExcitation roadway_excitation(const VehicleParams& p, double t) {
  const auto& road = p.roadway;
  const double wavelength = p.wheelbase();
  const double length = road.wave_count * wavelength;
  const double omega = 2.0 * std::numbers::pi / wavelength;
  const auto offsets = wheel_offsets(p);
  RoadExcitation ex;
  for (std::size_t i = 0; i < 4; ++i) {
    const double xi = road.speed * t - offsets[i];
    if (xi <= 0.0 || xi >= length) continue;
    ex.R[i] = 0.5 * road.amplitude * (1.0 - std::cos(omega * xi));
    ex.R_dot[i] = 0.5 * road.amplitude * omega * std::sin(omega * xi) * road.speed;
  }
  return ex;
}

double bumps_cleared_time(const VehicleParams& p) {
  const auto offsets = wheel_offsets(p);
  const double last = *std::max_element(offsets.begin(), offsets.end());
  return (p.roadway.wave_count * p.wheelbase() + last) / p.roadway.speed;
}

StateVector vehicle_forcing(const VehicleParams& p, double t) {
  const auto ex = roadway_excitation(p, t);
  const auto& c = p.c;
  const auto& k = p.k;
  const auto& R = ex.R;
  const auto& Rd = ex.R_dot;
  const double heave = p.weight() - c[0] * Rd[0] - c[1] * Rd[1] - c[2] * Rd[2] - c[3] * Rd[3] -
                       k[0] * R[0] - k[1] * R[1] - k[2] * R[2] - k[3] * R[3];
  const double pitch = (c[0] * Rd[0] + c[1] * Rd[1] + k[0] * R[0] + k[1] * R[1]) * p.l_f -
                       (c[2] * Rd[2] + c[3] * Rd[3] + k[2] * R[2] + k[3] * R[3]) * p.l_r;
  const double roll = (c[0] * Rd[0] - c[1] * Rd[1] + k[0] * R[0] - k[1] * R[1]) * p.rho_f -
                      (c[2] * Rd[2] - c[3] * Rd[3] + k[2] * R[2] - k[3] * R[3]) * p.rho_r;
  return {heave, pitch, roll};
}

StateVector vehicle_acceleration(const VehicleParams& p, const VehicleMatrices& mats, double t,
                                 const StateVector& x, const StateVector& v) {
  if (x.size() != 3 || v.size() != 3) throw InvalidStateError("vehicle state must have 3 entries");
  const StateVector f = vehicle_forcing(p, t);
  const Eigen::Vector3d xe(x[0], x[1], x[2]);
  const Eigen::Vector3d ve(v[0], v[1], v[2]);
  const Eigen::Vector3d rhs = Eigen::Vector3d(f[0], f[1], f[2]) - mats.C * ve - mats.K * xe;
  StateVector a(3);
  for (int i = 0; i < 3; ++i) {
    const double mii = mats.M(i, i);
    if (!(mii > 0.0)) throw DomainError("mass matrix must have a positive diagonal");
    a[static_cast<std::size_t>(i)] = rhs(i) / mii;
  }
  return a;
}

StateVector vehicle_acceleration(const VehicleParams& p, double t, const StateVector& x,
                                 const StateVector& v) {
  return vehicle_acceleration(p, vehicle_matrices(p), t, x, v);
}

std::pair<StateVector, StateVector> vehicle_static_ic(const VehicleParams& p) {
  const auto mats = vehicle_matrices(p);
  const auto lu = mats.K.partialPivLu();
  if (std::abs(lu.determinant()) <= 1e-12 * mats.K.cwiseAbs().maxCoeff()) {
    throw DomainError("stiffness matrix is singular");
  }
  const Eigen::Vector3d x0 = lu.solve(Eigen::Vector3d(p.weight(), 0.0, 0.0));
  return {StateVector{x0(0), x0(1), x0(2)}, StateVector(3, 0.0)};
}

DynamicProblem vehicle_problem(const VehicleParams& p, double t_end, int n_global) {
  const auto mats = vehicle_matrices(p);
  auto [x0, v0] = vehicle_static_ic(p);
  DynamicProblem prob;
  prob.acceleration = [p, mats](double t, const StateVector& x, const StateVector& v) {
    return vehicle_acceleration(p, mats, t, x, v);
  };
  prob.x0 = std::move(x0);
  prob.v0 = std::move(v0);
  prob.t_end = t_end;
  prob.n_global = n_global;
  return prob;
}

// ---------------------------------------------------------------------------

ClosedFormProblem exp_decay() {
  ClosedFormProblem p;
  p.name = "exp-decay";
  p.first_order = FirstOrderProblem{[](double, const StateVector& x) { return -1.0 * x; },
                                    StateVector{1.0}, 1.0, 10};
  p.kinematic = KinematicProblem{
      [](double, const StateVector& x) { return -1.0 * x; },
      [](double, const StateVector&, const StateVector& v) { return -1.0 * v; }, StateVector{1.0},
      1.0, 10};
  p.dynamic = DynamicProblem{
      [](double, const StateVector&, const StateVector& v) { return -1.0 * v; }, StateVector{1.0},
      StateVector{-1.0}, 1.0, 10};
  p.exact_x = [](double t) { return StateVector{std::exp(-t)}; };
  p.exact_v = [](double t) { return StateVector{-std::exp(-t)}; };
  return p;
}

ClosedFormProblem harmonic_oscillator() {
  ClosedFormProblem p;
  p.name = "harmonic";
  p.kinematic = KinematicProblem{
      [](double t, const StateVector&) { return StateVector{-std::sin(t)}; },
      [](double, const StateVector& x, const StateVector&) { return -1.0 * x; }, StateVector{1.0},
      2.0 * std::numbers::pi, 100};
  p.dynamic = DynamicProblem{
      [](double, const StateVector& x, const StateVector&) { return -1.0 * x; }, StateVector{1.0},
      StateVector{0.0}, 2.0 * std::numbers::pi, 100};
  p.exact_x = [](double t) { return StateVector{std::cos(t)}; };
  p.exact_v = [](double t) { return StateVector{-std::sin(t)}; };
  return p;
}

ClosedFormProblem forced_linear(double x0) {
  ClosedFormProblem p;
  p.name = "forced-linear";
  p.first_order = FirstOrderProblem{
      [](double t, const StateVector& x) { return StateVector{-x[0] + std::sin(t)}; },
      StateVector{x0}, 1.0, 10};
  p.kinematic = KinematicProblem{
      [](double t, const StateVector& x) { return StateVector{-x[0] + std::sin(t)}; },
      [](double t, const StateVector&, const StateVector& v) {
        return StateVector{-v[0] + std::cos(t)};
      },
      StateVector{x0}, 1.0, 10};
  p.dynamic = DynamicProblem{
      [](double t, const StateVector&, const StateVector& v) {
        return StateVector{-v[0] + std::cos(t)};
      },
      StateVector{x0}, StateVector{-x0}, 1.0, 10};
  p.exact_x = [x0](double t) {
    return StateVector{(x0 + 0.5) * std::exp(-t) + 0.5 * (std::sin(t) - std::cos(t))};
  };
  p.exact_v = [x0](double t) {
    return StateVector{-(x0 + 0.5) * std::exp(-t) + 0.5 * (std::cos(t) + std::sin(t))};
  };
  return p;
}

ClosedFormProblem closed_form(const std::string& name) {
  if (name == "exp-decay") return exp_decay();
  if (name == "harmonic") return harmonic_oscillator();
  if (name == "forced-linear") return forced_linear();
  throw DomainError("unknown closed-form problem: " + name);
}

// ---------------------------------------------------------------------------

BrusselatorPreset brusselator_limit_cycle() {
  return {"brusselator-limit-cycle", BrusselatorParams{1.0, 3.0, StateVector{1.5, 3.0}}, 20.0,
          200};
}

BrusselatorPreset brusselator_stiff() {
  return {"brusselator-stiff", BrusselatorParams{100.0, 3.0, StateVector{1.5, 3.0}}, 0.1, 100};
}

const std::vector<StateVector>& brusselator_table_ics() {
  static const std::vector<StateVector> ics{
      {0.1, 0.1}, {1.5, 3.0}, {2.0, 0.5}, {3.25, 2.5}};
  return ics;
}

VehiclePreset fsae_bumps() {
  return {"fsae-bumps", VehicleParams(VehicleVitals{}), 3.0, 500};
}

}  // namespace pece::problems
