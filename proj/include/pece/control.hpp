/**
 * @file control.hpp
 * @brief Local error estimate, initial step heuristic, PI step-size controller
 *        and Hermite re-gridding of solver history.
 */
#pragma once

#include <array>
#include <limits>

#include "pece/core.hpp"

namespace pece::control {

/// Smallest error fed to the controller; keeps tol/eps finite.
inline constexpr double kErrorFloor = 10.0 * std::numeric_limits<double>::min();

/// eps = |x_corr - x_pred| / max(1, |x_corr|).
[[nodiscard]] double truncation_error(const StateVector& x_corr, const StateVector& x_pred);

struct InitialStep {
  double h0 = 0.0;  ///< first guess from |x0|/|v0|, clamped to [dt/100, dt/10]
  double h1 = 0.0;  ///< refined guess from the probe step, at least dt/1000
  int steps = 0;    ///< S, local steps across the first global step
  double h = 0.0;   ///< dt / S
};

/// The heuristic with the probe already evaluated: states at t0 and t0 + h0.
[[nodiscard]] InitialStep initial_step_from_probe(double x0_norm, double v0_norm, double x1_norm,
                                                  double v1_norm, double dt);

/// h0 from the initial state; callers run the probe step with it.
[[nodiscard]] double initial_step_guess(double x0_norm, double v0_norm, double dt);

/**
 * @brief Initial local step for x' = v(t, x) using an Euler + trapezoid probe.
 * Second-order problems probe their first-order form (x, v) -> (v, a).
 */
[[nodiscard]] InitialStep initial_step_size(const FirstOrderProblem& problem, double dt);
[[nodiscard]] InitialStep initial_step_size(const KinematicProblem& problem, double dt);
[[nodiscard]] InitialStep initial_step_size(const DynamicProblem& problem, double dt);

struct ControllerState {
  double tol = 1e-4;
  double eps_prev = 1.0;  ///< error of the last accepted step
  int order = 2;          ///< p, local error O(h^{p+1})
  double h = 0.0;
  /// Local steps still to take before the next global node, counted after
  /// the step under decision has been accepted.
  long steps_to_go = 0;
  double dt = 0.0;
};

/// PI scale factor; falls back to the I controller (tol/eps)^{1/p}.
[[nodiscard]] double pi_scale_factor(double eps_next, const ControllerState& state);

enum class StepDecision { Double, Maintain, HalveContinue, HalveRedo };

[[nodiscard]] const char* to_string(StepDecision d);

/**
 * @brief Chooses what to do after a step with error @p eps_next and scale @p c.
 *
 * Doubling needs c > 2 and an even steps_to_go above 3; c > 2 otherwise
 * maintains. Below c = 1 the step is halved and either kept (eps <= tol) or
 * repeated.
 */
[[nodiscard]] StepDecision decide_step(double c, double eps_next, const ControllerState& state);

/**
 * @brief Updates h and steps_to_go. steps_to_go * h, the time left to the next
 * global node, is unchanged; for HalveRedo the rejected step is given back.
 */
void apply_decision(StepDecision d, ControllerState& state);

/// Cubic Hermite basis (h00, h10, h01, h11) at theta; generic so it can run in exact arithmetic.
template <class Scalar>
[[nodiscard]] std::array<Scalar, 4> hermite_basis(const Scalar& theta) {
  const Scalar t2 = theta * theta;
  const Scalar t3 = t2 * theta;
  return {Scalar(2) * t3 - Scalar(3) * t2 + Scalar(1), t3 - Scalar(2) * t2 + theta,
          Scalar(3) * t2 - Scalar(2) * t3, t3 - t2};
}

/**
 * @brief Cubic Hermite value at t_a + theta h from values and slopes at both ends.
 * At theta = 1/2 this is (x_a + x_b)/2 - h (v_b - v_a)/8.
 * Throws DomainError when theta is outside [0, 1].
 */
[[nodiscard]] StateVector hermite_eval(const StateVector& x_a, const StateVector& x_b,
                                       const StateVector& v_a, const StateVector& v_b, double h,
                                       double theta);

}  // namespace pece::control
