/**
 * @file steppers.hpp
 * @brief One-step startup formulas and two-step PECE integrators for the three
 *        problem families.
 *
 * Every stepper returns both the predicted and corrected values so the error
 * estimate never has to re-run it. Derivatives carried by a StepResult are
 * always evaluated at the corrected state.
 */
#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "pece/core.hpp"

namespace pece::steppers {

/// A callback returned a non-finite or wrongly sized vector.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, double t, StateVector x)
      : std::runtime_error(what), t_(t), x_(std::move(x)) {}
  [[nodiscard]] double time() const noexcept { return t_; }
  [[nodiscard]] const StateVector& state() const noexcept { return x_; }

 private:
  double t_;
  StateVector x_;
};

/// Corrector used for displacement by the second-order and paired solvers.
enum class CorrectorVariant {
  averaged,  ///< mean of type1 and type2, weights matched to the predictor
  type1,
  type2,
};

[[nodiscard]] const char* to_string(CorrectorVariant v);
[[nodiscard]] std::optional<CorrectorVariant> parse_variant(const std::string& s);

struct StepResult {
  double t = 0.0;
  StateVector x_pred;
  StateVector x;
  /// Predicted velocity; only for the paired solver, where v is integrated.
  std::optional<StateVector> v_pred;
  StateVector v;
  std::optional<StateVector> a;

  [[nodiscard]] NodeRecord node() const { return {t, x, v, a}; }
};

/// Node at t = 0 with derivatives evaluated from the initial conditions.
[[nodiscard]] NodeRecord initial_node(const FirstOrderProblem& p);
[[nodiscard]] NodeRecord initial_node(const KinematicProblem& p);
[[nodiscard]] NodeRecord initial_node(const DynamicProblem& p);

/// Checked callback evaluation; throws EvaluationError.
[[nodiscard]] StateVector eval_velocity(const VelocityFn& f, double t, const StateVector& x);
[[nodiscard]] StateVector eval_acceleration(const AccelerationFn& f, double t, const StateVector& x,
                                            const StateVector& v);

// `m` is the number of correct/evaluate passes, PE(CE)^m; m = 1 is PECE.

/// Euler predictor, trapezoid corrector.
[[nodiscard]] StepResult heun_start(const FirstOrderProblem& p, double h, const NodeRecord& start,
                                    int m = 1);

/// Two-step predictor with a BDF2 corrector.
[[nodiscard]] StepResult pece_first_order_step(const FirstOrderProblem& p,
                                               const HistoryWindow& history, int m = 1);

/// Taylor predictor, trapezoid corrector with a jerk correction.
[[nodiscard]] StepResult startup_second_order(const KinematicProblem& p, double h,
                                              const NodeRecord& start, int m = 1);

[[nodiscard]] StepResult pece_second_order_step(const KinematicProblem& p,
                                                const HistoryWindow& history,
                                                CorrectorVariant variant, int m = 1);

/// Paired displacement/velocity startup for x'' = a(t, x, v).
[[nodiscard]] StepResult startup_dynamic(const DynamicProblem& p, double h, const NodeRecord& start,
                                         int m = 1);

[[nodiscard]] StepResult pece_dynamic_step(const DynamicProblem& p, const HistoryWindow& history,
                                           CorrectorVariant variant, int m = 1);

}  // namespace pece::steppers
