/**
 * @file driver.hpp
 * @brief Full integrations under step-size control, and convergence studies.
 */
#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pece/core.hpp"
#include "pece/steppers.hpp"

namespace pece {

struct IntegrationConfig {
  double tol = 1e-4;
  int m = 1;
  steppers::CorrectorVariant variant = steppers::CorrectorVariant::type2;
  /// Local steps per global step; when set the controller is disabled.
  std::optional<int> fixed_substeps;
  /// Accept tol outside [1e-8, 1e-2] (a warning is printed).
  bool allow_any_tolerance = false;
};

/// Aborted integration. Carries the global nodes reached so far.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t, double eps, double h,
                   SolutionSeries partial)
      : std::runtime_error(what),
        t_(t),
        eps_(eps),
        h_(h),
        partial_(std::make_shared<SolutionSeries>(std::move(partial))) {}

  [[nodiscard]] double time() const noexcept { return t_; }
  [[nodiscard]] double error() const noexcept { return eps_; }
  [[nodiscard]] double step() const noexcept { return h_; }
  [[nodiscard]] const SolutionSeries& partial() const noexcept { return *partial_; }

 private:
  double t_, eps_, h_;
  std::shared_ptr<SolutionSeries> partial_;
};

/// Halving below dt * 2^-40 aborts the run.
inline constexpr double kStepUnderflowFactor = 0x1p-40;

[[nodiscard]] SolutionSeries integrate(const FirstOrderProblem& problem,
                                       const IntegrationConfig& config);
[[nodiscard]] SolutionSeries integrate(const KinematicProblem& problem,
                                       const IntegrationConfig& config);
[[nodiscard]] SolutionSeries integrate(const DynamicProblem& problem,
                                       const IntegrationConfig& config);

enum class Family { first_order, kinematic, dynamic };

[[nodiscard]] const char* to_string(Family f);
[[nodiscard]] std::optional<Family> parse_family(const std::string& s);

struct ConvergencePoint {
  double h = 0.0;
  double error = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergencePoint> points;
  double slope = 0.0;
};

/// Least-squares slope of log(error) against log(h).
[[nodiscard]] double fit_loglog_slope(std::span<const ConvergencePoint> points);

/**
 * @brief Global error at t_end against the exact solution for each step size,
 * controller disabled. Each h must divide t_end.
 *
 * The error is the Euclidean norm of the displacement error.
 */
[[nodiscard]] ConvergenceTable convergence_study(const ClosedFormProblem& problem, Family family,
                                                 steppers::CorrectorVariant variant,
                                                 std::span<const double> step_sizes,
                                                 double t_end);

/// Error of a single startup step of size h from t = 0, for each h.
[[nodiscard]] ConvergenceTable startup_local_study(const ClosedFormProblem& problem, Family family,
                                                   std::span<const double> step_sizes);

}  // namespace pece
