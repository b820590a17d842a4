#include "pece/control.hpp"

#include <algorithm>
#include <cmath>

namespace pece::control {

double truncation_error(const StateVector& x_corr, const StateVector& x_pred) {
  require_same_size(x_corr, x_pred);
  return euclidean_norm(x_corr - x_pred) / std::max(1.0, euclidean_norm(x_corr));
}

double initial_step_guess(double x0_norm, double v0_norm, double dt) {
  if (v0_norm <= 0.0) return dt / 10.0;
  return std::clamp(x0_norm / v0_norm, dt / 100.0, dt / 10.0);
}

InitialStep initial_step_from_probe(double x0_norm, double v0_norm, double x1_norm,
                                    double v1_norm, double dt) {
  if (!(dt > 0.0)) throw DomainError("initial_step_size: global step must be positive");
  InitialStep out;
  out.h0 = initial_step_guess(x0_norm, v0_norm, dt);
  if (v1_norm + v0_norm == 0.0) {
    out.h1 = out.h0;
  } else {
    const double denom = std::max(v1_norm + v0_norm, kErrorFloor);
    out.h1 = std::max(2.0 * std::abs((x1_norm - x0_norm) / denom), dt / 1000.0);
  }
  out.steps = static_cast<int>(std::max(2L, std::lround(dt / out.h1)));
  out.h = dt / out.steps;
  return out;
}

namespace {

// Euler predictor, trapezoid corrector on y' = f(t, y), returning |y1| and |f(t1, y1)|.
template <class Rhs>
InitialStep probe(const StateVector& y0, const Rhs& f, double dt) {
  if (!(dt > 0.0)) throw DomainError("initial_step_size: global step must be positive");
  const StateVector f0 = f(0.0, y0);
  const double y0n = euclidean_norm(y0);
  const double f0n = euclidean_norm(f0);
  const double h0 = initial_step_guess(y0n, f0n, dt);
  const StateVector yp = y0 + h0 * f0;
  const StateVector y1 = y0 + (0.5 * h0) * (f(h0, yp) + f0);
  const StateVector f1 = f(h0, y1);
  return initial_step_from_probe(y0n, f0n, euclidean_norm(y1), euclidean_norm(f1), dt);
}

StateVector concat(const StateVector& a, const StateVector& b) {
  StateVector out(a.size() + b.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[a.size() + i] = b[i];
  return out;
}

}  // namespace

InitialStep initial_step_size(const FirstOrderProblem& problem, double dt) {
  return probe(problem.x0, problem.velocity, dt);
}

InitialStep initial_step_size(const KinematicProblem& problem, double dt) {
  return probe(problem.x0, problem.velocity, dt);
}

InitialStep initial_step_size(const DynamicProblem& problem, double dt) {
  require_same_size(problem.x0, problem.v0);
  const std::size_t d = problem.x0.size();
  auto rhs = [&](double t, const StateVector& y) {
    StateVector x(d), v(d);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = y[i];
      v[i] = y[d + i];
    }
    return concat(v, problem.acceleration(t, x, v));
  };
  return probe(concat(problem.x0, problem.v0), rhs, dt);
}

double pi_scale_factor(double eps_next, const ControllerState& state) {
  const double eps = std::max(eps_next, kErrorFloor);
  const double eps_prev = std::max(state.eps_prev, kErrorFloor);
  const double p = state.order;
  if (eps_prev < state.tol && eps < state.tol) {
    return std::pow(state.tol / eps, 0.7 / (p + 1.0)) *
           std::pow(eps_prev / state.tol, 0.4 / (p + 1.0));
  }
  return std::pow(state.tol / eps, 1.0 / p);
}

const char* to_string(StepDecision d) {
  switch (d) {
    case StepDecision::Double: return "double";
    case StepDecision::Maintain: return "maintain";
    case StepDecision::HalveContinue: return "halve";
    case StepDecision::HalveRedo: return "halve-redo";
  }
  return "?";
}

StepDecision decide_step(double c, double eps_next, const ControllerState& state) {
  if (c > 2.0) {
    const long s = state.steps_to_go;
    return (s > 3 && s % 2 == 0) ? StepDecision::Double : StepDecision::Maintain;
  }
  if (c >= 1.0) return StepDecision::Maintain;
  return eps_next <= state.tol ? StepDecision::HalveContinue : StepDecision::HalveRedo;
}

void apply_decision(StepDecision d, ControllerState& state) {
  switch (d) {
    case StepDecision::Double:
      state.h *= 2.0;
      state.steps_to_go /= 2;
      break;
    case StepDecision::Maintain:
      break;
    case StepDecision::HalveContinue:
      state.h *= 0.5;
      state.steps_to_go *= 2;
      break;
    case StepDecision::HalveRedo:
      state.h *= 0.5;
      state.steps_to_go = 2 * (state.steps_to_go + 1);
      break;
  }
}

StateVector hermite_eval(const StateVector& x_a, const StateVector& x_b, const StateVector& v_a,
                         const StateVector& v_b, double h, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw DomainError("hermite_eval: theta outside [0, 1]");
  }
  require_same_size(x_a, x_b);
  require_same_size(v_a, v_b);
  require_same_size(x_a, v_a);
  if (theta == 0.5) {
    // exact midpoint form
    return 0.5 * (x_b + x_a) - (0.125 * h) * (v_b - v_a);
  }
  const auto w = hermite_basis(theta);
  StateVector out(x_a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = w[0] * x_a[i] + w[1] * h * v_a[i] + w[2] * x_b[i] + w[3] * h * v_b[i];
  }
  return out;
}

}  // namespace pece::control
