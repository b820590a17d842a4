#include "pece/driver.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>

#include "pece/control.hpp"

namespace pece {

namespace {

using steppers::CorrectorVariant;
using steppers::StepResult;

// Per-family hooks used by the generic driver loop.

struct FirstOrderFamily {
  const FirstOrderProblem& p;
  int m;

  static constexpr int order = 2;
  [[nodiscard]] double t_end() const { return p.t_end; }
  [[nodiscard]] int n_global() const { return p.n_global; }
  [[nodiscard]] NodeRecord initial() const { return steppers::initial_node(p); }
  [[nodiscard]] control::InitialStep initial_step(double dt) const {
    return control::initial_step_size(p, dt);
  }
  [[nodiscard]] StepResult startup(double h, const NodeRecord& n) const {
    return steppers::heun_start(p, h, n, m);
  }
  [[nodiscard]] StepResult step(const HistoryWindow& w) const {
    return steppers::pece_first_order_step(p, w, m);
  }
  [[nodiscard]] static double error(const StepResult& r) {
    return control::truncation_error(r.x, r.x_pred);
  }
  [[nodiscard]] NodeRecord interpolate(const NodeRecord& a, const NodeRecord& b, double h,
                                       double theta) const {
    NodeRecord out;
    out.t = a.t + theta * h;
    out.x = control::hermite_eval(a.x, b.x, a.v, b.v, h, theta);
    out.v = steppers::eval_velocity(p.velocity, out.t, out.x);
    return out;
  }
  [[nodiscard]] static SolutionSeries::Record output(const NodeRecord& n) {
    return {n.t, n.x, std::nullopt};
  }
};

struct KinematicFamily {
  const KinematicProblem& p;
  int m;
  CorrectorVariant variant;

  static constexpr int order = 3;
  [[nodiscard]] double t_end() const { return p.t_end; }
  [[nodiscard]] int n_global() const { return p.n_global; }
  [[nodiscard]] NodeRecord initial() const { return steppers::initial_node(p); }
  [[nodiscard]] control::InitialStep initial_step(double dt) const {
    return control::initial_step_size(p, dt);
  }
  [[nodiscard]] StepResult startup(double h, const NodeRecord& n) const {
    return steppers::startup_second_order(p, h, n, m);
  }
  [[nodiscard]] StepResult step(const HistoryWindow& w) const {
    return steppers::pece_second_order_step(p, w, variant, m);
  }
  [[nodiscard]] static double error(const StepResult& r) {
    return control::truncation_error(r.x, r.x_pred);
  }
  [[nodiscard]] NodeRecord interpolate(const NodeRecord& a, const NodeRecord& b, double h,
                                       double theta) const {
    NodeRecord out;
    out.t = a.t + theta * h;
    out.x = control::hermite_eval(a.x, b.x, a.v, b.v, h, theta);
    out.v = steppers::eval_velocity(p.velocity, out.t, out.x);
    out.a = steppers::eval_acceleration(p.acceleration, out.t, out.x, out.v);
    return out;
  }
  [[nodiscard]] static SolutionSeries::Record output(const NodeRecord& n) {
    return {n.t, n.x, std::nullopt};
  }
};

struct DynamicFamily {
  const DynamicProblem& p;
  int m;
  CorrectorVariant variant;

  static constexpr int order = 3;
  [[nodiscard]] double t_end() const { return p.t_end; }
  [[nodiscard]] int n_global() const { return p.n_global; }
  [[nodiscard]] NodeRecord initial() const { return steppers::initial_node(p); }
  [[nodiscard]] control::InitialStep initial_step(double dt) const {
    return control::initial_step_size(p, dt);
  }
  [[nodiscard]] StepResult startup(double h, const NodeRecord& n) const {
    return steppers::startup_dynamic(p, h, n, m);
  }
  [[nodiscard]] StepResult step(const HistoryWindow& w) const {
    return steppers::pece_dynamic_step(p, w, variant, m);
  }
  [[nodiscard]] static double error(const StepResult& r) {
    return std::max(control::truncation_error(r.x, r.x_pred),
                    control::truncation_error(r.v, *r.v_pred));
  }
  [[nodiscard]] NodeRecord interpolate(const NodeRecord& a, const NodeRecord& b, double h,
                                       double theta) const {
    NodeRecord out;
    out.t = a.t + theta * h;
    out.x = control::hermite_eval(a.x, b.x, a.v, b.v, h, theta);
    out.v = control::hermite_eval(a.v, b.v, *a.a, *b.a, h, theta);
    out.a = steppers::eval_acceleration(p.acceleration, out.t, out.x, out.v);
    return out;
  }
  [[nodiscard]] static SolutionSeries::Record output(const NodeRecord& n) {
    return {n.t, n.x, n.v};
  }
};

void check_config(const IntegrationConfig& config, double t_end, int n_global) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("end time must be positive");
  if (n_global < 1) throw DomainError("need at least one global step");
  if (config.m < 1) throw DomainError("PE(CE)^m needs m >= 1");
  if (config.fixed_substeps && *config.fixed_substeps < 1) {
    throw DomainError("fixed step count must be positive");
  }
  if (!(config.tol > 0.0)) throw DomainError("tolerance must be positive");
  if (config.tol < 1e-8 || config.tol > 1e-2) {
    if (!config.allow_any_tolerance) {
      throw DomainError("tolerance outside [1e-8, 1e-2]");
    }
    std::cerr << "warning: tolerance " << config.tol << " outside [1e-8, 1e-2]\n";
  }
}

// New n-1 record halfway between n-1 and n after a halving; the old n-1
// becomes the spare, which sits exactly two new steps behind n.
template <class F>
void regrid_halve(const F& family, HistoryWindow& w, double h_old) {
  if (!w.previous) {
    w.h = 0.5 * h_old;
    return;
  }
  w.h = h_old;
  w.halve(family.interpolate(*w.previous, w.current, h_old, 0.5));
}

template <class F>
SolutionSeries run(const F& family, const IntegrationConfig& config) {
  check_config(config, family.t_end(), family.n_global());
  const int n_global = family.n_global();
  const double dt = family.t_end() / n_global;
  const bool controlled = !config.fixed_substeps.has_value();

  SolutionSeries out;
  out.records.reserve(static_cast<std::size_t>(n_global) + 1);

  HistoryWindow w;
  w.current = family.initial();
  out.records.push_back(F::output(w.current));

  control::ControllerState ctrl;
  ctrl.tol = config.tol;
  ctrl.order = F::order;
  ctrl.dt = dt;
  ctrl.eps_prev = 1.0;
  if (controlled) {
    const auto init = family.initial_step(dt);
    ctrl.h = init.h;
    ctrl.steps_to_go = init.steps;
  } else {
    ctrl.h = dt / *config.fixed_substeps;
    ctrl.steps_to_go = *config.fixed_substeps;
  }
  w.h = ctrl.h;

  int global_index = 0;
  while (global_index < n_global) {
    const StepResult r = w.previous ? family.step(w) : family.startup(ctrl.h, w.current);
    const double eps = F::error(r);

    control::StepDecision decision = control::StepDecision::Maintain;
    const long s_before = ctrl.steps_to_go;
    ctrl.steps_to_go = s_before - 1;
    if (controlled) {
      const double c = control::pi_scale_factor(eps, ctrl);
      decision = control::decide_step(c, eps, ctrl);
    }

    if (decision == control::StepDecision::HalveRedo) {
      const double h_old = ctrl.h;
      control::apply_decision(decision, ctrl);
      ++out.stats.halvings;
      ++out.stats.restarts;
      if (ctrl.h < dt * kStepUnderflowFactor) {
        throw IntegrationError("step size underflow", w.current.t, eps, ctrl.h, std::move(out));
      }
      regrid_halve(family, w, h_old);
      w.h = ctrl.h;
      continue;
    }

    // accepted
    w.advance(r.node());
    ++out.stats.local_steps;
    out.error_trace.push_back({r.t, eps, ctrl.h});
    ctrl.eps_prev = eps;

    if (decision == control::StepDecision::Double && !w.spare) {
      decision = control::StepDecision::Maintain;
    }
    const double h_old = ctrl.h;
    control::apply_decision(decision, ctrl);
    if (decision == control::StepDecision::Double) {
      ++out.stats.doublings;
      out.doubling_events.push_back(out.error_trace.size() - 1);
      w.double_back();
    } else if (decision == control::StepDecision::HalveContinue) {
      ++out.stats.halvings;
      if (ctrl.h < dt * kStepUnderflowFactor) {
        throw IntegrationError("step size underflow", w.current.t, eps, ctrl.h, std::move(out));
      }
      regrid_halve(family, w, h_old);
    }
    w.h = ctrl.h;

    if (ctrl.steps_to_go > 0) continue;

    // Global node reached.
    ++global_index;
    w.current.t = dt * global_index;
    if (w.previous) w.previous->t = w.current.t - ctrl.h;
    out.records.push_back(F::output(w.current));
    if (global_index == n_global) break;

    if (!controlled) {
      ctrl.steps_to_go = *config.fixed_substeps;
      continue;
    }
    const long s_new = std::max(2L, std::lround(dt / ctrl.h));
    const double h_new = dt / static_cast<double>(s_new);
    if (h_new != ctrl.h) {
      const double theta = 1.0 - h_new / ctrl.h;
      w.spare.reset();
      if (w.previous && theta >= 0.0 && theta <= 1.0) {
        NodeRecord moved = family.interpolate(*w.previous, w.current, ctrl.h, theta);
        moved.t = w.current.t - h_new;
        w.previous = std::move(moved);
      } else {
        // cannot interpolate: restart from the one-step method
        w.previous.reset();
      }
    }
    ctrl.h = h_new;
    ctrl.steps_to_go = s_new;
    w.h = ctrl.h;
  }
  return out;
}

}  // namespace

SolutionSeries integrate(const FirstOrderProblem& problem, const IntegrationConfig& config) {
  return run(FirstOrderFamily{problem, config.m}, config);
}

SolutionSeries integrate(const KinematicProblem& problem, const IntegrationConfig& config) {
  return run(KinematicFamily{problem, config.m, config.variant}, config);
}

SolutionSeries integrate(const DynamicProblem& problem, const IntegrationConfig& config) {
  return run(DynamicFamily{problem, config.m, config.variant}, config);
}

const char* to_string(Family f) {
  switch (f) {
    case Family::first_order: return "first-order";
    case Family::kinematic: return "kinematic";
    case Family::dynamic: return "dynamic";
  }
  return "?";
}

std::optional<Family> parse_family(const std::string& s) {
  if (s == "first-order") return Family::first_order;
  if (s == "kinematic") return Family::kinematic;
  if (s == "dynamic") return Family::dynamic;
  return std::nullopt;
}

double fit_loglog_slope(std::span<const ConvergencePoint> points) {
  if (points.size() < 2) throw DomainError("slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& pt : points) {
    if (!(pt.h > 0.0) || !(pt.error > 0.0) || !std::isfinite(pt.error)) {
      throw DomainError("slope fit needs positive step sizes and errors");
    }
    const double x = std::log(pt.h);
    const double y = std::log(pt.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(points.size());
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw DomainError("slope fit needs distinct step sizes");
  return (n * sxy - sx * sy) / denom;
}

namespace {

void check_grid(std::span<const double> hs) {
  if (hs.size() < 2) throw DomainError("convergence grid needs at least two step sizes");
  std::set<double> seen;
  for (double h : hs) {
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("step sizes must be positive");
    if (!seen.insert(h).second) throw DomainError("duplicate step size in grid");
  }
}

template <class P>
P with_span(P p, double t_end) {
  p.t_end = t_end;
  p.n_global = 1;
  return p;
}

}  // namespace

ConvergenceTable convergence_study(const ClosedFormProblem& problem, Family family,
                                   steppers::CorrectorVariant variant,
                                   std::span<const double> step_sizes, double t_end) {
  check_grid(step_sizes);
  if (!(t_end > 0.0)) throw DomainError("end time must be positive");
  ConvergenceTable table;
  for (double h : step_sizes) {
    const long steps = std::lround(t_end / h);
    if (steps < 2 || std::abs(steps * h - t_end) > 1e-9 * t_end) {
      throw DomainError("step size does not divide the time span");
    }
    IntegrationConfig cfg;
    cfg.variant = variant;
    cfg.fixed_substeps = static_cast<int>(steps);
    SolutionSeries sol;
    switch (family) {
      case Family::first_order:
        if (!problem.first_order) throw DomainError(problem.name + " has no first-order form");
        sol = integrate(with_span(*problem.first_order, t_end), cfg);
        break;
      case Family::kinematic:
        if (!problem.kinematic) throw DomainError(problem.name + " has no kinematic form");
        sol = integrate(with_span(*problem.kinematic, t_end), cfg);
        break;
      case Family::dynamic:
        if (!problem.dynamic) throw DomainError(problem.name + " has no dynamic form");
        sol = integrate(with_span(*problem.dynamic, t_end), cfg);
        break;
    }
    const auto& last = sol.records.back();
    table.points.push_back({h, euclidean_norm(last.x - problem.exact_x(t_end))});
  }
  table.slope = fit_loglog_slope(table.points);
  return table;
}

ConvergenceTable startup_local_study(const ClosedFormProblem& problem, Family family,
                                     std::span<const double> step_sizes) {
  check_grid(step_sizes);
  ConvergenceTable table;
  for (double h : step_sizes) {
    StepResult r;
    switch (family) {
      case Family::first_order: {
        if (!problem.first_order) throw DomainError(problem.name + " has no first-order form");
        const auto& p = *problem.first_order;
        r = steppers::heun_start(p, h, steppers::initial_node(p));
        break;
      }
      case Family::kinematic: {
        if (!problem.kinematic) throw DomainError(problem.name + " has no kinematic form");
        const auto& p = *problem.kinematic;
        r = steppers::startup_second_order(p, h, steppers::initial_node(p));
        break;
      }
      case Family::dynamic: {
        if (!problem.dynamic) throw DomainError(problem.name + " has no dynamic form");
        const auto& p = *problem.dynamic;
        r = steppers::startup_dynamic(p, h, steppers::initial_node(p));
        break;
      }
    }
    table.points.push_back({h, euclidean_norm(r.x - problem.exact_x(h))});
  }
  table.slope = fit_loglog_slope(table.points);
  return table;
}

}  // namespace pece
