#include "pece/steppers.hpp"

#include <functional>
#include <initializer_list>
#include <utility>

namespace pece::steppers {

namespace {

using Term = std::pair<double, std::reference_wrapper<const StateVector>>;

StateVector lincomb(std::initializer_list<Term> terms) {
  const StateVector& first = terms.begin()->second.get();
  StateVector out(first.size());
  for (const auto& [c, vec] : terms) {
    const StateVector& x = vec.get();
    require_same_size(out, x);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * x[i];
  }
  return out;
}

void check_start(double h, int m) {
  if (!(h > 0.0)) throw DomainError("step size must be positive");
  if (m < 1) throw DomainError("PE(CE)^m needs m >= 1");
}

const NodeRecord& check_history(const HistoryWindow& history, int m) {
  check_start(history.h, m);
  if (!history.previous) throw DomainError("two-step method needs nodes n-1 and n");
  return *history.previous;
}

const StateVector& accel_of(const NodeRecord& r) {
  if (!r.a) throw DomainError("history record lacks acceleration");
  return *r.a;
}

struct CorrectorWeights {
  double vp, vn, vm;
  double ap, an, am;
};

constexpr CorrectorWeights weights_for(CorrectorVariant v) {
  switch (v) {
    case CorrectorVariant::averaged:
      return {1.0 / 24.0, 14.0 / 24.0, 1.0 / 24.0, 10.0 / 72.0, 51.0 / 72.0, -1.0 / 72.0};
    case CorrectorVariant::type1:
      return {1.0 / 9.0, 5.0 / 9.0, 0.0, 2.0 / 9.0, 6.0 / 9.0, 0.0};
    case CorrectorVariant::type2:
      return {-1.0 / 36.0, 22.0 / 36.0, 3.0 / 36.0, 2.0 / 36.0, 27.0 / 36.0, -1.0 / 36.0};
  }
  return {};
}

// (4 y_n - y_{n-1}) / 3, shared by every two-step formula.
StateVector bdf_base(const StateVector& yn, const StateVector& ym) {
  return lincomb({{4.0 / 3.0, yn}, {-1.0 / 3.0, ym}});
}

// Predictor for x shared by the second-order and paired solvers.
StateVector second_order_predictor(const NodeRecord& n, const NodeRecord& m, double h) {
  return bdf_base(n.x, m.x) + lincomb({{h / 2.0, n.v},
                                       {h / 6.0, m.v},
                                       {h * h * 31.0 / 36.0, accel_of(n)},
                                       {-h * h / 36.0, accel_of(m)}});
}

StateVector second_order_corrector(const NodeRecord& n, const NodeRecord& m, double h,
                                   const StateVector& v_next, const StateVector& a_next,
                                   CorrectorVariant variant) {
  const CorrectorWeights w = weights_for(variant);
  const double h2 = h * h;
  return bdf_base(n.x, m.x) + lincomb({{h * w.vp, v_next},
                                       {h * w.vn, n.v},
                                       {h * w.vm, m.v},
                                       {h2 * w.ap, a_next},
                                       {h2 * w.an, accel_of(n)},
                                       {h2 * w.am, accel_of(m)}});
}

}  // namespace

const char* to_string(CorrectorVariant v) {
  switch (v) {
    case CorrectorVariant::averaged: return "averaged";
    case CorrectorVariant::type1: return "type1";
    case CorrectorVariant::type2: return "type2";
  }
  return "?";
}

std::optional<CorrectorVariant> parse_variant(const std::string& s) {
  if (s == "averaged") return CorrectorVariant::averaged;
  if (s == "type1") return CorrectorVariant::type1;
  if (s == "type2") return CorrectorVariant::type2;
  return std::nullopt;
}

StateVector eval_velocity(const VelocityFn& f, double t, const StateVector& x) {
  StateVector v = f(t, x);
  if (v.size() != x.size() || !v.all_finite()) {
    throw EvaluationError("velocity callback returned an invalid vector", t, x);
  }
  return v;
}

StateVector eval_acceleration(const AccelerationFn& f, double t, const StateVector& x,
                              const StateVector& v) {
  StateVector a = f(t, x, v);
  if (a.size() != x.size() || !a.all_finite()) {
    throw EvaluationError("acceleration callback returned an invalid vector", t, x);
  }
  return a;
}

NodeRecord initial_node(const FirstOrderProblem& p) {
  if (!p.x0.all_finite()) throw InvalidStateError("non-finite initial condition");
  return {0.0, p.x0, eval_velocity(p.velocity, 0.0, p.x0), std::nullopt};
}

NodeRecord initial_node(const KinematicProblem& p) {
  if (!p.x0.all_finite()) throw InvalidStateError("non-finite initial condition");
  StateVector v0 = eval_velocity(p.velocity, 0.0, p.x0);
  StateVector a0 = eval_acceleration(p.acceleration, 0.0, p.x0, v0);
  return {0.0, p.x0, std::move(v0), std::move(a0)};
}

NodeRecord initial_node(const DynamicProblem& p) {
  require_same_size(p.x0, p.v0);
  if (!p.x0.all_finite() || !p.v0.all_finite()) {
    throw InvalidStateError("non-finite initial condition");
  }
  return {0.0, p.x0, p.v0, eval_acceleration(p.acceleration, 0.0, p.x0, p.v0)};
}

StepResult heun_start(const FirstOrderProblem& p, double h, const NodeRecord& start, int m) {
  check_start(h, m);
  StepResult r;
  r.t = start.t + h;
  r.x_pred = lincomb({{1.0, start.x}, {h, start.v}});
  StateVector v_next = eval_velocity(p.velocity, r.t, r.x_pred);
  for (int pass = 0; pass < m; ++pass) {
    r.x = lincomb({{1.0, start.x}, {h / 2.0, v_next}, {h / 2.0, start.v}});
    v_next = eval_velocity(p.velocity, r.t, r.x);
  }
  r.v = std::move(v_next);
  return r;
}

StepResult pece_first_order_step(const FirstOrderProblem& p, const HistoryWindow& history, int m) {
  const NodeRecord& prev = check_history(history, m);
  const NodeRecord& cur = history.current;
  const double h = history.h;
  StepResult r;
  r.t = cur.t + h;
  const StateVector base = bdf_base(cur.x, prev.x);
  r.x_pred = base + lincomb({{4.0 * h / 3.0, cur.v}, {-2.0 * h / 3.0, prev.v}});
  StateVector v_next = eval_velocity(p.velocity, r.t, r.x_pred);
  for (int pass = 0; pass < m; ++pass) {
    r.x = base + (2.0 * h / 3.0) * v_next;
    v_next = eval_velocity(p.velocity, r.t, r.x);
  }
  r.v = std::move(v_next);
  return r;
}

StepResult startup_second_order(const KinematicProblem& p, double h, const NodeRecord& start,
                                int m) {
  check_start(h, m);
  const StateVector& a0 = accel_of(start);
  StepResult r;
  r.t = start.t + h;
  r.x_pred = lincomb({{1.0, start.x}, {h, start.v}, {h * h / 2.0, a0}});
  StateVector v_next = eval_velocity(p.velocity, r.t, r.x_pred);
  StateVector a_next = eval_acceleration(p.acceleration, r.t, r.x_pred, v_next);
  for (int pass = 0; pass < m; ++pass) {
    r.x = lincomb({{1.0, start.x},
                   {h / 2.0, v_next},
                   {h / 2.0, start.v},
                   {-h * h / 12.0, a_next},
                   {h * h / 12.0, a0}});
    v_next = eval_velocity(p.velocity, r.t, r.x);
    a_next = eval_acceleration(p.acceleration, r.t, r.x, v_next);
  }
  r.v = std::move(v_next);
  r.a = std::move(a_next);
  return r;
}

StepResult pece_second_order_step(const KinematicProblem& p, const HistoryWindow& history,
                                  CorrectorVariant variant, int m) {
  const NodeRecord& prev = check_history(history, m);
  const NodeRecord& cur = history.current;
  const double h = history.h;
  StepResult r;
  r.t = cur.t + h;
  r.x_pred = second_order_predictor(cur, prev, h);
  StateVector v_next = eval_velocity(p.velocity, r.t, r.x_pred);
  StateVector a_next = eval_acceleration(p.acceleration, r.t, r.x_pred, v_next);
  for (int pass = 0; pass < m; ++pass) {
    r.x = second_order_corrector(cur, prev, h, v_next, a_next, variant);
    v_next = eval_velocity(p.velocity, r.t, r.x);
    a_next = eval_acceleration(p.acceleration, r.t, r.x, v_next);
  }
  r.v = std::move(v_next);
  r.a = std::move(a_next);
  return r;
}

StepResult startup_dynamic(const DynamicProblem& p, double h, const NodeRecord& start, int m) {
  check_start(h, m);
  const StateVector& a0 = accel_of(start);
  StepResult r;
  r.t = start.t + h;
  r.x_pred = lincomb({{1.0, start.x}, {h, start.v}, {h * h / 2.0, a0}});
  r.v_pred = lincomb({{1.0, start.v}, {h, a0}});
  StateVector v_next = *r.v_pred;
  StateVector a_next = eval_acceleration(p.acceleration, r.t, r.x_pred, v_next);
  for (int pass = 0; pass < m; ++pass) {
    r.x = lincomb({{1.0, start.x},
                   {h / 2.0, v_next},
                   {h / 2.0, start.v},
                   {-h * h / 12.0, a_next},
                   {h * h / 12.0, a0}});
    v_next = lincomb({{1.0, start.v}, {h / 2.0, a_next}, {h / 2.0, a0}});
    a_next = eval_acceleration(p.acceleration, r.t, r.x, v_next);
  }
  r.v = std::move(v_next);
  r.a = std::move(a_next);
  return r;
}

StepResult pece_dynamic_step(const DynamicProblem& p, const HistoryWindow& history,
                             CorrectorVariant variant, int m) {
  const NodeRecord& prev = check_history(history, m);
  const NodeRecord& cur = history.current;
  const double h = history.h;
  StepResult r;
  r.t = cur.t + h;
  r.x_pred = second_order_predictor(cur, prev, h);
  const StateVector v_base = bdf_base(cur.v, prev.v);
  r.v_pred = v_base + lincomb({{4.0 * h / 3.0, accel_of(cur)}, {-2.0 * h / 3.0, accel_of(prev)}});
  StateVector v_next = *r.v_pred;
  StateVector a_next = eval_acceleration(p.acceleration, r.t, r.x_pred, v_next);
  for (int pass = 0; pass < m; ++pass) {
    r.x = second_order_corrector(cur, prev, h, v_next, a_next, variant);
    v_next = v_base + (2.0 * h / 3.0) * a_next;
    a_next = eval_acceleration(p.acceleration, r.t, r.x, v_next);
  }
  r.v = std::move(v_next);
  r.a = std::move(a_next);
  return r;
}

}  // namespace pece::steppers
