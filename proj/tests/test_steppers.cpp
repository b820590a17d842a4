#include <cmath>
#include <functional>

#include <boost/rational.hpp>

#include "doctest.h"
#include "generators.hpp"
#include "pece/stencil.hpp"
#include "pece/steppers.hpp"

using namespace pece;
using namespace pece::steppers;

namespace {

using doctest::Approx;

double power(double t, int k) { return k < 0 ? 0.0 : std::pow(t, k); }

// Exact derivatives of x(t) = t^k.
double mono(int k, int deriv, double t) {
  double c = 1.0;
  for (int i = 0; i < deriv; ++i) c *= (k - i);
  return c == 0.0 ? 0.0 : c * power(t, k - deriv);
}

FirstOrderProblem monomial_first_order(int k) {
  FirstOrderProblem p;
  p.velocity = [k](double t, const StateVector&) { return StateVector{mono(k, 1, t)}; };
  p.x0 = StateVector{mono(k, 0, 0.0)};
  return p;
}

KinematicProblem monomial_kinematic(int k) {
  KinematicProblem p;
  p.velocity = [k](double t, const StateVector&) { return StateVector{mono(k, 1, t)}; };
  p.acceleration = [k](double t, const StateVector&, const StateVector&) {
    return StateVector{mono(k, 2, t)};
  };
  p.x0 = StateVector{mono(k, 0, 0.0)};
  return p;
}

// v(t) = t^k, so a = k t^(k-1); x is the antiderivative of v.
DynamicProblem monomial_velocity_dynamic(int k) {
  DynamicProblem p;
  p.acceleration = [k](double t, const StateVector&, const StateVector&) {
    return StateVector{mono(k, 1, t)};
  };
  p.x0 = StateVector{0.0};
  p.v0 = StateVector{mono(k, 0, 0.0)};
  return p;
}

NodeRecord exact_node(int k, double t, bool with_a) {
  NodeRecord n{t, StateVector{mono(k, 0, t)}, StateVector{mono(k, 1, t)}, std::nullopt};
  if (with_a) n.a = StateVector{mono(k, 2, t)};
  return n;
}

HistoryWindow exact_history(int k, double t_prev, double h, bool with_a) {
  HistoryWindow w;
  w.h = h;
  w.previous = exact_node(k, t_prev, with_a);
  w.current = exact_node(k, t_prev + h, with_a);
  return w;
}

// History for the velocity trajectory v = t^k of the paired solver.
HistoryWindow velocity_history(int k, double t_prev, double h) {
  auto node = [k](double t) {
    return NodeRecord{t, StateVector{0.0}, StateVector{mono(k, 0, t)},
                      StateVector{mono(k, 1, t)}};
  };
  HistoryWindow w;
  w.h = h;
  w.previous = node(t_prev);
  w.current = node(t_prev + h);
  return w;
}

double expected(const std::string& stencil_name, int k) {
  return boost::rational_cast<double>(
      stencil::monomial_value(stencil::catalogue_entry(stencil_name).stencil, k));
}

const char* corrector_name(CorrectorVariant v) {
  switch (v) {
    case CorrectorVariant::averaged: return "averaged-corrector";
    case CorrectorVariant::type1: return "type1-corrector";
    case CorrectorVariant::type2: return "type2-corrector";
  }
  return "";
}

constexpr CorrectorVariant kVariants[] = {CorrectorVariant::averaged, CorrectorVariant::type1,
                                          CorrectorVariant::type2};

}  // namespace

TEST_CASE("heun start examples") {
  FirstOrderProblem still;
  still.velocity = [](double, const StateVector&) { return StateVector{0.0}; };
  still.x0 = StateVector{3.5};
  auto r = heun_start(still, 0.2, initial_node(still));
  CHECK(r.x_pred == StateVector{3.5});
  CHECK(r.x == StateVector{3.5});

  FirstOrderProblem growth;
  growth.velocity = [](double, const StateVector& x) { return x; };
  growth.x0 = StateVector{1.0};
  r = heun_start(growth, 0.1, initial_node(growth));
  CHECK(r.x_pred[0] == Approx(1.1).epsilon(1e-15));
  CHECK(r.x[0] == Approx(1.105).epsilon(1e-15));
  CHECK(std::abs(r.x[0] - std::exp(0.1)) < 0.1 * 0.1 * 0.1);
  CHECK(r.v == r.x);
  CHECK(r.t == 0.1);

  for (double h : {0.5, 0.125, 3.0}) {
    r = heun_start(monomial_first_order(2), h, initial_node(monomial_first_order(2)));
    CHECK(r.x[0] == Approx(h * h).epsilon(1e-15));
  }
}

TEST_CASE("first-order two-step examples") {
  FirstOrderProblem still;
  still.velocity = [](double, const StateVector&) { return StateVector{0.0}; };
  HistoryWindow w;
  w.h = 0.1;
  w.previous = NodeRecord{0.0, StateVector{2.0}, StateVector{0.0}, std::nullopt};
  w.current = NodeRecord{0.1, StateVector{2.0}, StateVector{0.0}, std::nullopt};
  auto r = pece_first_order_step(still, w);
  CHECK(r.x[0] == Approx(2.0).epsilon(1e-15));

  const double h = 0.25;
  r = pece_first_order_step(monomial_first_order(2), exact_history(2, 0.0, h, false));
  CHECK(r.x_pred[0] == Approx(4 * h * h).epsilon(1e-14));
  CHECK(r.x[0] == Approx(4 * h * h).epsilon(1e-14));

  r = pece_first_order_step(monomial_first_order(3), exact_history(3, 0.0, h, false));
  CHECK(r.x_pred[0] == Approx(16.0 * h * h * h / 3.0).epsilon(1e-14));
  CHECK(r.x_pred[0] != Approx(8 * h * h * h));
}

TEST_CASE("second-order startup examples") {
  KinematicProblem still;
  still.velocity = [](double, const StateVector&) { return StateVector{0.0, 0.0}; };
  still.acceleration = [](double, const StateVector&, const StateVector&) {
    return StateVector{0.0, 0.0};
  };
  still.x0 = StateVector{1.0, -2.0};
  auto r = startup_second_order(still, 0.3, initial_node(still));
  CHECK(r.x == still.x0);

  for (double h : {0.5, 0.1, 2.0}) {
    auto p3 = monomial_kinematic(3);
    r = startup_second_order(p3, h, initial_node(p3));
    CHECK(r.x[0] == Approx(h * h * h).epsilon(1e-14));
    auto p4 = monomial_kinematic(4);
    r = startup_second_order(p4, h, initial_node(p4));
    CHECK(r.x[0] == Approx(std::pow(h, 4)).epsilon(1e-14));
    REQUIRE(r.a.has_value());
    CHECK((*r.a)[0] == Approx(12 * h * h).epsilon(1e-14));
  }
}

TEST_CASE("second-order two-step examples") {
  const double h = 0.5;
  auto r = pece_second_order_step(monomial_kinematic(3), exact_history(3, 0.0, h, true),
                                  CorrectorVariant::type2);
  CHECK(r.x_pred[0] == Approx(8 * h * h * h).epsilon(1e-14));

  r = pece_second_order_step(monomial_kinematic(2), exact_history(2, 0.0, h, true),
                             CorrectorVariant::type2);
  CHECK(r.x[0] == Approx(4 * h * h).epsilon(1e-14));

  r = pece_second_order_step(monomial_kinematic(2), exact_history(2, 0.0, h, true),
                             CorrectorVariant::averaged);
  CHECK(r.x[0] == Approx(13.0 * h * h / 3.0).epsilon(1e-14));
}

TEST_CASE("paired startup examples") {
  DynamicProblem coast;
  coast.acceleration = [](double, const StateVector&, const StateVector&) {
    return StateVector{0.0};
  };
  coast.x0 = StateVector{1.0};
  coast.v0 = StateVector{2.0};
  auto r = startup_dynamic(coast, 0.25, initial_node(coast));
  CHECK(r.v[0] == 2.0);
  CHECK(r.x[0] == Approx(1.5).epsilon(1e-15));

  const double g = -9.5;
  DynamicProblem fall;
  fall.acceleration = [g](double, const StateVector&, const StateVector&) {
    return StateVector{g};
  };
  fall.x0 = StateVector{10.0};
  fall.v0 = StateVector{3.0};
  const double h = 0.3;
  r = startup_dynamic(fall, h, initial_node(fall));
  CHECK(r.v[0] == Approx(3.0 + g * h).epsilon(1e-15));
  CHECK(r.x[0] == Approx(10.0 + 3.0 * h + 0.5 * g * h * h).epsilon(1e-15));

  DynamicProblem spring;
  spring.acceleration = [](double, const StateVector& x, const StateVector&) { return -1.0 * x; };
  spring.x0 = StateVector{1.0};
  spring.v0 = StateVector{0.0};
  r = startup_dynamic(spring, 0.1, initial_node(spring));
  // x^p = 0.995, v^p = -0.1, a^p = -0.995; x1 = 1 - 0.005 - (0.01/12)(0.005)
  CHECK(r.x[0] == Approx(0.995 - 0.01 / 12.0 * 0.005).epsilon(1e-15));
  CHECK(r.v[0] == Approx(-0.05 * (0.995 + 1.0)).epsilon(1e-15));
  CHECK(std::abs(r.x[0] - std::cos(0.1)) < std::pow(0.1, 5));
}

TEST_CASE("paired two-step examples") {
  DynamicProblem coast;
  coast.acceleration = [](double, const StateVector&, const StateVector&) {
    return StateVector{0.0};
  };
  const double h = 0.2;
  HistoryWindow w;
  w.h = h;
  w.previous = NodeRecord{0.0, StateVector{1.0}, StateVector{3.0}, StateVector{0.0}};
  w.current = NodeRecord{h, StateVector{1.0 + 3.0 * h}, StateVector{3.0}, StateVector{0.0}};
  for (auto v : kVariants) {
    const auto r = pece_dynamic_step(coast, w, v);
    CHECK(r.x[0] == Approx(1.0 + 6.0 * h).epsilon(1e-15));
    CHECK(r.v[0] == Approx(3.0).epsilon(1e-15));
  }

  auto r = pece_dynamic_step(monomial_velocity_dynamic(2), velocity_history(2, 0.0, h),
                             CorrectorVariant::type2);
  CHECK(r.v[0] == Approx(4 * h * h).epsilon(1e-14));

  const double g = 4.0;
  DynamicProblem lift;
  lift.acceleration = [g](double, const StateVector&, const StateVector&) {
    return StateVector{g};
  };
  auto node = [g](double t) {
    return NodeRecord{t, StateVector{0.5 * g * t * t}, StateVector{g * t}, StateVector{g}};
  };
  w.previous = node(0.0);
  w.current = node(h);
  r = pece_dynamic_step(lift, w, CorrectorVariant::type2);
  CHECK(r.v[0] == Approx(2 * g * h).epsilon(1e-14));
  CHECK(r.x[0] == Approx(0.5 * g * 4 * h * h).epsilon(1e-14));
  REQUIRE(r.v_pred.has_value());
  CHECK((*r.v_pred)[0] == Approx(2 * g * h).epsilon(1e-14));
}

TEST_CASE("steppers agree with the stencil catalogue on monomials") {
  // Nodes t_{n-1} = 0, t_n = 1, t_{n+1} = 2 with h = 1, as in monomial_value.
  for (int k = 0; k <= 6; ++k) {
    INFO("k = " << k);
    {
      const auto p = monomial_first_order(k);
      const auto r = heun_start(p, 1.0, exact_node(k, 1.0, false));
      CHECK(r.x_pred[0] == Approx(expected("heun-predictor", k)).epsilon(1e-13));
      CHECK(r.x[0] == Approx(expected("heun-corrector", k)).epsilon(1e-13));
    }
    {
      const auto r = pece_first_order_step(monomial_first_order(k), exact_history(k, 0.0, 1.0, false));
      CHECK(r.x_pred[0] == Approx(expected("bdf2-predictor", k)).epsilon(1e-13));
      CHECK(r.x[0] == Approx(expected("bdf2-corrector", k)).epsilon(1e-13));
    }
    {
      const auto r = startup_second_order(monomial_kinematic(k), 1.0, exact_node(k, 1.0, true));
      CHECK(r.x_pred[0] == Approx(expected("taylor-startup-predictor", k)).epsilon(1e-13));
      CHECK(r.x[0] == Approx(expected("startup-corrector", k)).epsilon(1e-13));
    }
    for (auto v : kVariants) {
      const auto r =
          pece_second_order_step(monomial_kinematic(k), exact_history(k, 0.0, 1.0, true), v);
      CHECK(r.x_pred[0] == Approx(expected("second-order-predictor", k)).epsilon(1e-13));
      CHECK(r.x[0] == Approx(expected(corrector_name(v), k)).epsilon(1e-13));
    }
    {
      const auto p = monomial_velocity_dynamic(k);
      auto start = velocity_history(k, 0.0, 1.0).current;
      const auto r0 = startup_dynamic(p, 1.0, start);
      CHECK((*r0.v_pred)[0] == Approx(expected("velocity-startup-predictor", k)).epsilon(1e-13));
      CHECK(r0.v[0] == Approx(expected("velocity-startup-corrector", k)).epsilon(1e-13));
      const auto r = pece_dynamic_step(p, velocity_history(k, 0.0, 1.0), CorrectorVariant::type2);
      CHECK((*r.v_pred)[0] == Approx(expected("velocity-predictor", k)).epsilon(1e-13));
      CHECK(r.v[0] == Approx(expected("velocity-corrector", k)).epsilon(1e-13));
    }
  }
}

TEST_CASE("derivatives are re-evaluated at the corrected state") {
  FirstOrderProblem p;
  p.velocity = [](double t, const StateVector& x) { return StateVector{t - x[0] * x[0]}; };
  p.x0 = StateVector{0.7};
  const auto r = heun_start(p, 0.1, initial_node(p));
  CHECK(r.v == p.velocity(r.t, r.x));

  DynamicProblem d;
  d.acceleration = [](double t, const StateVector& x, const StateVector& v) {
    return StateVector{std::sin(t) - x[0] - 0.3 * v[0] * std::abs(v[0])};
  };
  d.x0 = StateVector{0.2};
  d.v0 = StateVector{-0.4};
  const auto s = startup_dynamic(d, 0.05, initial_node(d));
  CHECK(*s.a == d.acceleration(s.t, s.x, s.v));
}

TEST_CASE("extra correct-evaluate passes converge to the implicit trapezoid") {
  const double lambda = -1.0;
  const double h = 0.1;
  FirstOrderProblem p;
  p.velocity = [lambda](double, const StateVector& x) { return lambda * x; };
  p.x0 = StateVector{1.0};
  const double implicit = (1.0 + 0.5 * lambda * h) / (1.0 - 0.5 * lambda * h);
  const auto once = heun_start(p, h, initial_node(p), 1);
  const auto many = heun_start(p, h, initial_node(p), 40);
  CHECK(std::abs(many.x[0] - implicit) < 1e-15);
  CHECK(std::abs(once.x[0] - implicit) > 1e-5);
  CHECK(many.x_pred == once.x_pred);
}

TEST_CASE("non-finite callback output raises an evaluation error") {
  FirstOrderProblem p;
  p.velocity = [](double t, const StateVector&) {
    return StateVector{t > 0.0 ? std::nan("") : 1.0};
  };
  p.x0 = StateVector{0.0};
  try {
    (void)heun_start(p, 0.5, initial_node(p));
    FAIL("expected an evaluation error");
  } catch (const EvaluationError& e) {
    CHECK(e.time() == 0.5);
    CHECK(e.state().size() == 1);
  }
  FirstOrderProblem wrong;
  wrong.velocity = [](double, const StateVector&) { return StateVector{1.0, 2.0}; };
  wrong.x0 = StateVector{0.0};
  CHECK_THROWS_AS((void)initial_node(wrong), EvaluationError);
}

TEST_CASE("property: autonomous steps are invariant under time translation") {
  testing::Generator gen(31);
  FirstOrderProblem f;
  f.velocity = [](double, const StateVector& x) { return StateVector{x[1], -std::sin(x[0])}; };
  KinematicProblem k;
  k.velocity = [](double, const StateVector& x) { return StateVector{-x[0] * x[0]}; };
  k.acceleration = [](double, const StateVector& x, const StateVector& v) {
    return StateVector{-2.0 * x[0] * v[0]};
  };
  DynamicProblem d;
  d.acceleration = [](double, const StateVector& x, const StateVector& v) {
    return StateVector{-x[0] - 0.1 * v[0] * v[0] * v[0]};
  };
  for (int i = 0; i < 50; ++i) {
    const double h = gen.real(0.01, 0.2);
    const double t0 = gen.real(-5.0, 5.0);
    const double tau = gen.real(-100.0, 100.0);

    auto shift = [](HistoryWindow w, double by) {
      w.previous->t += by;
      w.current.t += by;
      return w;
    };

    const NodeRecord f0{t0, gen.vector(2, -1, 1), {}, std::nullopt};
    NodeRecord fs = f0;
    fs.v = f.velocity(0, fs.x);
    HistoryWindow fw;
    fw.h = h;
    fw.previous = fs;
    fw.current = heun_start(f, h, fs).node();
    CHECK(heun_start(f, h, fs).x == heun_start(f, h, {t0 + tau, fs.x, fs.v, std::nullopt}).x);
    CHECK(pece_first_order_step(f, fw).x == pece_first_order_step(f, shift(fw, tau)).x);

    NodeRecord ks{t0, gen.vector(1, 0.1, 1), {}, std::nullopt};
    ks.v = k.velocity(0, ks.x);
    ks.a = k.acceleration(0, ks.x, ks.v);
    HistoryWindow kw;
    kw.h = h;
    kw.previous = ks;
    kw.current = startup_second_order(k, h, ks).node();
    for (auto v : kVariants) {
      CHECK(pece_second_order_step(k, kw, v).x == pece_second_order_step(k, shift(kw, tau), v).x);
    }

    NodeRecord ds{t0, gen.vector(1, -1, 1), gen.vector(1, -1, 1), std::nullopt};
    ds.a = d.acceleration(0, ds.x, ds.v);
    HistoryWindow dw;
    dw.h = h;
    dw.previous = ds;
    dw.current = startup_dynamic(d, h, ds).node();
    const auto a = pece_dynamic_step(d, dw, CorrectorVariant::type2);
    const auto b = pece_dynamic_step(d, shift(dw, tau), CorrectorVariant::type2);
    CHECK(a.x == b.x);
    CHECK(a.v == b.v);
  }
}

TEST_CASE("property: steps are linear in the state for linear fields") {
  testing::Generator gen(32);
  auto field = [](double, const StateVector& x) {
    return StateVector{-0.5 * x[0] + 2.0 * x[1], -3.0 * x[0] - 0.1 * x[1]};
  };
  DynamicProblem d;
  d.acceleration = [](double, const StateVector& x, const StateVector& v) {
    return StateVector{-4.0 * x[0] - 0.2 * v[0] + x[1], -x[1] + 0.5 * v[0]};
  };
  FirstOrderProblem f;
  f.velocity = field;
  for (int i = 0; i < 50; ++i) {
    const double h = gen.real(0.01, 0.3);
    const auto x = gen.vector(2, -1, 1);
    const auto y = gen.vector(2, -1, 1);
    auto start = [&](const StateVector& s) { return NodeRecord{0.0, s, field(0, s), std::nullopt}; };
    const auto rx = heun_start(f, h, start(x));
    const auto ry = heun_start(f, h, start(y));
    const auto rs = heun_start(f, h, start(x + y));
    auto window = [&](const NodeRecord& n0, const StepResult& n1) {
      HistoryWindow w;
      w.h = h;
      w.previous = n0;
      w.current = n1.node();
      return w;
    };
    const auto sx = pece_first_order_step(f, window(start(x), rx));
    const auto sy = pece_first_order_step(f, window(start(y), ry));
    const auto ss = pece_first_order_step(f, window(start(x + y), rs));
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(std::abs(rs.x[j] - (rx.x[j] + ry.x[j])) < 1e-14);
      CHECK(std::abs(ss.x[j] - (sx.x[j] + sy.x[j])) < 1e-14);
    }

    const auto vx = gen.vector(2, -1, 1);
    const auto vy = gen.vector(2, -1, 1);
    auto dstart = [&](const StateVector& s, const StateVector& v) {
      return NodeRecord{0.0, s, v, d.acceleration(0, s, v)};
    };
    const auto dx = startup_dynamic(d, h, dstart(x, vx));
    const auto dy = startup_dynamic(d, h, dstart(y, vy));
    const auto ds = startup_dynamic(d, h, dstart(x + y, vx + vy));
    const auto px = pece_dynamic_step(d, window(dstart(x, vx), dx), CorrectorVariant::type2);
    const auto py = pece_dynamic_step(d, window(dstart(y, vy), dy), CorrectorVariant::type2);
    const auto ps =
        pece_dynamic_step(d, window(dstart(x + y, vx + vy), ds), CorrectorVariant::type2);
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(std::abs(ps.x[j] - (px.x[j] + py.x[j])) < 1e-14);
      CHECK(std::abs(ps.v[j] - (px.v[j] + py.v[j])) < 1e-14);
    }
  }
}

TEST_CASE("variant names round trip") {
  for (auto v : kVariants) CHECK(parse_variant(to_string(v)) == v);
  CHECK_FALSE(parse_variant("type3").has_value());
}
