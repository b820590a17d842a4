#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pece/driver.hpp"
#include "pece/problems.hpp"

using namespace pece;
using doctest::Approx;

namespace {

FirstOrderProblem decay(double t_end, int n) {
  FirstOrderProblem p;
  p.velocity = [](double, const StateVector& x) { return -1.0 * x; };
  p.x0 = StateVector{1.0};
  p.t_end = t_end;
  p.n_global = n;
  return p;
}

DynamicProblem oscillator(double t_end, int n) {
  DynamicProblem p;
  p.acceleration = [](double, const StateVector& x, const StateVector&) { return -1.0 * x; };
  p.x0 = StateVector{1.0};
  p.v0 = StateVector{0.0};
  p.t_end = t_end;
  p.n_global = n;
  return p;
}

IntegrationConfig with_tol(double tol) {
  IntegrationConfig c;
  c.tol = tol;
  return c;
}

double max_eps(const SolutionSeries& s) {
  double m = 0.0;
  for (const auto& e : s.error_trace) m = std::max(m, e.eps);
  return m;
}

void check_bookkeeping(const SolutionSeries& s, double t_end, int n) {
  REQUIRE(s.records.size() == static_cast<std::size_t>(n) + 1);
  const double dt = t_end / n;
  for (std::size_t i = 0; i < s.records.size(); ++i) {
    CHECK(s.records[i].t == dt * static_cast<double>(i));
  }
  CHECK(s.stats.local_steps == static_cast<long>(s.error_trace.size()));
  CHECK(s.stats.doublings == static_cast<long>(s.doubling_events.size()));
  CHECK(s.stats.restarts <= s.stats.halvings);
  for (std::size_t i = 1; i < s.error_trace.size(); ++i) {
    CHECK(s.error_trace[i].t > s.error_trace[i - 1].t);
  }
  for (std::size_t k : s.doubling_events) {
    REQUIRE(k + 1 < s.error_trace.size());
    CHECK(s.error_trace[k + 1].h == 2.0 * s.error_trace[k].h);
  }
}

}  // namespace

TEST_CASE("exponential decay reaches e^-1") {
  const auto s = integrate(decay(1.0, 10), with_tol(1e-6));
  CHECK(std::abs(s.records.back().x[0] - std::exp(-1.0)) < 1e-4);
  check_bookkeeping(s, 1.0, 10);
  CHECK(max_eps(s) <= 1e-6);
}

TEST_CASE("harmonic oscillator returns after one period") {
  const double T = 2.0 * std::numbers::pi;
  auto cfg = with_tol(1e-6);
  cfg.variant = steppers::CorrectorVariant::type2;
  const auto s = integrate(oscillator(T, 100), cfg);
  REQUIRE(s.records.back().v.has_value());
  CHECK(std::abs(s.records.back().x[0] - 1.0) < 1e-3);
  CHECK(std::abs((*s.records.back().v)[0]) < 1e-3);
  check_bookkeeping(s, T, 100);
}

TEST_CASE("kinematic harmonic oscillator under control") {
  const auto cf = problems::harmonic_oscillator();
  auto p = *cf.kinematic;
  p.t_end = 3.0;
  p.n_global = 30;
  const auto s = integrate(p, with_tol(1e-6));
  CHECK(std::abs(s.records.back().x[0] - std::cos(3.0)) < 1e-3);
  check_bookkeeping(s, 3.0, 30);
}

TEST_CASE("fixed step runs take exactly N times S steps") {
  IntegrationConfig cfg;
  cfg.fixed_substeps = 8;
  const auto s = integrate(decay(2.0, 10), cfg);
  CHECK(s.stats == RunStatistics{80, 0, 0, 0});
  CHECK(s.error_trace.size() == 80);
  for (const auto& e : s.error_trace) CHECK(e.h == Approx(0.025).epsilon(1e-15));
  check_bookkeeping(s, 2.0, 10);

  const auto d = integrate(oscillator(1.0, 5), cfg);
  CHECK(d.stats == RunStatistics{40, 0, 0, 0});
}

TEST_CASE("integrations are deterministic") {
  const auto pre = problems::brusselator_limit_cycle();
  const auto p = problems::brusselator_problem(pre.params, 5.0, 50);
  const auto a = integrate(p, IntegrationConfig{});
  const auto b = integrate(p, IntegrationConfig{});
  CHECK(a.stats == b.stats);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].t == b.records[i].t);
    CHECK(a.records[i].x == b.records[i].x);
  }
  REQUIRE(a.error_trace.size() == b.error_trace.size());
  for (std::size_t i = 0; i < a.error_trace.size(); ++i) {
    CHECK(a.error_trace[i].eps == b.error_trace[i].eps);
    CHECK(a.error_trace[i].h == b.error_trace[i].h);
  }
}

TEST_CASE("tighter tolerance never raises the largest recorded error") {
  const auto lc = problems::brusselator_limit_cycle();
  const auto stiff = problems::brusselator_stiff();
  const auto lc_p = problems::brusselator_problem(lc.params, lc.t_end, lc.n_global);
  const auto stiff_p = problems::brusselator_problem(stiff.params, stiff.t_end, stiff.n_global);
  for (double tol : {1e-3, 1e-4, 1e-5}) {
    CHECK(max_eps(integrate(lc_p, with_tol(tol / 10))) <= max_eps(integrate(lc_p, with_tol(tol))));
    CHECK(max_eps(integrate(stiff_p, with_tol(tol / 10))) <=
          max_eps(integrate(stiff_p, with_tol(tol))));
    CHECK(max_eps(integrate(decay(1.0, 10), with_tol(tol / 10))) <=
          max_eps(integrate(decay(1.0, 10), with_tol(tol))));
  }
}

TEST_CASE("controlled runs keep every accepted error within tolerance") {
  const auto pre = problems::brusselator_limit_cycle();
  for (const auto& ic : problems::brusselator_table_ics()) {
    auto params = pre.params;
    params.y0 = ic;
    const auto s = integrate(problems::brusselator_problem(params, pre.t_end, pre.n_global),
                             IntegrationConfig{});
    CHECK(max_eps(s) <= 1e-4);
    check_bookkeeping(s, pre.t_end, pre.n_global);
  }
}

TEST_CASE("a persistent discontinuity aborts with a step underflow") {
  FirstOrderProblem p;
  p.velocity = [](double t, const StateVector&) { return StateVector{t > 0.05 ? 1e20 : 0.0}; };
  p.x0 = StateVector{1.0};
  p.t_end = 1.0;
  p.n_global = 10;
  try {
    (void)integrate(p, IntegrationConfig{});
    FAIL("expected a step underflow");
  } catch (const IntegrationError& e) {
    CHECK(e.step() < 0.1 * kStepUnderflowFactor);
    CHECK(e.time() <= 0.05);
    CHECK(e.error() > 1e-4);
    CHECK(e.partial().records.size() >= 1);
    CHECK(e.partial().records.front().x == p.x0);
  }
}

TEST_CASE("callback failures propagate with their location") {
  FirstOrderProblem p;
  p.velocity = [](double t, const StateVector& x) {
    return StateVector{t > 0.3 ? std::nan("") : -x[0]};
  };
  p.x0 = StateVector{1.0};
  p.t_end = 1.0;
  p.n_global = 10;
  CHECK_THROWS_AS((void)integrate(p, IntegrationConfig{}), steppers::EvaluationError);
}

TEST_CASE("configuration is validated") {
  auto cfg = with_tol(1.0);
  CHECK_THROWS_AS((void)integrate(decay(1.0, 10), cfg), DomainError);
  cfg.allow_any_tolerance = true;
  CHECK_NOTHROW((void)integrate(decay(1.0, 10), cfg));
  IntegrationConfig bad_m;
  bad_m.m = 0;
  CHECK_THROWS_AS((void)integrate(decay(1.0, 10), bad_m), DomainError);
  CHECK_THROWS_AS((void)integrate(decay(1.0, 0), IntegrationConfig{}), DomainError);
  CHECK_THROWS_AS((void)integrate(decay(-1.0, 10), IntegrationConfig{}), DomainError);
}

TEST_CASE("extra correct-evaluate passes still meet the tolerance") {
  IntegrationConfig cfg;
  cfg.m = 3;
  const auto s = integrate(decay(1.0, 10), cfg);
  CHECK(std::abs(s.records.back().x[0] - std::exp(-1.0)) < 1e-3);
  CHECK(max_eps(s) <= cfg.tol);
}

TEST_CASE("convergence study on exponential decay") {
  const auto cf = problems::exp_decay();
  const double hs[] = {0.1, 0.05, 0.025, 0.0125};
  const auto t = convergence_study(cf, Family::first_order, steppers::CorrectorVariant::type2, hs,
                                   1.0);
  REQUIRE(t.points.size() == 4);
  CHECK(t.slope >= 1.75);
  CHECK(t.slope <= 2.25);
  for (std::size_t i = 1; i < t.points.size(); ++i) {
    CHECK(t.points[i].error < t.points[i - 1].error);
  }
}

TEST_CASE("convergence study of the kinematic type2 solver") {
  const auto cf = problems::harmonic_oscillator();
  const double hs[] = {0.1, 0.05, 0.025, 0.0125};
  const auto t =
      convergence_study(cf, Family::kinematic, steppers::CorrectorVariant::type2, hs, 1.0);
  CHECK(t.slope == Approx(3.0).epsilon(0.35 / 3.0));
}

TEST_CASE("startup local orders") {
  const double hs[] = {0.1, 0.05, 0.025, 0.0125};
  const auto heun = startup_local_study(problems::exp_decay(), Family::first_order, hs);
  CHECK(heun.slope >= 2.0);
  const auto taylor = startup_local_study(problems::harmonic_oscillator(), Family::kinematic, hs);
  CHECK(taylor.slope >= 4.0);
}

TEST_CASE("degenerate convergence grids are rejected") {
  const auto cf = problems::exp_decay();
  const auto v = steppers::CorrectorVariant::type2;
  const double one[] = {0.1};
  const double dup[] = {0.1, 0.1};
  const double ragged[] = {0.3, 0.15};
  CHECK_THROWS_AS((void)convergence_study(cf, Family::first_order, v, one, 1.0), DomainError);
  CHECK_THROWS_AS((void)convergence_study(cf, Family::first_order, v, dup, 1.0), DomainError);
  CHECK_THROWS_AS((void)convergence_study(cf, Family::first_order, v, ragged, 1.0), DomainError);
  const double ok[] = {0.1, 0.05};
  CHECK_THROWS_AS((void)convergence_study(cf, Family::first_order, v, ok, 0.0), DomainError);
}

TEST_CASE("log-log slope fit") {
  const ConvergencePoint pts[] = {{0.1, 3e-3}, {0.05, 7.5e-4}, {0.025, 1.875e-4}};
  CHECK(fit_loglog_slope(pts) == Approx(2.0).epsilon(1e-12));
  const ConvergencePoint zero[] = {{0.1, 0.0}, {0.05, 1e-3}};
  CHECK_THROWS_AS((void)fit_loglog_slope(zero), DomainError);
}

TEST_CASE("family names round trip") {
  for (auto f : {Family::first_order, Family::kinematic, Family::dynamic}) {
    CHECK(parse_family(to_string(f)) == f);
  }
  CHECK_FALSE(parse_family("stiff").has_value());
}
