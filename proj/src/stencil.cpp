#include "pece/stencil.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "pece/core.hpp"

namespace pece::stencil {

namespace {

// Node offsets from t_n in units of h, in slot order n+1, n, n-1.
constexpr std::array<int, 3> kOffset{1, 0, -1};

Rational factorial(int k) {
  std::int64_t f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return Rational(f);
}

Rational ipow(int base, int e) {
  if (e < 0) return Rational(0);
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return Rational(r);
}

// Coefficient of h^k x^{(k)}(t_n) contributed by a unit weight on a value of
// derivative order `deriv` sampled at offset `tau`, including the h^deriv
// factor carried by the weight.
Rational series_term(int deriv, int tau, int k) {
  if (k < deriv) return Rational(0);
  return ipow(tau, k - deriv) / factorial(k - deriv);
}

enum class Group { displacement, velocity, acceleration };

struct Slot {
  Group group;
  int node;  // 0 -> n+1, 1 -> n, 2 -> n-1
};

int derivative_order(Group g) {
  switch (g) {
    case Group::displacement: return 0;
    case Group::velocity: return 1;
    case Group::acceleration: return 2;
  }
  return 0;
}

Rational slot_coefficient(const Slot& slot, int k) {
  return series_term(derivative_order(slot.group), kOffset[static_cast<std::size_t>(slot.node)], k);
}

std::string group_name(Group g) {
  switch (g) {
    case Group::displacement: return "displacement";
    case Group::velocity: return "velocity";
    case Group::acceleration: return "acceleration";
  }
  return {};
}

struct Equation {
  std::vector<Rational> coeffs;
  Rational rhs;
  std::string label;
};

}  // namespace

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r.numerator();
  if (r.denominator() != 1) os << '/' << r.denominator();
  return os.str();
}

Rational sum(const NodalWeights& w) { return w[0] + w[1] + w[2]; }

int TaylorResidual::vanishing_through() const {
  int d = -1;
  for (const auto& r : coefficients) {
    if (r.numerator() != 0) break;
    ++d;
  }
  return d;
}

TaylorResidual taylor_residual(const Stencil& s, int max_order) {
  if (max_order < s.claimed_order + 1) {
    throw DomainError("taylor_residual: max_order must exceed the claimed order");
  }
  TaylorResidual res;
  res.coefficients.reserve(static_cast<std::size_t>(max_order) + 1);
  for (int k = 0; k <= max_order; ++k) {
    Rational r = s.displacement[0] * slot_coefficient({Group::displacement, 1}, k) +
                 s.displacement[1] * slot_coefficient({Group::displacement, 2}, k);
    for (int j = 0; j < 3; ++j) {
      r += s.velocity[static_cast<std::size_t>(j)] * slot_coefficient({Group::velocity, j}, k);
      if (s.acceleration) {
        r += (*s.acceleration)[static_cast<std::size_t>(j)] *
             slot_coefficient({Group::acceleration, j}, k);
      }
    }
    r -= slot_coefficient({Group::displacement, 0}, k);
    res.coefficients.push_back(r);
  }
  return res;
}

Rational monomial_value(const Stencil& s, int k) {
  // t_{n+1} = 2, t_n = 1, t_{n-1} = 0 (in units of h)
  constexpr std::array<int, 3> node_time{2, 1, 0};
  auto x = [&](int t) { return ipow(t, k); };
  auto v = [&](int t) { return k >= 1 ? Rational(k) * ipow(t, k - 1) : Rational(0); };
  auto a = [&](int t) { return k >= 2 ? Rational(k * (k - 1)) * ipow(t, k - 2) : Rational(0); };

  Rational value = s.displacement[0] * x(node_time[1]) + s.displacement[1] * x(node_time[2]);
  for (std::size_t j = 0; j < 3; ++j) {
    value += s.velocity[j] * v(node_time[j]);
    if (s.acceleration) value += (*s.acceleration)[j] * a(node_time[j]);
  }
  return value;
}

int exactness_degree(const Stencil& s) {
  constexpr int kMaxProbe = 12;
  int degree = -1;
  for (int k = 0; k <= kMaxProbe; ++k) {
    if (monomial_value(s, k) != ipow(2, k)) break;
    degree = k;
  }
  return degree;
}

WeightSolution solve_weights(const PartialStencil& fixed, const WeightTargets& targets,
                             int order_goal) {
  if (order_goal < 0) throw DomainError("solve_weights: negative order goal");

  Infeasibility report;
  const bool predictor = fixed.kind == StencilKind::predictor;

  // Collect free slots; a predictor never weights node n+1.
  std::vector<Slot> free_slots;
  Stencil base;
  base.kind = fixed.kind;
  base.displacement = fixed.displacement;
  base.claimed_order = order_goal;
  if (fixed.acceleration) base.acceleration = NodalWeights{};

  auto visit_group = [&](Group g, const std::array<std::optional<Rational>, 3>& w,
                         NodalWeights& out) {
    for (int j = 0; j < 3; ++j) {
      const auto& wj = w[static_cast<std::size_t>(j)];
      if (predictor && j == 0) {
        if (wj && wj->numerator() != 0) {
          report.violated.push_back("predictor must not weight " + group_name(g) + " at n+1");
        }
        out[0] = Rational(0);
        continue;
      }
      if (wj) {
        out[static_cast<std::size_t>(j)] = *wj;
      } else {
        free_slots.push_back({g, j});
      }
    }
  };
  visit_group(Group::velocity, fixed.velocity, base.velocity);
  if (fixed.acceleration) visit_group(Group::acceleration, *fixed.acceleration, *base.acceleration);

  const auto unknowns = free_slots.size();
  report.unknowns = static_cast<int>(unknowns);

  // Free slots are still zero in `base`, so its residual is the constant part.
  Stencil fixed_only = base;
  fixed_only.claimed_order = -1;
  const auto fixed_residual = taylor_residual(fixed_only, order_goal).coefficients;

  std::vector<Equation> eqs;
  for (int k = 0; k <= order_goal; ++k) {
    Equation e;
    e.label = "r_" + std::to_string(k) + " = 0";
    for (const auto& slot : free_slots) e.coeffs.push_back(slot_coefficient(slot, k));
    e.rhs = -fixed_residual[static_cast<std::size_t>(k)];
    eqs.push_back(std::move(e));
  }

  auto add_sum_target = [&](Group g, const std::optional<Rational>& target, const NodalWeights& w) {
    if (!target) return;
    Equation e;
    e.label = group_name(g) + " sum = " + to_string(*target);
    Rational fixed_sum(0);
    for (int j = 0; j < 3; ++j) fixed_sum += w[static_cast<std::size_t>(j)];
    for (const auto& slot : free_slots) e.coeffs.push_back(Rational(slot.group == g ? 1 : 0));
    e.rhs = *target - fixed_sum;
    eqs.push_back(std::move(e));
  };
  if (targets.displacement && base.displacement[0] + base.displacement[1] != *targets.displacement) {
    report.violated.push_back("displacement sum = " + to_string(*targets.displacement));
  }
  add_sum_target(Group::velocity, targets.velocity, base.velocity);
  if (base.acceleration) {
    add_sum_target(Group::acceleration, targets.acceleration, *base.acceleration);
  }

  // Gauss-Jordan elimination over the rationals.
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_col;
  for (std::size_t col = 0; col < unknowns && rank < eqs.size(); ++col) {
    std::size_t piv = rank;
    while (piv < eqs.size() && eqs[piv].coeffs[col].numerator() == 0) ++piv;
    if (piv == eqs.size()) continue;
    std::swap(eqs[rank], eqs[piv]);
    const Rational p = eqs[rank].coeffs[col];
    for (auto& c : eqs[rank].coeffs) c /= p;
    eqs[rank].rhs /= p;
    for (std::size_t r = 0; r < eqs.size(); ++r) {
      if (r == rank || eqs[r].coeffs[col].numerator() == 0) continue;
      const Rational f = eqs[r].coeffs[col];
      for (std::size_t c = 0; c < unknowns; ++c) eqs[r].coeffs[c] -= f * eqs[rank].coeffs[c];
      eqs[r].rhs -= f * eqs[rank].rhs;
    }
    pivot_col.push_back(col);
    ++rank;
  }
  report.rank = static_cast<int>(rank);
  for (std::size_t r = rank; r < eqs.size(); ++r) {
    if (eqs[r].rhs.numerator() != 0) report.violated.push_back(eqs[r].label);
  }

  if (!report.violated.empty()) {
    report.reason = Infeasibility::Reason::inconsistent;
    return report;
  }
  if (rank < unknowns) {
    report.reason = Infeasibility::Reason::underdetermined;
    return report;
  }

  Stencil out = base;
  for (std::size_t r = 0; r < rank; ++r) {
    const Slot& slot = free_slots[pivot_col[r]];
    auto& group = slot.group == Group::velocity ? out.velocity : *out.acceleration;
    group[static_cast<std::size_t>(slot.node)] = eqs[r].rhs;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

std::vector<CatalogueEntry> build_catalogue() {
  using K = StencilKind;
  const std::array<Rational, 2> one_step{q(1), q(0)};
  const std::array<Rational, 2> bdf{q(4, 3), q(-1, 3)};

  std::vector<CatalogueEntry> c;
  c.push_back({"heun-predictor", "x1 = x0 + h v0",
               {K::one_step, one_step, {q(0), q(1), q(0)}, std::nullopt, 1}, true});
  c.push_back({"heun-corrector", "x1 = x0 + h/2 (v1p + v0)",
               {K::one_step, one_step, {q(1, 2), q(1, 2), q(0)}, std::nullopt, 2}, true});
  c.push_back({"bdf2-predictor", "x = (4xn - xn-1)/3 + 2h/3 (2vn - vn-1)",
               {K::predictor, bdf, {q(0), q(4, 3), q(-2, 3)}, std::nullopt, 2}, true});
  c.push_back({"bdf2-corrector", "x = (4xn - xn-1)/3 + 2h/3 vp",
               {K::corrector, bdf, {q(2, 3), q(0), q(0)}, std::nullopt, 2}, true});
  c.push_back({"taylor-startup-predictor", "x1 = x0 + h v0 + h^2/2 a0",
               {K::one_step, one_step, {q(0), q(1), q(0)}, NodalWeights{q(0), q(1, 2), q(0)}, 2},
               true});
  c.push_back({"startup-corrector", "x1 = x0 + h/2 (v1p + v0) - h^2/12 (a1p - a0)",
               {K::one_step, one_step, {q(1, 2), q(1, 2), q(0)},
                NodalWeights{q(-1, 12), q(1, 12), q(0)}, 3},
               true});
  c.push_back({"second-order-predictor",
               "x = (4xn - xn-1)/3 + h/6 (3vn + vn-1) + h^2/36 (31an - an-1)",
               {K::predictor, bdf, {q(0), q(1, 2), q(1, 6)}, NodalWeights{q(0), q(31, 36), q(-1, 36)},
                3},
               true});
  c.push_back({"averaged-corrector",
               "x = (4xn - xn-1)/3 + h/24 (vp + 14vn + vn-1) + h^2/72 (10ap + 51an - an-1)",
               {K::corrector, bdf, {q(1, 24), q(14, 24), q(1, 24)},
                NodalWeights{q(10, 72), q(51, 72), q(-1, 72)}, 3},
               false});
  c.push_back({"type1-corrector", "x = (4xn - xn-1)/3 + h/9 (vp + 5vn) + 2h^2/9 (ap + 3an)",
               {K::corrector, bdf, {q(1, 9), q(5, 9), q(0)}, NodalWeights{q(2, 9), q(6, 9), q(0)}, 3},
               false});
  c.push_back({"type2-corrector",
               "x = (4xn - xn-1)/3 + h/36 (-vp + 22vn + 3vn-1) + h^2/36 (2ap + 27an - an-1)",
               {K::corrector, bdf, {q(-1, 36), q(22, 36), q(3, 36)},
                NodalWeights{q(2, 36), q(27, 36), q(-1, 36)}, 3},
               true});
  // Velocity formulas of the paired displacement/velocity solver; x reads v, v reads a.
  c.push_back({"velocity-startup-predictor", "v1 = v0 + h a0",
               {K::one_step, one_step, {q(0), q(1), q(0)}, std::nullopt, 2}, false});
  c.push_back({"velocity-startup-corrector", "v1 = v0 + h/2 (a1p + a0)",
               {K::one_step, one_step, {q(1, 2), q(1, 2), q(0)}, std::nullopt, 3}, false});
  c.push_back({"velocity-predictor", "v = (4vn - vn-1)/3 + 2h/3 (2an - an-1)",
               {K::predictor, bdf, {q(0), q(4, 3), q(-2, 3)}, std::nullopt, 3}, false});
  c.push_back({"velocity-corrector", "v = (4vn - vn-1)/3 + 2h/3 ap",
               {K::corrector, bdf, {q(2, 3), q(0), q(0)}, std::nullopt, 3}, false});
  return c;
}

}  // namespace

const std::vector<CatalogueEntry>& catalogue() {
  static const std::vector<CatalogueEntry> entries = build_catalogue();
  return entries;
}

const CatalogueEntry& catalogue_entry(const std::string& name) {
  for (const auto& e : catalogue()) {
    if (e.name == name) return e;
  }
  throw DomainError("unknown stencil: " + name);
}

std::vector<VerificationRow> verify_catalogue() {
  std::vector<VerificationRow> rows;
  for (const auto& e : catalogue()) {
    VerificationRow row;
    row.name = e.name;
    row.claimed_order = e.stencil.claimed_order;
    const auto res = taylor_residual(e.stencil, std::max(4, e.stencil.claimed_order + 1));
    std::copy_n(res.coefficients.begin(), 5, row.residual.begin());
    row.exactness = exactness_degree(e.stencil);
    row.order_verified = e.order_verified;
    row.meets_claim = row.exactness >= row.claimed_order;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pece::stencil
