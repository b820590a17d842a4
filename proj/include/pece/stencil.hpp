/**
 * @file stencil.hpp
 * @brief Exact order-condition analysis of one- and two-step formulas.
 *
 * A formula is described by its nodal weights
 *
 *   x_{n+1} = d_n x_n + d_{n-1} x_{n-1}
 *           + h   (w^v_{n+1} v_{n+1} + w^v_n v_n + w^v_{n-1} v_{n-1})
 *           + h^2 (w^a_{n+1} a_{n+1} + w^a_n a_n + w^a_{n-1} a_{n-1})
 *
 * and every quantity is a rational number. The same description serves a
 * velocity formula when x is read as v and v as a.
 */
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <boost/rational.hpp>

namespace pece::stencil {

using Rational = boost::rational<std::int64_t>;

enum class StencilKind { predictor, corrector, one_step };

/// Weight slots ordered as nodes n+1, n, n-1.
using NodalWeights = std::array<Rational, 3>;

struct Stencil {
  StencilKind kind = StencilKind::corrector;
  /// Weights on x_n and x_{n-1}.
  std::array<Rational, 2> displacement{Rational(1), Rational(0)};
  NodalWeights velocity{};
  std::optional<NodalWeights> acceleration;
  /// Local error is O(h^{p+1}) for claimed order p.
  int claimed_order = 0;

  friend bool operator==(const Stencil&, const Stencil&) = default;
};

/// Coefficient r_k of h^k x^{(k)}(t_n) in (formula - exact x_{n+1}), k = 0..K.
struct TaylorResidual {
  std::vector<Rational> coefficients;

  /// Largest d with r_0..r_d all zero, -1 if r_0 != 0.
  [[nodiscard]] int vanishing_through() const;
};

/// Throws pece::DomainError when max_order < claimed_order + 1.
[[nodiscard]] TaylorResidual taylor_residual(const Stencil& s, int max_order);

/// Highest monomial degree the formula reproduces exactly on nodes 0, h, 2h.
[[nodiscard]] int exactness_degree(const Stencil& s);

/// Value produced by the formula for x(t) = t^k on nodes t_{n-1}=0, t_n=1, t_{n+1}=2.
[[nodiscard]] Rational monomial_value(const Stencil& s, int k);

[[nodiscard]] Rational sum(const NodalWeights& w);

// ---------------------------------------------------------------------------
// Weight solving

/// A stencil with some velocity/acceleration weights left free (nullopt).
struct PartialStencil {
  StencilKind kind = StencilKind::corrector;
  std::array<Rational, 2> displacement{Rational(4, 3), Rational(-1, 3)};
  std::array<std::optional<Rational>, 3> velocity{};
  /// Absent means the formula carries no acceleration terms.
  std::optional<std::array<std::optional<Rational>, 3>> acceleration;
};

/// Required sums of each weight group; an empty entry is unconstrained.
struct WeightTargets {
  std::optional<Rational> displacement = Rational(1);
  std::optional<Rational> velocity = Rational(2, 3);
  std::optional<Rational> acceleration = Rational(5, 6);
};

struct Infeasibility {
  enum class Reason { inconsistent, underdetermined };
  Reason reason = Reason::inconsistent;
  int unknowns = 0;
  int rank = 0;
  /// Conditions that cannot hold, e.g. "r_1 = 0" or "velocity sum = 2/3".
  std::vector<std::string> violated;
};

using WeightSolution = std::variant<Stencil, Infeasibility>;

/**
 * @brief Solves {r_k = 0, k <= order_goal} together with the weight-sum targets
 * for the free weights of @p fixed.
 *
 * A unique solution is returned as a full Stencil with claimed_order =
 * order_goal. Otherwise the report states whether the system is inconsistent
 * (with the offending conditions) or rank deficient.
 */
[[nodiscard]] WeightSolution solve_weights(const PartialStencil& fixed, const WeightTargets& targets,
                                           int order_goal);

// ---------------------------------------------------------------------------
// Catalogue of the formulas used by the steppers, with coefficients as printed.

struct CatalogueEntry {
  std::string name;
  std::string formula;
  Stencil stencil;
  /// Entries the integrators rely on; these must meet their claimed order.
  bool order_verified = false;
};

[[nodiscard]] const std::vector<CatalogueEntry>& catalogue();
[[nodiscard]] const CatalogueEntry& catalogue_entry(const std::string& name);

struct VerificationRow {
  std::string name;
  int claimed_order = 0;
  std::array<Rational, 5> residual{};
  int exactness = 0;
  bool order_verified = false;
  bool meets_claim = false;
};

[[nodiscard]] std::vector<VerificationRow> verify_catalogue();

[[nodiscard]] std::string to_string(const Rational& r);

}  // namespace pece::stencil
