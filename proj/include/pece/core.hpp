/**
 * @file core.hpp
 * @brief State vectors, problem definitions, solver history and run bookkeeping.
 */
#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pece {

/** @brief Raised when a state vector carries a non-finite entry or mismatched dimension. */
class InvalidStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** @brief Raised when an argument lies outside an operation's domain. */
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/**
 * @brief Dense real vector for displacement, velocity or acceleration samples.
 *
 * Arithmetic between two vectors requires equal dimensions.
 */
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::size_t dim, double fill = 0.0) : v_(dim, fill) {}
  StateVector(std::initializer_list<double> init) : v_(init) {}
  explicit StateVector(std::vector<double> values) : v_(std::move(values)) {}

  [[nodiscard]] std::size_t size() const noexcept { return v_.size(); }
  [[nodiscard]] double& operator[](std::size_t i) { return v_[i]; }
  [[nodiscard]] double operator[](std::size_t i) const { return v_[i]; }
  [[nodiscard]] std::span<const double> values() const noexcept { return v_; }
  [[nodiscard]] auto begin() const noexcept { return v_.begin(); }
  [[nodiscard]] auto end() const noexcept { return v_.end(); }

  [[nodiscard]] bool all_finite() const noexcept;

  StateVector& operator+=(const StateVector& rhs);
  StateVector& operator-=(const StateVector& rhs);
  StateVector& operator*=(double s) noexcept;

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  std::vector<double> v_;
};

[[nodiscard]] StateVector operator+(StateVector lhs, const StateVector& rhs);
[[nodiscard]] StateVector operator-(StateVector lhs, const StateVector& rhs);
[[nodiscard]] StateVector operator*(double s, StateVector v);
[[nodiscard]] StateVector operator*(StateVector v, double s);

/// Throws InvalidStateError unless both vectors have the same dimension.
void require_same_size(const StateVector& a, const StateVector& b);

/// Euclidean norm. Throws InvalidStateError on a non-finite entry.
[[nodiscard]] double euclidean_norm(const StateVector& x);

using VelocityFn = std::function<StateVector(double t, const StateVector& x)>;
using AccelerationFn =
    std::function<StateVector(double t, const StateVector& x, const StateVector& v)>;

/// x' = v(t, x).
struct FirstOrderProblem {
  VelocityFn velocity;
  StateVector x0;
  double t_end = 1.0;
  int n_global = 1;
};

/// x' = v(t, x) with a(t, x, v) also prescribed.
struct KinematicProblem {
  VelocityFn velocity;
  AccelerationFn acceleration;
  StateVector x0;
  double t_end = 1.0;
  int n_global = 1;
};

/// x'' = a(t, x, v); both x and v are integrated.
struct DynamicProblem {
  AccelerationFn acceleration;
  StateVector x0;
  StateVector v0;
  double t_end = 1.0;
  int n_global = 1;
};

using TrajectoryFn = std::function<StateVector(double t)>;

/// A problem with a known solution, posed in whichever families it fits.
struct ClosedFormProblem {
  std::string name;
  std::optional<FirstOrderProblem> first_order;
  std::optional<KinematicProblem> kinematic;
  std::optional<DynamicProblem> dynamic;
  TrajectoryFn exact_x;
  TrajectoryFn exact_v;
};

/// One solution node. `a` is present for the second-order families.
struct NodeRecord {
  double t = 0.0;
  StateVector x;
  StateVector v;
  std::optional<StateVector> a;
};

/**
 * @brief Two-step solver memory.
 *
 * Holds nodes n-1 and n, spaced exactly h apart, plus an optional spare record
 * two local steps behind node n that makes step doubling possible without
 * extrapolation.
 */
struct HistoryWindow {
  std::optional<NodeRecord> previous;
  NodeRecord current;
  std::optional<NodeRecord> spare;
  double h = 0.0;

  [[nodiscard]] bool has_previous() const noexcept { return previous.has_value(); }

  /// n-1 <- n, n <- next. The old n-1 becomes the spare.
  void advance(NodeRecord next);

  /// h <- h/2 with `midpoint` as the new n-1; the old n-1 becomes the spare.
  void halve(NodeRecord midpoint);

  /// h <- 2h with the spare as the new n-1. Returns false, unchanged, without a spare.
  bool double_back();
};

struct RunStatistics {
  long local_steps = 0;
  long halvings = 0;
  long doublings = 0;
  long restarts = 0;

  friend bool operator==(const RunStatistics&, const RunStatistics&) = default;
};

struct ErrorSample {
  double t = 0.0;
  double eps = 0.0;
  double h = 0.0;
};

/// Output at the global nodes 0..N together with the controller trace.
struct SolutionSeries {
  struct Record {
    double t = 0.0;
    StateVector x;
    std::optional<StateVector> v;
  };

  std::vector<Record> records;
  RunStatistics stats;
  std::vector<ErrorSample> error_trace;
  /// Indices into error_trace of the steps whose acceptance doubled h.
  std::vector<std::size_t> doubling_events;
};

}  // namespace pece
