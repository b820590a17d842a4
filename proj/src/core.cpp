#include "pece/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pece {

bool StateVector::all_finite() const noexcept {
  for (double x : v_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void require_same_size(const StateVector& a, const StateVector& b) {
  if (a.size() != b.size()) {
    throw InvalidStateError("state dimension mismatch: " + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
  }
}

StateVector& StateVector::operator+=(const StateVector& rhs) {
  require_same_size(*this, rhs);
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += rhs.v_[i];
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& rhs) {
  require_same_size(*this, rhs);
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= rhs.v_[i];
  return *this;
}

StateVector& StateVector::operator*=(double s) noexcept {
  for (double& x : v_) x *= s;
  return *this;
}

StateVector operator+(StateVector lhs, const StateVector& rhs) { return lhs += rhs; }
StateVector operator-(StateVector lhs, const StateVector& rhs) { return lhs -= rhs; }
StateVector operator*(double s, StateVector v) { return v *= s; }
StateVector operator*(StateVector v, double s) { return v *= s; }

double euclidean_norm(const StateVector& x) {
  if (!x.all_finite()) throw InvalidStateError("euclidean_norm: non-finite entry");
  double scale = 0.0;
  for (double xi : x) scale = std::max(scale, std::abs(xi));
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double xi : x) {
    const double r = xi / scale;
    sum += r * r;
  }
  return scale * std::sqrt(sum);
}

void HistoryWindow::advance(NodeRecord next) {
  spare = std::move(previous);
  previous = std::move(current);
  current = std::move(next);
}

void HistoryWindow::halve(NodeRecord midpoint) {
  spare = std::move(previous);
  previous = std::move(midpoint);
  h *= 0.5;
}

bool HistoryWindow::double_back() {
  if (!spare) return false;
  previous = std::move(spare);
  spare.reset();
  h *= 2.0;
  return true;
}

}  // namespace pece
