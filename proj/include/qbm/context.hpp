#pragma once

#include <stdexcept>
#include <string>

#include "qbm/scalar.hpp"

namespace qbm {

enum class Mode { exact, floating };

/// Deformation parameter q in (0,1) plus the truncation thresholds used by every
/// infinite product (prod_eps) and every Jackson-type series (tail_eps).
template <Scalar T>
class QContext {
 public:
  static constexpr Mode mode = is_exact_v<T> ? Mode::exact : Mode::floating;

  explicit QContext(T q, double prod_eps = 1e-16, double tail_eps = 1e-14)
      : q_(std::move(q)), prod_eps_(prod_eps), tail_eps_(tail_eps) {
    if (!(q_ > 0 && q_ < 1)) {
      throw std::invalid_argument("q must lie strictly inside (0,1), got " + to_string(q_));
    }
    if (!(prod_eps_ > 0) || !(tail_eps_ > 0)) {
      throw std::invalid_argument("truncation thresholds must be positive");
    }
  }

  const T& q() const { return q_; }
  double q_double() const { return to_double(q_); }
  double prod_eps() const { return prod_eps_; }
  double tail_eps() const { return tail_eps_; }

  /// Same thresholds, floating-point q (exact q converted by rounding).
  QContext<double> to_float() const { return QContext<double>(q_double(), prod_eps_, tail_eps_); }

 private:
  T q_;
  double prod_eps_;
  double tail_eps_;
};

using ExactContext = QContext<Rational>;
using FloatContext = QContext<double>;

}  // namespace qbm
