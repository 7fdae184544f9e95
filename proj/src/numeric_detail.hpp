#pragma once

#include <cmath>
#include <string>

#include "cmbo/error.hpp"

namespace cmbo::detail {

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline void require_alpha_open(double alpha, const char* where) {
  if (!(alpha > 1.0 && alpha < 3.0)) {
    throw DomainError(std::string(where) + ": alpha must lie in (1, 3), got " +
                      std::to_string(alpha));
  }
}

inline void require_positive_tol(double tol, const char* where) {
  if (!(tol > 0.0)) {
    throw ArgumentError(std::string(where) + ": tolerance must be positive");
  }
}

}  // namespace cmbo::detail
